// casimir_lowt: tables of low-temperature sphere-plane Casimir coefficients.
//
// Exit codes: 0 ok, 2 bad configuration, 3 numerical failure,
// 4 truncation sequence does not settle.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "casimir/casimir.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace casimir;

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitNonConvergent = 4;

struct Options {
  std::string case_name;
  std::string eps = "1", mu = "1", omega_p = "1";
  std::string rho, rho_grid;
  std::optional<int> lm, lm_max;
  std::optional<unsigned> precision;
  std::string out;
  std::string format = "csv";
  int digits = 20;
  unsigned threads = 1;
  bool exact = false;
  std::string channel = "total";
  std::string powers = "3,6,9";
  std::string t_max = "0.02";
  int nodes = 16;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  json extra = json::object();
  int exit_code = 0;
};

BoundarySpec parse_case(const Options& o) {
  const std::string& c = o.case_name;
  if (c == "DD") return BoundarySpec::dd();
  if (c == "DN") return BoundarySpec::dn();
  if (c == "ND") return BoundarySpec::nd();
  if (c == "NN") return BoundarySpec::nn();
  if (c == "EM") return BoundarySpec::conductor();
  if (c == "dielectric") return BoundarySpec::dielectric(parse_rational(o.eps), parse_rational(o.mu));
  if (c == "plasma") return BoundarySpec::plasma(parse_rational(o.omega_p));
  throw DomainError("unknown case '" + c + "'");
}

Channel parse_channel(const std::string& s) {
  if (s == "total") return Channel::total;
  if (s == "te" || s == "TE") return Channel::te;
  if (s == "tm" || s == "TM") return Channel::tm;
  throw DomainError("unknown channel '" + s + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep))
    if (!item.empty()) parts.push_back(item);
  return parts;
}

/// "a,b,c" or "lo:hi:count", parsed exactly.
std::vector<Rational> parse_grid(const std::string& text) {
  std::vector<Rational> grid;
  if (text.find(':') != std::string::npos) {
    const auto p = split(text, ':');
    if (p.size() != 3) throw DomainError("range grid must be lo:hi:count");
    const Rational lo = parse_rational(p[0]), hi = parse_rational(p[1]);
    const int n = std::stoi(p[2]);
    for (int i = 0; i < n; ++i) grid.push_back(n == 1 ? lo : Rational(lo + (hi - lo) * i / (n - 1)));
  } else {
    for (const auto& item : split(text, ',')) grid.push_back(parse_rational(item));
  }
  return grid;
}

std::vector<Rational> rho_values(const Options& o) {
  std::vector<Rational> grid;
  if (!o.rho_grid.empty()) grid = parse_grid(o.rho_grid);
  else if (!o.rho.empty()) grid = parse_grid(o.rho);
  if (grid.empty()) throw DomainError("empty rho grid");
  for (const auto& r : grid)
    if (!(r > 0 && r < 1)) throw DomainError("rho must lie in (0, 1), got " + r.str());
  return grid;
}

std::vector<int> lm_values(const Options& o, const BoundarySpec& spec, int fallback) {
  std::vector<int> out;
  if (o.lm_max) {
    for (int l = o.lm ? *o.lm : spec.l_min(); l <= *o.lm_max; ++l) out.push_back(l);
  } else {
    out.push_back(o.lm ? *o.lm : fallback);
  }
  if (out.empty()) throw DomainError("empty l_m range");
  for (int l : out)
    if (l < spec.l_min()) throw DomainError("l_m must be at least " + std::to_string(spec.l_min()));
  return out;
}

std::string fmt(const Real& x, const Options& o) { return to_string(x, o.digits); }

Real real_of(const Rational& q) { return scalar_traits<Real>::from_rational(q); }

NOptions n_options(const Options& o) {
  NOptions n;
  n.threads = o.threads;
  return n;
}

template <class S>
std::vector<std::string> n_row(const Rational& rho, int l_m, const ChannelN<S>& c, const Options& o) {
  const auto f = [&](const S& v) {
    if constexpr (is_exact_v<S>) return v.str();
    else return fmt(v, o);
  };
  return {rho.str(), std::to_string(l_m), f(c.n1), f(c.n3), f(c.n1_te), f(c.n1_tm), f(c.n3_te), f(c.n3_tm)};
}

Table run_n_coeffs(const Options& o) {
  const auto spec = parse_case(o);
  const auto rhos = rho_values(o);
  const auto lms = lm_values(o, spec, spec.l_min() + 3);
  if (o.exact && !spec.admits_exact()) throw InexactInExactMode(spec.name() + " has no exact mode");
  Table t;
  t.columns = {"rho", "l_m", "N1", "N3", "N1_TE", "N1_TM", "N3_TE", "N3_TM"};
  for (const auto& rho : rhos)
    for (int l_m : lms) {
      if (o.exact) {
        const auto r = n_coefficients(Geometry<Rational>::from_rho(rho), spec, l_m, n_options(o));
        t.rows.push_back(n_row(rho, l_m, r.total, o));
      } else {
        const auto r = n_coefficients(Geometry<Real>::from_rho(real_of(rho)), spec, l_m, n_options(o));
        t.rows.push_back(n_row(rho, l_m, r.total, o));
      }
    }
  return t;
}

Table run_c_table(const Options& o) {
  const auto spec = parse_case(o);
  Options defaults = o;
  if (!o.lm && !o.lm_max) defaults.lm_max = 8;
  const auto lms = lm_values(defaults, spec, 8);
  ForceOptions f;
  f.n = n_options(o);
  f.channel = parse_channel(o.channel);
  Table t;
  t.columns = {"l_m", "c2", "c3", "c4", "c5"};
  for (int l_m : lms) {
    const auto c = c_coefficients(spec, l_m, default_c_grid(), f);
    t.rows.push_back({std::to_string(l_m), fmt(c.c2, o), fmt(c.c3, o), fmt(c.c4, o), fmt(c.c5, o)});
  }
  return t;
}

Table run_asymptotics(const Options& o) {
  const auto spec = parse_case(o);
  Options grid_opts = o;
  if (o.rho.empty() && o.rho_grid.empty()) grid_opts.rho_grid = "0.01:0.1:20";
  std::vector<Real> rhos;
  for (const auto& r : rho_values(grid_opts)) rhos.push_back(real_of(r));
  std::vector<int> powers;
  for (const auto& p : split(o.powers, ',')) powers.push_back(std::stoi(p));
  if (powers.empty()) throw DomainError("empty power list");
  const int l_m = lm_values(o, spec, 4).back();
  const auto c = asymptotic_check(spec, l_m, rhos, powers, Quantity::n3, parse_channel(o.channel), n_options(o));
  Table t;
  t.columns = {"power", "coefficient"};
  for (std::size_t i = 0; i < powers.size(); ++i) t.rows.push_back({std::to_string(powers[i]), fmt(c[i], o)});
  t.extra["l_m"] = l_m;
  return t;
}

Table run_sweep(const Options& o) {
  const auto spec = parse_case(o);
  const auto rhos = rho_values(o);
  if (rhos.size() != 1) throw DomainError("sweep takes a single rho");
  const int l_m_max = o.lm_max ? *o.lm_max : (o.lm ? *o.lm : 10);
  const auto report = convergence_sweep(spec, real_of(rhos.front()), l_m_max, parse_channel(o.channel), n_options(o));
  Table t;
  t.columns = {"l_m", "N1", "N3", "delta_N1", "delta_N3"};
  for (const auto& row : report.rows) {
    const Channel ch = report.channel;
    t.rows.push_back({std::to_string(row.l_m), fmt(channel_n1(row.n, ch), o), fmt(channel_n3(row.n, ch), o),
                      fmt(row.delta_n1, o), fmt(row.delta_n3, o)});
  }
  t.extra["converged"] = report.converged;
  t.extra["tail_estimate_N3"] = fmt(report.tail_n3, o);
  if (!report.converged) t.exit_code = kExitNonConvergent;
  return t;
}

Table run_oracle(const Options& o) {
  const auto spec = parse_case(o);
  const auto rhos = rho_values(o);
  const int l_m = lm_values(o, spec, spec.l_min() + 2).back();
  const Real t_max = real_of(parse_rational(o.t_max));
  ConsistencyOptions c;
  c.threads = o.threads;
  Table t;
  t.columns = {"rho", "l_m", "N1", "a1", "err_N1", "N3", "a3", "err_N3", "drift", "slope_lo", "slope_hi"};
  for (const auto& rho : rhos) {
    const auto r = low_t_consistency_check(Geometry<Real>::from_rho(real_of(rho)), spec, l_m,
                                           chebyshev_grid(t_max, o.nodes), c);
    t.rows.push_back({rho.str(), std::to_string(l_m), fmt(r.n1, o), fmt(r.a1, o), fmt(r.err_n1, o), fmt(r.n3, o),
                      fmt(r.a3, o), fmt(r.err_n3, o), fmt(r.drift, o), fmt(r.slopes.front(), o),
                      fmt(r.slopes.back(), o)});
  }
  return t;
}

json config_json(const std::string& command, const Options& o) {
  json c;
  c["command"] = command;
  c["case"] = o.case_name;
  if (o.case_name == "dielectric") {
    c["eps"] = o.eps;
    c["mu"] = o.mu;
  }
  if (o.case_name == "plasma") c["omega_p"] = o.omega_p;
  c["rho"] = o.rho;
  c["rho_grid"] = o.rho_grid;
  c["lm"] = o.lm ? json(*o.lm) : json(nullptr);
  c["lm_max"] = o.lm_max ? json(*o.lm_max) : json(nullptr);
  c["exact"] = o.exact;
  c["channel"] = o.channel;
  c["digits"] = o.digits;
  c["format"] = o.format;
  if (command == "asymptotics") c["powers"] = o.powers;
  if (command == "oracle-check") {
    c["t_max"] = o.t_max;
    c["nodes"] = o.nodes;
  }
  return c;
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

void write(std::ostream& out, const Table& t, const json& meta, const std::string& format) {
  if (format == "json") {
    json doc;
    doc["meta"] = meta;
    doc["rows"] = json::array();
    for (const auto& row : t.rows) {
      json r;
      for (std::size_t i = 0; i < t.columns.size(); ++i) r[t.columns[i]] = row[i];
      doc["rows"].push_back(r);
    }
    out << doc.dump(2) << "\n";
    return;
  }
  out << "# " << meta.dump() << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-temperature Casimir coefficients for a sphere in front of a plane"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "Flat key = value file; command-line flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--case", o.case_name, "DD, DN, ND, NN, EM, dielectric or plasma")
      ->check(CLI::IsMember({"DD", "DN", "ND", "NN", "EM", "dielectric", "plasma"}));
  app.add_option("--eps", o.eps, "Permittivity (dielectric)");
  app.add_option("--mu", o.mu, "Permeability (dielectric)");
  app.add_option("--omega-p", o.omega_p, "Plasma frequency in units of 1/R");
  app.add_option("--rho", o.rho, "Single rho = R/L");
  app.add_option("--rho-grid", o.rho_grid, "Comma list or lo:hi:count");
  app.add_option("--lm", o.lm, "Orbital truncation l_m (first value when --lm-max is given)");
  app.add_option("--lm-max,--lmax", o.lm_max, "Largest l_m of a range");
  app.add_option("--precision", o.precision, "Working precision in decimal digits (>= 30)");
  app.add_option("--out", o.out, "Output file (default stdout)");
  app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--digits", o.digits, "Significant digits written per value")->check(CLI::Range(5, 1000));
  app.add_option("--threads", o.threads, "Worker threads over m-blocks");
  app.add_option("--channel", o.channel, "total, te or tm")->check(CLI::IsMember({"total", "te", "tm"}));

  auto* n_cmd = app.add_subcommand("n-coeffs", "N1, N3 over a rho grid and l_m values");
  n_cmd->add_flag("--exact", o.exact, "Exact rational arithmetic (not for plasma)");
  app.add_subcommand("c-table", "Small-gap force coefficients c2, c3 per l_m (R = 1)");
  auto* a_cmd = app.add_subcommand("asymptotics", "Power-law fit of N3 at small rho");
  a_cmd->add_option("--powers", o.powers, "Comma-separated powers of rho");
  app.add_subcommand("sweep", "N1, N3 against l_m with convergence flag");
  auto* o_cmd = app.add_subcommand("oracle-check", "Finite-frequency cross-check of N1, N3");
  o_cmd->add_option("--t-max", o.t_max, "Largest L xi of the fit grid");
  o_cmd->add_option("--nodes", o.nodes, "Number of fit nodes")->check(CLI::Range(6, 200));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (o.precision) set_working_digits(*o.precision);
    if (o.case_name.empty()) throw DomainError("--case is required");
    Table t;
    if (command == "n-coeffs") t = run_n_coeffs(o);
    else if (command == "c-table") t = run_c_table(o);
    else if (command == "asymptotics") t = run_asymptotics(o);
    else if (command == "sweep") t = run_sweep(o);
    else t = run_oracle(o);

    const json cfg = config_json(command, o);
    json meta;
    meta["tool"] = "casimir_lowt";
    meta["version"] = kVersion;
    meta["precision"] = working_digits();
    meta["config_hash"] = fnv1a_hex(cfg.dump());
    meta["config"] = cfg;
    for (const auto& [k, v] : t.extra.items()) meta[k] = v;

    if (o.out.empty()) {
      write(std::cout, t, meta, o.format);
    } else {
      std::ofstream file(o.out);
      if (!file) throw DomainError("cannot open " + o.out);
      write(file, t, meta, o.format);
    }
    if (t.exit_code == kExitNonConvergent)
      std::cerr << "casimir_lowt: truncation sequence does not settle (see delta columns)\n";
    return t.exit_code;
  } catch (const UnreliableExtraction& e) {
    std::cerr << "casimir_lowt: " << e.what() << "\n";
    return kExitNonConvergent;
  } catch (const DomainError& e) {
    std::cerr << "casimir_lowt: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InexactInExactMode& e) {
    std::cerr << "casimir_lowt: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "casimir_lowt: numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "casimir_lowt: " << e.what() << "\n";
    return kExitConfig;
  }
}
