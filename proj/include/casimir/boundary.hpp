#pragma once

#include <string>
#include <variant>

#include "casimir/precision.hpp"

namespace casimir {

enum class Field { scalar, electromagnetic };
enum class Polarization { TE, TM };

namespace sphere {
struct Dirichlet {};
struct Neumann {};
struct PerfectConductor {};
/// Frequency-independent permittivity and permeability.
struct Dielectric {
  Rational eps{1};
  Rational mu{1};
};
/// Plasma-model permittivity eps = 1 + omega_p^2 / xi^2 with mu = 1.
/// omega_p is measured in units of 1/R.
struct Plasma {
  Rational omega_p_r{1};
};
}  // namespace sphere

using SphereCondition = std::variant<sphere::Dirichlet, sphere::Neumann, sphere::PerfectConductor,
                                     sphere::Dielectric, sphere::Plasma>;

/// Which physics: the sphere's boundary condition or material, and the
/// plane condition as an overall sign of the round-trip matrix
/// (+1 Dirichlet or conductor, -1 Neumann).
struct BoundarySpec {
  SphereCondition sphere;
  int plane_sign = +1;

  static BoundarySpec scalar(bool sphere_dirichlet, bool plane_dirichlet) {
    BoundarySpec b;
    if (sphere_dirichlet)
      b.sphere = sphere::Dirichlet{};
    else
      b.sphere = sphere::Neumann{};
    b.plane_sign = plane_dirichlet ? +1 : -1;
    return b;
  }
  static BoundarySpec dd() { return scalar(true, true); }
  static BoundarySpec dn() { return scalar(true, false); }
  static BoundarySpec nd() { return scalar(false, true); }
  static BoundarySpec nn() { return scalar(false, false); }
  static BoundarySpec conductor() { return {sphere::PerfectConductor{}, +1}; }
  static BoundarySpec dielectric(const Rational& eps, const Rational& mu) {
    BoundarySpec b{sphere::Dielectric{eps, mu}, +1};
    b.validate();
    return b;
  }
  static BoundarySpec plasma(const Rational& omega_p_r) {
    BoundarySpec b{sphere::Plasma{omega_p_r}, +1};
    b.validate();
    return b;
  }

  Field field() const {
    return std::holds_alternative<sphere::Dirichlet>(sphere) || std::holds_alternative<sphere::Neumann>(sphere)
               ? Field::scalar
               : Field::electromagnetic;
  }
  bool is_em() const { return field() == Field::electromagnetic; }
  /// Smallest orbital index in the trace: 0 for scalar, 1 for EM.
  int l_min() const { return is_em() ? 1 : 0; }
  /// Exact-rational evaluation needs every input rational and no
  /// transcendental point values.
  bool admits_exact() const { return !std::holds_alternative<sphere::Plasma>(sphere); }

  void validate() const {
    if (plane_sign != 1 && plane_sign != -1) throw DomainError("plane sign must be +1 or -1");
    if (const auto* d = std::get_if<sphere::Dielectric>(&sphere)) {
      if (d->eps <= 0 || d->mu <= 0) throw DomainError("dielectric needs eps > 0 and mu > 0");
      if (d->eps == 1 && d->mu == 1) throw DomainError("dielectric with eps = mu = 1 is the vacuum");
    }
    if (const auto* p = std::get_if<sphere::Plasma>(&sphere)) {
      if (p->omega_p_r <= 0) throw DomainError("plasma model needs omega_p > 0");
    }
  }

  std::string name() const {
    const std::string plane = plane_sign > 0 ? "D" : "N";
    return std::visit(
        [&](const auto& s) -> std::string {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, sphere::Dirichlet>) return "D" + plane;
          else if constexpr (std::is_same_v<T, sphere::Neumann>) return "N" + plane;
          else if constexpr (std::is_same_v<T, sphere::PerfectConductor>) return "EM";
          else if constexpr (std::is_same_v<T, sphere::Dielectric>)
            return "dielectric(eps=" + s.eps.str() + ",mu=" + s.mu.str() + ")";
          else
            return "plasma(omega_p=" + s.omega_p_r.str() + ")";
        },
        sphere);
  }
};

}  // namespace casimir
