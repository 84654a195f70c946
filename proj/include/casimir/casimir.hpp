#pragma once

// Low-temperature sphere-plane Casimir coefficients.

#include "casimir/bessel.hpp"
#include "casimir/boundary.hpp"
#include "casimir/errors.hpp"
#include "casimir/linalg.hpp"
#include "casimir/lowtemp.hpp"
#include "casimir/matrix_expansion.hpp"
#include "casimir/oracle.hpp"
#include "casimir/precision.hpp"
#include "casimir/scattering.hpp"
#include "casimir/series.hpp"
#include "casimir/wigner.hpp"

namespace casimir {
inline constexpr const char* kVersion = "0.1.0";
}
