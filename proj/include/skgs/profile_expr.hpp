#pragma once

#include <string_view>

#include "skgs/grid.hpp"

namespace skgs {

/// Compiles a one-variable expression such as "sin(pi*(x-a)/(b-a))" into a
/// callable profile. Recognised names: x, a, b, pi, e; functions sin, cos,
/// tan, exp, log, sqrt, abs, sinh, cosh, tanh, sech; operators + - * / ^.
/// The keyword "default" maps to default_noise_profile(grid).
Profile parse_profile(std::string_view expr, const Grid1D& grid);

/// Evaluates a constant expression such as "25/256" or "2^-3"; x, a and b
/// are rejected.
double parse_constant(std::string_view expr);

}  // namespace skgs
