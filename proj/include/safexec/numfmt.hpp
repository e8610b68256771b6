#pragma once

#include <string>

namespace safexec {

// Shortest round-trip decimal form of a double, formatted with the reference
// language's repr rules: fixed notation for exponents in [-4, 16), otherwise
// scientific with a signed two-digit exponent; integral values keep a ".0".
std::string python_float_repr(double value);

}  // namespace safexec
