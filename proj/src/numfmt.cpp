#include "safexec/numfmt.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace safexec {

std::string python_float_repr(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";

  bool negative = std::signbit(value);
  double magnitude = negative ? -value : value;

  // Shortest round-trip digits via scientific to_chars: "d.ddddde±xx".
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), magnitude, std::chars_format::scientific);
  std::string sci(buf, res.ptr);

  std::string digits;
  int exp10 = 0;
  size_t epos = sci.find('e');
  digits += sci[0];
  if (sci[1] == '.') {
    digits += sci.substr(2, epos - 2);
  }
  exp10 = std::stoi(sci.substr(epos + 1));

  std::string out;
  if (exp10 >= 16 || exp10 < -4) {
    // Scientific: d[.ddd]e±XX with at least two exponent digits.
    out += digits[0];
    if (digits.size() > 1) {
      out += '.';
      out += digits.substr(1);
    }
    out += 'e';
    out += exp10 < 0 ? '-' : '+';
    int mag = exp10 < 0 ? -exp10 : exp10;
    char expbuf[16];
    std::snprintf(expbuf, sizeof(expbuf), "%02d", mag);
    out += expbuf;
  } else if (exp10 >= 0) {
    size_t int_digits = static_cast<size_t>(exp10) + 1;
    if (digits.size() <= int_digits) {
      out = digits + std::string(int_digits - digits.size(), '0') + ".0";
    } else {
      out = digits.substr(0, int_digits) + "." + digits.substr(int_digits);
    }
  } else {
    out = "0." + std::string(static_cast<size_t>(-exp10) - 1, '0') + digits;
  }
  return negative ? "-" + out : out;
}

}  // namespace safexec
