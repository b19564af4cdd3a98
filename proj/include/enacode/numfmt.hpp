#pragma once

#include <string>
#include <vector>

namespace enacode {

/// Rounds to 12 significant digits and flushes |v| < 1e-12 (and -0) to 0, so
/// serialized floating-point artifacts do not carry last-bit noise.
double tidy(double v);
/// 12-significant-digit rounding without the flush (for tiny p-values).
double round12(double v);
std::vector<double> tidy(const std::vector<double>& v);

/// Fixed-point rendering that never prints a negative zero ("-0.00" -> "0.00").
std::string fixed(double v, int digits);
std::string fixed2(double v);

} // namespace enacode
