#include "enacode/numfmt.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>

namespace enacode {

double round12(double v) {
  if (!std::isfinite(v))
    return v;
  const auto text = fmt::format("{:.12g}", v);
  const double r = std::strtod(text.c_str(), nullptr);
  return r == 0.0 ? 0.0 : r;
}

double tidy(double v) {
  if (std::fabs(v) < 1e-12) // cancellation residue differs between platforms
    return 0.0;
  return round12(v);
}

std::vector<double> tidy(const std::vector<double>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v)
    out.push_back(tidy(x));
  return out;
}

std::string fixed(double v, int digits) {
  auto s = fmt::format("{:.{}f}", v, digits);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos)
    s.erase(0, 1);
  return s;
}

std::string fixed2(double v) { return fixed(v, 2); }

} // namespace enacode
