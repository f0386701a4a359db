#include "slicelab/pnorm.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace slicelab {

PNorm PNorm::finite_value(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw std::invalid_argument("p must be a finite positive number, got " + std::to_string(p));
  }
  return PNorm(p);
}

PNorm PNorm::parse(std::string_view text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return infinity();
  double p = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), p);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("cannot parse p from '" + std::string(text) + "'");
  }
  return finite_value(p);
}

std::string PNorm::to_string() const {
  if (cube()) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << p_;
  return os.str();
}

}  // namespace slicelab
