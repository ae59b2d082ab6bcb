#include "ctops/half_integer.hpp"

#include <cmath>
#include <stdexcept>

namespace ctops {

HalfInteger HalfInteger::from_double(double value) {
  const double twice = 2.0 * value;
  const double rounded = std::round(twice);
  if (!std::isfinite(value) || std::abs(twice - rounded) > 1e-9) {
    throw std::invalid_argument("not a half-integer: " + std::to_string(value));
  }
  return from_twice(static_cast<int>(rounded));
}

HalfInteger HalfInteger::parse(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return from_double(std::stod(text));
    const int num = std::stoi(text.substr(0, slash));
    const int den = std::stoi(text.substr(slash + 1));
    if (den == 1) return from_int(num);
    if (den == 2) return from_twice(num);
  } catch (const std::logic_error&) {
  }
  throw std::invalid_argument("not a half-integer: '" + text + "'");
}

std::string HalfInteger::to_string() const {
  if (is_integer()) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

}  // namespace ctops
