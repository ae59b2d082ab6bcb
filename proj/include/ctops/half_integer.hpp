#pragma once

#include <compare>
#include <string>

namespace ctops {

/// Angular-momentum quantum number stored as twice its value.
class HalfInteger {
 public:
  constexpr HalfInteger() = default;

  static constexpr HalfInteger from_twice(int twice) { return HalfInteger(twice, 0); }
  static constexpr HalfInteger from_int(int value) { return HalfInteger(2 * value, 0); }

  /// Throws std::invalid_argument unless `value` is a multiple of 1/2.
  static HalfInteger from_double(double value);

  /// Parses "3", "3/2", "1.5", "-1/2".
  static HalfInteger parse(const std::string& text);

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }

  constexpr HalfInteger operator-() const { return from_twice(-twice_); }
  constexpr HalfInteger operator+(HalfInteger o) const { return from_twice(twice_ + o.twice_); }
  constexpr HalfInteger operator-(HalfInteger o) const { return from_twice(twice_ - o.twice_); }
  constexpr HalfInteger abs() const { return from_twice(twice_ < 0 ? -twice_ : twice_); }

  constexpr auto operator<=>(const HalfInteger&) const = default;

  std::string to_string() const;

 private:
  constexpr HalfInteger(int twice, int) : twice_(twice) {}
  int twice_ = 0;
};

/// True when a - b is an integer.
constexpr bool same_parity(HalfInteger a, HalfInteger b) { return (a.twice() - b.twice()) % 2 == 0; }

}  // namespace ctops
