#pragma once

#include <cmath>
#include <ostream>

#include "rangekin/error.hpp"

namespace rangekin {

/// Planar vector used for positions (m), velocities (m/s) and accelerations (m/s^2).
/// Both components are finite; construction from NaN/Inf throws InvalidInput.
class Vec2 {
 public:
  constexpr Vec2() = default;
  Vec2(double x, double y) : x_(x), y_(y) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw Error(ErrorKind::InvalidInput, "Vec2 components must be finite");
    }
  }

  constexpr double x() const noexcept { return x_; }
  constexpr double y() const noexcept { return y_; }

  double dot(const Vec2& o) const noexcept { return x_ * o.x_ + y_ * o.y_; }
  double squared_norm() const noexcept { return dot(*this); }
  double norm() const noexcept { return std::hypot(x_, y_); }

  friend Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x_ + b.x_, a.y_ + b.y_}; }
  friend Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x_ - b.x_, a.y_ - b.y_}; }
  friend Vec2 operator-(const Vec2& a) { return {-a.x_, -a.y_}; }
  friend Vec2 operator*(double s, const Vec2& a) { return {s * a.x_, s * a.y_}; }
  friend Vec2 operator*(const Vec2& a, double s) { return s * a; }

  Vec2& operator+=(const Vec2& o) { return *this = *this + o; }

  friend bool operator==(const Vec2&, const Vec2&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Vec2& v) {
    return os << '[' << v.x_ << ", " << v.y_ << ']';
  }

 private:
  double x_ = 0.0;
  double y_ = 0.0;
};

}  // namespace rangekin
