#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace swarm {

inline constexpr double kPi = std::numbers::pi;

using Vec2 = Eigen::Vector2d;

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

inline double clamp_abs(double value, double bound) {
  return value > bound ? bound : (value < -bound ? -bound : value);
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A distance outside the sensing disk was handed to the detection model.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// Innovation covariance or sensing geometry is singular.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// The bounded flow network admits no feasible flow.
class Infeasible : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace swarm
