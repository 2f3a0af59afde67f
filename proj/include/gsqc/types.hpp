#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gsqc {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Matrix2 = Eigen::Matrix2cd;
using Vector2 = Eigen::Vector2cd;
using Index = std::int64_t;

inline constexpr double kDefaultEpsilon = 1.0;   // energy unit of every coupling
inline constexpr double kDefaultDelta = 1e-3;    // input-selection bias magnitude

// Raised on malformed program text or bad parameters.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Experiment description problems (maps to exit code 2).
class ConfigError : public Error {
public:
  using Error::Error;
};

// Dimension or memory budget violations (maps to exit code 3).
class ResourceError : public Error {
public:
  using Error::Error;
};

// |<a|b>| with both vectors normalized; global phase does not matter.
inline double fidelity(const Vector& a, const Vector& b) {
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::abs(a.dot(b)) / (na * nb);
}

}  // namespace gsqc
