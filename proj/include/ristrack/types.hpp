#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ristrack {

using cd = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CRow = Eigen::RowVectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr cd kJ{0.0, 1.0};

enum class ErrorKind {
  kDegenerateGeometry,
  kInvalidConfig,
  kBdInfeasible,
  kDegenerateChannel,
  kPowerBudget,
  kNumericDegenerate,
  kSingularInnovation,
  kSingularMatrix,
  kConvergenceFailure,
  kParse,
  kIo,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers can branch
// on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDegenerateGeometry: return "degenerate-geometry";
    case ErrorKind::kInvalidConfig: return "invalid-config";
    case ErrorKind::kBdInfeasible: return "bd-infeasible";
    case ErrorKind::kDegenerateChannel: return "degenerate-channel";
    case ErrorKind::kPowerBudget: return "power-budget";
    case ErrorKind::kNumericDegenerate: return "numeric-degenerate";
    case ErrorKind::kSingularInnovation: return "singular-innovation";
    case ErrorKind::kSingularMatrix: return "singular-matrix";
    case ErrorKind::kConvergenceFailure: return "convergence-failure";
    case ErrorKind::kParse: return "parse-error";
    case ErrorKind::kIo: return "io-error";
  }
  return "unknown";
}

}  // namespace ristrack
