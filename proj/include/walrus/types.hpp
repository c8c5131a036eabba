#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace walrus {

using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
// Frames and kernels are stored row-major so that one element (or one mode) is contiguous.
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CRowMat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Bad configuration or arguments. The CLI maps this to exit code 1.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Solver failures, degenerate frames, ill-conditioned steps. Exit code 2.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what, double value = 0.0)
      : std::runtime_error(what), value_(value) {}
  // residual or condition number that triggered the failure
  double value() const { return value_; }

private:
  double value_;
};

// Malformed artifact, CSV or WAV input.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Measure {
  enum class Kind { Scaled, Translated };
  Kind kind = Kind::Scaled;
  long theta = 0;  // window length in samples, translated only

  static Measure scaled() { return {Kind::Scaled, 0}; }
  static Measure translated(long theta) {
    if (theta <= 0) throw ConfigError("translated window theta must be positive");
    return {Kind::Translated, theta};
  }
  bool is_scaled() const { return kind == Kind::Scaled; }
  std::string name() const { return is_scaled() ? "scaled" : "translated"; }
  bool operator==(const Measure&) const = default;
};

}  // namespace walrus
