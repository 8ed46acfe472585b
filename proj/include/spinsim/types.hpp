#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace spinsim {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr int kMaxSpins = 8;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Base for every error raised by the library. The CLI maps these to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

// Parse failure with a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(std::string file, int line, int col, const std::string& msg)
      : Error(file + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        file_(std::move(file)), line_(line), col_(col), reason_(msg) {}

  const std::string& file() const { return file_; }
  int line() const { return line_; }
  int column() const { return col_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string file_;
  int line_;
  int col_;
  std::string reason_;
};

// Fixed 12-significant-digit formatting used for every text artifact.
std::string fmt_real(double v);

}  // namespace spinsim
