#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace incl {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double pi = 3.14159265358979323846;

enum class ErrorKind {
  validation,     // bad physical or geometric input
  domain,         // evaluation point outside the admissible region
  singular,       // vanishing map derivative or coincident kernel points
  order_mismatch, // finite sections of different sizes combined
  window,         // Laurent window too small for the requested coefficient
  mode,           // operation undefined for the material mode (cavity)
  assembly,
  solve,
  oracle,
  config,
  io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Serial kernels are kept alongside the OpenMP ones as a reference.
enum class Exec { serial, parallel };

}  // namespace incl
