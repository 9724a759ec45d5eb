#pragma once

#include <stdexcept>
#include <string>

namespace specloc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition, schema or dimension check on caller input failed.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A linear system is singular to working tolerance.
class SingularError : public Error {
 public:
  SingularError(const std::string& what, double sigma_min)
      : Error(what), sigma_min_(sigma_min) {}
  double sigma_min() const { return sigma_min_; }

 private:
  double sigma_min_;
};

/// An iterative procedure hit its cap before meeting its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// A contour passes too close to the spectrum to integrate the resolvent on it.
class ContourError : public Error {
 public:
  ContourError(const std::string& what, double margin)
      : Error(what), margin_(margin) {}
  double margin() const { return margin_; }

 private:
  double margin_;
};

/// An eigenvalue cluster straddles a region boundary.
class AmbiguityError : public Error {
 public:
  using Error::Error;
};

}  // namespace specloc
