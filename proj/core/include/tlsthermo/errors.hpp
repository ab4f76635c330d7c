#pragma once

#include <stdexcept>
#include <string>

namespace tlsthermo {

// Invalid physical parameters or a violated precondition.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure did not reach its stated accuracy.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// The Fock truncation is too small for the requested state.
class CutoffError : public SolverError {
 public:
  CutoffError(const std::string& what, double tail_population)
      : SolverError(what, tail_population) {}
};

}  // namespace tlsthermo
