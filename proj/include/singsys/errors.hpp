#pragma once

#include <stdexcept>
#include <string>

namespace singsys {

enum class ErrorKind {
  InvalidMesh,
  InvalidStrip,
  InvalidExponent,
  InvalidParameter,
  InvalidConfig,
  InvalidBarriers,
  DomainError,
  SolverFailure,
  BarrierFailure,
  TuningFailure,
  Nonconvergence,
  ParseError,
  HypothesisViolation,
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

// Newton or Picard loop stopped before reaching its tolerance.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double last_residual)
      : Error(ErrorKind::SolverFailure, what), last_residual_(last_residual) {}

  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

}  // namespace singsys
