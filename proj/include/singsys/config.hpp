#pragma once

#include <string>

#include "singsys/subsup.hpp"
#include "singsys/system.hpp"

namespace singsys {

/// `interval a b` or `box ax bx ay by`; n nodes per axis.
struct DomainSpec {
  int dimension = 1;
  double ax = 0.0, bx = 1.0, ay = 0.0, by = 1.0;
  Eigen::Index n = 129;

  Mesh build() const;
  std::string describe() const;
};

/// Parses `interval a b` / `box ax bx ay by`. Throws ParseError.
DomainSpec parse_domain(const std::string& text);

struct RunConfig {
  ProblemParams params;
  DomainSpec domain;
  BuilderConfig builder;
  SolveOptions solve;
  SystemOptions system;
  std::string out_dir = ".";

  /// Builder fields given explicitly; the rest follow BuilderConfig::defaults
  /// for the current mesh.
  bool has_delta_strip = false, has_theta1 = false, has_theta2 = false;
  bool has_delta_exp = false, has_margin = false;

  /// Re-derives the unset builder fields after the mesh changed (e.g. --n).
  void refresh_builder();
};

/// One `key = value` per line, `#` starts a comment. Keys: p, q, alpha1,
/// alpha2, beta1, beta2, lambda (required); domain, n, delta_strip, theta1,
/// theta2, delta_exp, margin, tol_inner, tol_outer, max_outer, C, C_cap.
/// Throws Error(ParseError) with the line number, Error(HypothesisViolation)
/// naming h1 or h2, or Error(InvalidConfig).
RunConfig parse_config(const std::string& text);

RunConfig load_config(const std::string& path);

}  // namespace singsys
