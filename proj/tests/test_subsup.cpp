#include <doctest.h>

#include "oracles.hpp"
#include "singsys/subsup.hpp"

using namespace singsys;

namespace {

ProblemParams params(double p, double lambda) {
  return ProblemParams::make(p, 2.0, -0.5, 1.5, p == 2.0 ? 1.5 : 2.5, -0.5, lambda);
}

// Settings under which lambda = 1 tunes on (0,1) for p = 2 and p = 3.
BuilderConfig tuned_config(const ProblemParams& pp, const Mesh& m) {
  BuilderConfig cfg = BuilderConfig::defaults(pp, m);
  cfg.C = 1.025;
  cfg.delta_exp = -250.0;
  cfg.margin = 0.125;
  return cfg;
}

double min_interior(const Mesh& m, const Field& f) {
  double s = INFINITY;
  for (Eigen::Index k : m.interior_nodes()) s = std::min(s, f[k]);
  return s;
}

}  // namespace

TEST_CASE("builder config validation") {
  const Mesh m = build_interval(0.0, 1.0, 65);
  const ProblemParams pp = params(2.0, 1.0);
  BuilderConfig cfg = BuilderConfig::defaults(pp, m);
  CHECK_NOTHROW(cfg.validate(pp));
  CHECK(cfg.theta1 == doctest::Approx(-0.25));
  CHECK(cfg.delta_exp == doctest::Approx(-8.0));

  BuilderConfig bad = cfg;
  bad.theta1 = -0.75;  // outside (alpha1, 0)
  CHECK_THROWS_AS(bad.validate(pp), Error);
  bad = cfg;
  bad.theta2 = 0.1;
  CHECK_THROWS_AS(bad.validate(pp), Error);
  bad = cfg;
  bad.delta_exp = -3.0;  // must be below 1/theta = -4
  CHECK_THROWS_AS(bad.validate(pp), Error);
  bad = cfg;
  bad.C = 1.0;
  CHECK_THROWS_AS(bad.validate(pp), Error);
  try {
    bad.validate(pp);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidConfig);
  }
}

TEST_CASE("subsolution without a strip is a multiple of y1") {
  for (double p : {2.0, 3.0}) {
    const Mesh m = build_interval(0.0, 1.0, 129);
    const ProblemParams pp = params(p, 1.0);
    BuilderConfig cfg = BuilderConfig::defaults(pp, m);
    cfg.delta_strip = 0.25 * m.spacing(0);  // no interior node that close
    cfg.C = 3.0;
    const auto [u, v] = build_subsolution(m, pp, cfg);
    const Field y1 = solve_autonomous_singular(m, p, pp.alpha1, 1.0);
    const double k = std::pow(cfg.C, 1.0 / (p - 1.0));
    CHECK(sup_norm(m, u - k * y1) <= 1e-7 * sup_norm(m, u));
  }
}

TEST_CASE("p = 2 subsolution matches a dense solve of the signed load") {
  const Mesh m = build_interval(0.0, 1.0, 257);
  const ProblemParams pp = params(2.0, 1.0);
  BuilderConfig cfg = BuilderConfig::defaults(pp, m);
  cfg.C = 4.0;
  const auto [u, v] = build_subsolution(m, pp, cfg);
  const Field y1 = solve_autonomous_singular(m, 2.0, pp.alpha1, 1.0);
  const Field d = distance_field(m);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m.size());
  for (Eigen::Index k : m.interior_nodes()) {
    const double load = cfg.C * std::pow(y1[k], pp.alpha1);
    g[k] = d[k] < cfg.delta_strip ? -load : load;
  }
  const Eigen::VectorXd ref = oracle::dense_laplace_1d(g, m.spacing(0));
  CHECK(sup_norm(m, u - ref) <= 1e-8 * sup_norm(m, ref));
  CHECK(sup_norm(m, v - ref) <= 1e-8 * sup_norm(m, ref));
}

TEST_CASE("subsolution grows with C") {
  const Mesh m = build_interval(0.0, 1.0, 129);
  for (double p : {2.0, 3.0}) {
    const ProblemParams pp = params(p, 1.0);
    const BarrierBasis b = prepare_basis(m, pp, BuilderConfig::defaults(pp, m));
    Field prev = build_subsolution(b, pp, 1.5).first;
    for (double C : {2.0, 4.0, 8.0}) {
      const Field u = build_subsolution(b, pp, C).first;
      CHECK(min_interior(m, u - prev) > 0.0);
      prev = u;
    }
  }
}

TEST_CASE("a wide strip makes the subsolution negative") {
  const Mesh m = build_interval(0.0, 1.0, 129);
  const ProblemParams pp = params(2.0, 1.0);
  BuilderConfig cfg = BuilderConfig::defaults(pp, m);
  cfg.delta_strip = 0.49;
  try {
    build_subsolution(m, pp, cfg);
    FAIL("expected BarrierFailure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BarrierFailure);
  }
}

TEST_CASE("supersolution agrees with a direct solve at moderate C") {
  // xi(C) solves -Delta_p xi = C^{delta(p-1)} xi^theta; the builder uses the
  // homogeneity xi(C) = C^{delta(p-1)/(p-1-theta)} xi(1) instead of solving.
  const Mesh m = build_interval(0.0, 1.0, 129);
  for (double p : {2.0, 3.0}) {
    const ProblemParams pp = params(p, 1.0);
    BuilderConfig cfg = BuilderConfig::defaults(pp, m);
    cfg.delta_exp = -5.0;
    const Mesh dil = dilate(m, cfg.margin);
    for (double C : {2.0, 16.0}) {
      cfg.C = C;
      const SuperBarrier s = build_supersolution(m, dil, pp, cfg);
      const Field direct = solve_autonomous_singular(dil, p, cfg.theta1, std::pow(C, cfg.delta_exp * (p - 1.0)));
      // Equal up to the gradient regularisation, which is not scale invariant.
      CHECK(sup_norm(dil, s.xi1 - direct) <= 1e-5 * sup_norm(dil, s.xi1));
      const Field up = std::pow(C, -cfg.delta_exp) * restrict_to(m, dil, s.xi1);
      CHECK(sup_norm(m, s.u_high - up) <= 1e-12 * sup_norm(m, up));
      for (Eigen::Index node = 0; node < m.size(); ++node) CHECK(s.u_high[node] > 0.0);
      CHECK(min_interior(m, s.v_high) > 0.0);
    }
  }
}

TEST_CASE("supersolution scale outside the double range is refused") {
  const Mesh m = build_interval(0.0, 1.0, 65);
  const ProblemParams pp = params(2.0, 1.0);
  BuilderConfig cfg = BuilderConfig::defaults(pp, m);
  cfg.delta_exp = -250.0;
  cfg.C = 8.0;  // xi carries the factor 8^{-200}
  const Mesh dil = dilate(m, cfg.margin);
  try {
    build_supersolution(m, dil, pp, cfg);
    FAIL("expected BarrierFailure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BarrierFailure);
  }
  cfg.C = 1.5;
  const SuperBarrier s = build_supersolution(m, dil, pp, cfg);
  CHECK(std::isfinite(s.u_high.maxCoeff()));
  CHECK(min_interior(m, s.u_high) > 0.0);
}

TEST_CASE("supersolution matches the shooting oracle") {
  const Mesh m = build_interval(0.0, 1.0, 129);
  const ProblemParams pp = params(2.0, 1.0);
  BuilderConfig cfg = BuilderConfig::defaults(pp, m);
  cfg.C = 16.0;
  cfg.delta_exp = -5.0;
  const Mesh dil = dilate(m, cfg.margin);
  const double L = dil.upper(0) - dil.lower(0);
  CHECK(L == doctest::Approx(1.5));
  const SuperBarrier s = build_supersolution(m, dil, pp, cfg);

  const double c = std::pow(cfg.C, cfg.delta_exp);
  auto f = [&](double y) { return c * std::pow(y, cfg.theta1); };
  const auto traj = oracle::symmetric_solution(2.0, L, f, 0.0, 1.0, 2e-5);
  const double up = std::pow(cfg.C, -cfg.delta_exp);
  double err = 0.0, scale = 0.0;
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    const double ref = up * oracle::sample(traj, std::abs(m.coord(k, 0) - 0.5));
    err = std::max(err, std::abs(s.u_high[k] - ref));
    scale = std::max(scale, ref);
  }
  CHECK(err <= 1e-3 * scale);
}

TEST_CASE("strip conditions hold for lambda = 0") {
  // In the strip the subsolution has a negative load while the right-hand
  // side is positive, whatever C is.
  const Mesh m = build_interval(0.0, 1.0, 129);
  const ProblemParams pp = params(2.0, 0.0);
  const BarrierBasis b = prepare_basis(m, pp, BuilderConfig::defaults(pp, m));
  for (double C : {2.0, 64.0, 4096.0}) {
    BuilderConfig cfg = BuilderConfig::defaults(pp, m);
    cfg.C = C;
    const BarrierSet bs = build_barriers(b, pp, cfg);
    for (const char* name : {"sub_strip_first", "sub_strip_second"}) {
      const CheckEntry* e = bs.sub_report.find(name);
      REQUIRE(e != nullptr);
      CHECK(e->checked > 0);
      CHECK(e->passed());
    }
  }
}

TEST_CASE("off-strip condition fails for lambda = 1 at the default C") {
  const Mesh m = build_interval(0.0, 1.0, 129);
  const ProblemParams pp = params(2.0, 1.0);
  const BarrierBasis b = prepare_basis(m, pp, BuilderConfig::defaults(pp, m));
  BuilderConfig cfg = BuilderConfig::defaults(pp, m);
  cfg.C = 2.0;
  const BarrierSet bs = build_barriers(b, pp, cfg);
  const CheckEntry* e = bs.sub_report.find("sub_interior_first");
  REQUIRE(e != nullptr);
  CHECK_FALSE(e->passed());
  // The worst node sits just off the strip, where y1 is small.
  CHECK(distance_field(m)[e->worst_node] < 0.2);
  CHECK_FALSE(bs.sub_report.passed());
}

TEST_CASE("auto-tune succeeds for lambda = 1 and is idempotent") {
  for (double p : {2.0, 3.0}) {
    const Mesh m = build_interval(0.0, 1.0, 129);
    const ProblemParams pp = params(p, 1.0);
    const BuilderConfig cfg = tuned_config(pp, m);
    const BarrierSet bs = auto_tune_C(m, pp, cfg);
    CHECK(bs.sub_report.passed());
    CHECK(bs.super_report.passed());
    CHECK(bs.order_report.passed());
    REQUIRE_FALSE(bs.history.empty());
    CHECK(bs.history.back().passed);
    CHECK(bs.history.back().C == bs.config.C);
    CHECK(min_interior(m, bs.u_high - bs.u_low) >= 0.0);
    CHECK(min_interior(m, bs.v_high - bs.v_low) >= 0.0);
    CHECK(min_interior(m, bs.u_low) > 0.0);

    BuilderConfig again = cfg;
    again.C = bs.config.C;
    const BarrierSet bs2 = auto_tune_C(m, pp, again);
    CHECK(bs2.history.size() == 1);
    CHECK(bs2.config.C == bs.config.C);

    // Diagnostic sandwiches are reported.
    const CheckEntry* lo = bs.sub_report.find("sub_eigen_sandwich_u_lower");
    REQUIRE(lo != nullptr);
    CHECK(lo->diagnostic);
  }
}

TEST_CASE("auto-tune fails for lambda = 0 with a history") {
  const Mesh m = build_interval(0.0, 1.0, 65);
  const ProblemParams pp = params(2.0, 0.0);
  BuilderConfig cfg = BuilderConfig::defaults(pp, m);
  cfg.C_cap = 64.0;
  try {
    auto_tune_C(m, pp, cfg);
    FAIL("expected TuningFailure");
  } catch (const TuningFailure& e) {
    CHECK(e.kind() == ErrorKind::TuningFailure);
    CHECK(e.history().size() >= 5);  // 2, 4, ..., 64
    for (const auto& step : e.history()) CHECK_FALSE(step.passed);
    CHECK_FALSE(e.last_report().passed());
  }
}

TEST_CASE("square domain barriers") {
  // The node next to a corner has two boundary neighbours, so a negative
  // strip load there drives u_low below zero for any C; without a strip the
  // barriers are positive and symmetric.
  const Mesh m = build_box(0, 1, 0, 1, 65, 65);
  const ProblemParams pp = params(2.0, 1.0);
  BuilderConfig cfg = BuilderConfig::defaults(pp, m);
  cfg.C = 4.0;
  cfg.delta_strip = 0.02;
  CHECK_THROWS_AS(build_subsolution(m, pp, cfg), Error);

  cfg.delta_strip = 0.01;
  const BarrierBasis b = prepare_basis(m, pp, cfg);
  CHECK(b.strip.count() == 0);
  const BarrierSet bs = build_barriers(b, pp, cfg);
  CHECK(min_interior(m, bs.u_low) > 0.0);
  CHECK(min_interior(m, bs.u_high) > 0.0);
  double asym = 0.0;
  for (Eigen::Index j = 0; j < 65; ++j)
    for (Eigen::Index i = 0; i < 65; ++i)
      asym = std::max(asym, std::abs(bs.u_low[m.index(i, j)] - bs.u_low[m.index(j, i)]));
  CHECK(asym <= 1e-9 * sup_norm(m, bs.u_low));
}
