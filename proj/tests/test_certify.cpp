#include <doctest.h>

#include "singsys/certify.hpp"
#include "singsys/io.hpp"
#include "singsys/system.hpp"

using namespace singsys;

namespace {

const ProblemParams kSym = ProblemParams::make(2, 2, -0.5, 1.5, 1.5, -0.5, 1.0);

BarrierSet tuned(const Mesh& m, const ProblemParams& pp) {
  BuilderConfig cfg = BuilderConfig::defaults(pp, m);
  cfg.C = 1.025;
  cfg.delta_exp = -250.0;
  cfg.margin = 0.125;
  return auto_tune_C(m, pp, cfg);
}

struct Solved {
  Mesh mesh;
  BarrierSet bs;
  SystemSolution sol;
};

Solved solve(Eigen::Index n, const ProblemParams& pp = kSym) {
  Solved s{build_interval(0.0, 1.0, n), {}, {}};
  s.bs = tuned(s.mesh, pp);
  s.sol = solve_system(s.bs, pp);
  return s;
}

}  // namespace

TEST_CASE("weighted boundary integral") {
  // Integral of d^{-1/2} d over (0,1) is (4/3) 2^{-3/2}.
  const Mesh m = build_interval(0.0, 1.0, 513);
  const Field d = distance_field(m);
  const double exact = 4.0 / 3.0 * std::pow(0.5, 1.5);
  CHECK(hardy_integral(m, d, -0.5) == doctest::Approx(exact).epsilon(0.01));
  CHECK(hardy_integral(m, Field::Zero(m.size()), -0.5) == 0.0);
  CHECK(hardy_integral(m, 2.0 * d, -0.5) > hardy_integral(m, d, -0.5));
  CHECK_THROWS_AS(hardy_integral(m, d, 0.0), Error);
  CHECK_THROWS_AS(hardy_integral(m, d, -1.0), Error);
}

TEST_CASE("boundary ratios of the torsion function tend to 1/2") {
  const Mesh m = build_interval(0.0, 1.0, 1025);
  Field u = Field::Zero(m.size());
  for (Eigen::Index k : m.interior_nodes()) {
    const double x = m.coord(k, 0);
    u[k] = x * (1 - x) / 2;
  }
  const auto [lo, hi] = boundary_ratios(m, u, 0.1);
  CHECK(hi == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(lo == doctest::Approx(0.45).epsilon(1e-2));
}

TEST_CASE("gradient increment of linear and kinked fields") {
  const Mesh m = build_interval(0.0, 1.0, 33);
  Field lin(m.size());
  for (Eigen::Index k = 0; k < m.size(); ++k) lin[k] = 3.0 * m.coord(k, 0);
  CHECK(gradient_increment(m, lin) == doctest::Approx(0.0).epsilon(1e-12));
  Field tent(m.size());
  for (Eigen::Index k = 0; k < m.size(); ++k) tent[k] = 0.5 - std::abs(m.coord(k, 0) - 0.5);
  CHECK(gradient_increment(m, tent) == doctest::Approx(2.0));
}

TEST_CASE("certificate of the symmetric lambda = 1 solution") {
  const Solved s = solve(129);
  const Certificate c = certify_solution(s.sol.u, s.sol.v, s.bs, kSym);
  CHECK(c.passed());
  for (const auto& [name, ok] : c.passes) CHECK_MESSAGE(ok, name);
  CHECK(c.residual_u == c.residual_v);
  CHECK(c.hardy_u == c.hardy_v);
  CHECK(c.r_low_u == c.r_low_v);
  CHECK(c.min_u > 0.0);
  CHECK(c.sandwich_margin >= 0.0);
  CHECK(c.r_low_u > 0.0);
  CHECK(c.r_high_u < 1e3);
  CHECK_FALSE(c.gamma_hat.has_value());

  const Field f = eval_rhs(s.mesh, kSym, Equation::First, s.sol.u, s.sol.v);
  CHECK(c.residual_u == residual_sup(s.mesh, 2.0, s.sol.u, f));

  // Same inputs, same bytes.
  const Certificate again = certify_solution(s.sol.u, s.sol.v, s.bs, kSym);
  CHECK(dump_json(to_json(c)) == dump_json(to_json(again)));
}

TEST_CASE("certificate rejects a perturbed solution") {
  const Solved s = solve(65);
  Field u = s.sol.u;
  u[s.mesh.size() / 2] *= 1.01;
  const Certificate c = certify_solution(u, s.sol.v, s.bs, kSym);
  CHECK_FALSE(c.passes.at("residual_u"));
  CHECK_FALSE(c.passed());
  Field neg = s.sol.u;
  neg[3] = -1e-3;
  const Certificate n = certify_solution(neg, s.sol.v, s.bs, kSym);
  CHECK_FALSE(n.passes.at("min_u"));
  CHECK(std::isinf(n.residual_u));
}

TEST_CASE("refinement: Hoelder proxy and weighted integral are stable") {
  std::vector<std::pair<Mesh, Field>> levels;
  std::vector<double> hardy;
  for (Eigen::Index n : {65, 129, 257, 513}) {
    const Solved s = solve(n);
    levels.emplace_back(s.mesh, s.sol.u);
    hardy.push_back(hardy_integral(s.mesh, s.sol.u, kSym.alpha1));
  }
  const double g1 = holder_exponent_estimate({levels[0], levels[1]});
  const double g2 = holder_exponent_estimate({levels[1], levels[2]});
  const double g3 = holder_exponent_estimate({levels[2], levels[3]});
  CHECK(std::abs(g1 - g2) <= 0.1);
  CHECK(std::abs(g2 - g3) <= 0.1);
  // Near the boundary u'' ~ d^alpha1, so increments scale like h^{1 + alpha1}.
  CHECK(g3 == doctest::Approx(1.0 + kSym.alpha1).epsilon(0.2));
  CHECK(std::abs(hardy[3] - hardy[2]) <= 0.05 * hardy[3]);
  CHECK_THROWS_AS(holder_exponent_estimate({levels[0]}), Error);
}
