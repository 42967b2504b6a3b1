#pragma once

#include "singsys/mesh.hpp"
#include "singsys/plap.hpp"

namespace singsys {

/// First Dirichlet eigenpair of -Delta_p, normalized so that ||phi||_p = 1
/// under grid quadrature.
struct EigenPair {
  double p = 2.0;
  double lambda = 0.0;
  Field phi;
  int iterations = 0;
  double residual = 0.0;  // sup |apply_plap(phi) - lambda phi^{p-1}|
};

/// (sum_k h^dim |w_k|^p)^{1/p} over interior nodes.
double lp_norm(const Mesh& m, const Field& w, double p);

/// Face-quadrature Rayleigh quotient <apply_plap(w), w> / ||w||_p^p.
double rayleigh_quotient(const Mesh& m, double p, const Field& w,
                         double eps = SolveOptions{}.epsilon);

double eigen_residual(const Mesh& m, double p, double lambda, const Field& phi,
                      double eps = SolveOptions{}.epsilon);

/// Inverse power iteration started from the normalized torsion function.
/// Stops once lambda changes by at most tol and the residual is at most
/// tol * max(1, lambda sup phi^{p-1}).
EigenPair first_eigenpair(const Mesh& m, double p, double tol, const SolveOptions& opts = {});

/// Grid-extremal constants. Every field satisfies its defining inequality at
/// every node it is taken over, so substituting back is exact.
struct BarrierConstants {
  double l = 0.0;        // min over interior of min(phi_p, phi_q) / d
  double mu = 0.0;       // min of both eigenfunctions outside the strip
  double rho = 0.0;      // min of both dilated eigenfunctions over closed-domain nodes
  double R = 0.0;        // max of both eigenfunctions
  double R_tilde = 0.0;  // max of both dilated eigenfunctions over closed-domain nodes
  double c1 = 0.0, c2 = 0.0;  // c1 phi_p <= y1 <= c2 phi_p
  double c3 = 0.0, c4 = 0.0;  // c3 phi_q <= y2 <= c4 phi_q
  // C^delta c0 phit_p <= xi1 <= C^delta c phit_p, same with primes for xi2.
  // Zero until the supersolution exists.
  double c0 = 0.0, c = 0.0, c0_prime = 0.0, c_prime = 0.0;
};

BarrierConstants extract_constants(const Mesh& m, const Mesh& dilated, const EigenPair& phi_p,
                                   const EigenPair& phi_q, const Field& y1, const Field& y2,
                                   const StripMask& strip, const EigenPair& phit_p,
                                   const EigenPair& phit_q);

/// Fills c0, c, c0', c' from the dilated-domain solutions xi1, xi2.
void extract_xi_constants(BarrierConstants& k, const Mesh& dilated, const EigenPair& phit_p,
                          const EigenPair& phit_q, const Field& xi1, const Field& xi2,
                          double C, double delta_exp);

}  // namespace singsys
