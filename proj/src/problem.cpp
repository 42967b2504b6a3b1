#include "singsys/problem.hpp"

#include <cmath>
#include <sstream>

#include "singsys/errors.hpp"

namespace singsys {

ProblemParams ProblemParams::make(double p, double q, double alpha1, double alpha2, double beta1,
                                  double beta2, double lambda) {
  ProblemParams pp{p, q, alpha1, alpha2, beta1, beta2, lambda};
  pp.validate();
  return pp;
}

bool ProblemParams::satisfies_h1() const {
  return alpha1 > -1.0 && alpha1 < 0.0 && beta2 > -1.0 && beta2 < 0.0;
}

bool ProblemParams::satisfies_h2() const { return alpha2 > q - 1.0 && beta1 > p - 1.0; }

void ProblemParams::validate() const {
  for (double v : {p, q, alpha1, alpha2, beta1, beta2, lambda})
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidParameter, "problem parameters must be finite");
  if (!(p > 1.0) || !(q > 1.0))
    throw Error(ErrorKind::InvalidExponent, "operator exponents must satisfy p, q > 1");
  if (!satisfies_h1()) {
    std::ostringstream os;
    os << "hypothesis (h1) violated: requires -1 < alpha1, beta2 < 0 (alpha1 = " << alpha1
       << ", beta2 = " << beta2 << ")";
    throw Error(ErrorKind::HypothesisViolation, os.str());
  }
  if (!satisfies_h2()) {
    std::ostringstream os;
    os << "hypothesis (h2) violated: requires alpha2 > q-1 and beta1 > p-1 (alpha2 = " << alpha2
       << ", q = " << q << ", beta1 = " << beta1 << ", p = " << p << ")";
    throw Error(ErrorKind::HypothesisViolation, os.str());
  }
}

std::string describe(const ProblemParams& pp) {
  std::ostringstream os;
  os << "p=" << pp.p << " q=" << pp.q << " alpha1=" << pp.alpha1 << " alpha2=" << pp.alpha2
     << " beta1=" << pp.beta1 << " beta2=" << pp.beta2 << " lambda=" << pp.lambda;
  return os.str();
}

}  // namespace singsys
