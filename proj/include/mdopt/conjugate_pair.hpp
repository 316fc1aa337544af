// Convex-conjugate pairs, Bregman divergences and the induced metric tensors.
#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdopt/region.hpp"
#include "mdopt/scalar_conjugate.hpp"

namespace mdopt {

// Diagonal symmetric positive-definite matrix. The catalog builds
// multivariate geometry as independent products of scalar families, so every
// Hessian here is diagonal; "inversion" is an elementwise solve and never an
// explicit inverse.
class DiagMetric {
 public:
  explicit DiagMetric(std::vector<double> diag);

  int dim() const { return static_cast<int>(diag_.size()); }
  const std::vector<double>& diag() const { return diag_; }
  double entry(int i, int j) const { return i == j ? diag_[static_cast<std::size_t>(i)] : 0.0; }

  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> solve(std::span<const double> rhs) const;

  // max/min of the diagonal; exact for diagonal matrices.
  double condition_estimate() const;

 private:
  std::vector<double> diag_;
};

// A strictly convex separable G together with its conjugate H, the gradient
// maps g = dG and h = dH (mutually inverse), their Hessians, and the open
// primal/dual coordinate boxes. Immutable after construction; all member
// operations are pure and safe to call concurrently.
class ConjugatePair {
 public:
  explicit ConjugatePair(std::vector<ScalarConjugate> coords);

  static ConjugatePair uniform(ScalarKind kind, int dim);

  int dim() const { return static_cast<int>(coords_.size()); }
  const ScalarConjugate& coord(int i) const { return coords_[static_cast<std::size_t>(i)]; }
  const Region& primal_domain() const { return primal_; }
  const Region& dual_domain() const { return dual_; }

  // The same geometry with the primal and dual roles swapped coordinatewise.
  ConjugatePair conjugate() const;

  double G(std::span<const double> theta) const;
  double H(std::span<const double> mu) const;
  // H extended by continuity to the closed dual box (boundary observations).
  double H_closure(std::span<const double> y) const;

  std::vector<double> g(std::span<const double> theta) const;
  std::vector<double> h(std::span<const double> mu) const;

  DiagMetric hess_G(std::span<const double> theta) const;
  DiagMetric hess_H(std::span<const double> mu) const;

 private:
  std::vector<ScalarConjugate> coords_;
  Region primal_;
  Region dual_;
};

// B_G(theta, theta_ref) = G(theta) - G(theta_ref) - <g(theta_ref), theta - theta_ref>.
// Nonnegative, zero iff the points coincide. Both points must be strictly
// inside the primal domain.
double bregman_primal(const ConjugatePair& pair, std::span<const double> theta,
                      std::span<const double> theta_ref);

// The dual divergence B_H on the mean coordinates.
double bregman_dual(const ConjugatePair& pair, std::span<const double> mu,
                    std::span<const double> mu_ref);

// B_G(theta, theta_ref) - B_H(g(theta_ref), g(theta)); zero in exact
// arithmetic, rounding-sized in practice.
double duality_gap(const ConjugatePair& pair, std::span<const double> theta,
                   std::span<const double> theta_ref);

DiagMetric metric_primal(const ConjugatePair& pair, std::span<const double> theta);
DiagMetric metric_dual(const ConjugatePair& pair, std::span<const double> mu);

class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

struct ScalarConjugateSolve {
  double value = 0.0;
  double argmax = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

struct ConjugateSolve {
  double value = 0.0;
  std::vector<double> argmax;
  double residual = 0.0;
  int iterations = 0;
};

// Evaluates sup_t { t*mu - G(t) } for one scalar coordinate given only G and
// its derivative g, by bracketing and safeguarded root-finding on g(t) = mu
// (regula falsi with bisection fallback) until |g(t) - mu| <= residual_tol.
// Serves as the independent check of the closed-form H implementations.
// Throws DomainViolation when mu is outside the image of g, and
// ConvergenceFailure (carrying the residual) when the iteration cap is hit.
ScalarConjugateSolve numeric_conjugate_scalar(const std::function<double(double)>& G,
                                              const std::function<double(double)>& g,
                                              const Interval& domain, double mu,
                                              double residual_tol = 1e-10, int max_iter = 200);

// Separable version over a pair's coordinates; touches only the G side.
ConjugateSolve numeric_conjugate(const ConjugatePair& pair, std::span<const double> mu,
                                 double residual_tol = 1e-10, int max_iter = 200);

}  // namespace mdopt
