#include "mdopt/conjugate_pair.hpp"

#include <algorithm>
#include <cmath>

#include "mdopt/vec.hpp"

namespace mdopt {

DiagMetric::DiagMetric(std::vector<double> diag) : diag_(std::move(diag)) {
  for (double d : diag_)
    if (!(std::isfinite(d) && d > 0.0))
      throw std::invalid_argument("DiagMetric: diagonal entries must be finite and positive");
}

std::vector<double> DiagMetric::apply(std::span<const double> x) const {
  std::vector<double> out(diag_.size());
  for (std::size_t i = 0; i < diag_.size(); ++i) out[i] = diag_[i] * x[i];
  return out;
}

std::vector<double> DiagMetric::solve(std::span<const double> rhs) const {
  std::vector<double> out(diag_.size());
  for (std::size_t i = 0; i < diag_.size(); ++i) out[i] = rhs[i] / diag_[i];
  return out;
}

double DiagMetric::condition_estimate() const {
  double lo = diag_[0], hi = diag_[0];
  for (double d : diag_) {
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return hi / lo;
}

namespace {

Region make_region(const std::vector<ScalarConjugate>& coords, bool dual) {
  std::vector<Interval> iv;
  iv.reserve(coords.size());
  for (const ScalarConjugate& c : coords) iv.push_back(dual ? c.dual() : c.primal());
  return Region(std::move(iv));
}

}  // namespace

ConjugatePair::ConjugatePair(std::vector<ScalarConjugate> coords)
    : coords_(std::move(coords)),
      primal_(make_region(coords_, false)),
      dual_(make_region(coords_, true)) {
  if (coords_.empty()) throw std::invalid_argument("ConjugatePair: dimension must be positive");
}

ConjugatePair ConjugatePair::uniform(ScalarKind kind, int dim) {
  if (dim < 1) throw std::invalid_argument("ConjugatePair: dimension must be positive");
  std::vector<ScalarConjugate> coords(static_cast<std::size_t>(dim), ScalarConjugate{kind});
  return ConjugatePair(std::move(coords));
}

ConjugatePair ConjugatePair::conjugate() const {
  std::vector<ScalarConjugate> coords;
  coords.reserve(coords_.size());
  for (const ScalarConjugate& c : coords_) coords.push_back(ScalarConjugate{conjugate_kind(c.kind)});
  return ConjugatePair(std::move(coords));
}

double ConjugatePair::G(std::span<const double> theta) const {
  primal_.require(theta, "theta");
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) s += coords_[static_cast<std::size_t>(i)].G(theta[static_cast<std::size_t>(i)]);
  return s;
}

double ConjugatePair::H(std::span<const double> mu) const {
  dual_.require(mu, "mu");
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) s += coords_[static_cast<std::size_t>(i)].H(mu[static_cast<std::size_t>(i)]);
  return s;
}

double ConjugatePair::H_closure(std::span<const double> y) const {
  if (y.size() != static_cast<std::size_t>(dim()))
    throw std::invalid_argument("y: expected " + std::to_string(dim()) + " coordinates");
  for (int i = 0; i < dim(); ++i) {
    std::size_t k = static_cast<std::size_t>(i);
    if (!std::isfinite(y[k]) || !dual_.coord(i).contains_closure(y[k]))
      throw DomainViolation("y[" + std::to_string(i) + "] outside the closed dual domain " +
                                interval_string(dual_.coord(i)),
                            i, y[k]);
  }
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) s += coords_[static_cast<std::size_t>(i)].H(y[static_cast<std::size_t>(i)]);
  return s;
}

std::vector<double> ConjugatePair::g(std::span<const double> theta) const {
  primal_.require(theta, "theta");
  std::vector<double> out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) out[i] = coords_[i].g(theta[i]);
  return out;
}

std::vector<double> ConjugatePair::h(std::span<const double> mu) const {
  dual_.require(mu, "mu");
  std::vector<double> out(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) out[i] = coords_[i].h(mu[i]);
  return out;
}

DiagMetric ConjugatePair::hess_G(std::span<const double> theta) const {
  primal_.require(theta, "theta");
  std::vector<double> d(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) d[i] = coords_[i].ddG(theta[i]);
  return DiagMetric(std::move(d));
}

DiagMetric ConjugatePair::hess_H(std::span<const double> mu) const {
  dual_.require(mu, "mu");
  std::vector<double> d(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) d[i] = coords_[i].ddH(mu[i]);
  return DiagMetric(std::move(d));
}

double bregman_primal(const ConjugatePair& pair, std::span<const double> theta,
                      std::span<const double> theta_ref) {
  pair.primal_domain().require(theta, "theta");
  pair.primal_domain().require(theta_ref, "theta_ref");
  double s = 0.0;
  for (int i = 0; i < pair.dim(); ++i) {
    const ScalarConjugate& c = pair.coord(i);
    std::size_t k = static_cast<std::size_t>(i);
    s += c.G(theta[k]) - c.G(theta_ref[k]) - c.g(theta_ref[k]) * (theta[k] - theta_ref[k]);
  }
  return s;
}

double bregman_dual(const ConjugatePair& pair, std::span<const double> mu,
                    std::span<const double> mu_ref) {
  pair.dual_domain().require(mu, "mu");
  pair.dual_domain().require(mu_ref, "mu_ref");
  double s = 0.0;
  for (int i = 0; i < pair.dim(); ++i) {
    const ScalarConjugate& c = pair.coord(i);
    std::size_t k = static_cast<std::size_t>(i);
    s += c.H(mu[k]) - c.H(mu_ref[k]) - c.h(mu_ref[k]) * (mu[k] - mu_ref[k]);
  }
  return s;
}

double duality_gap(const ConjugatePair& pair, std::span<const double> theta,
                   std::span<const double> theta_ref) {
  std::vector<double> mu = pair.g(theta);
  std::vector<double> mu_ref = pair.g(theta_ref);
  return bregman_primal(pair, theta, theta_ref) - bregman_dual(pair, mu_ref, mu);
}

DiagMetric metric_primal(const ConjugatePair& pair, std::span<const double> theta) {
  return pair.hess_G(theta);
}

DiagMetric metric_dual(const ConjugatePair& pair, std::span<const double> mu) {
  return pair.hess_H(mu);
}

namespace {

// Step a point toward a (possibly infinite) bound without crossing it.
double advance_toward(double x, double bound, double step) {
  if (std::isinf(bound)) return x + step;
  return 0.5 * (x + bound);
}

}  // namespace

ScalarConjugateSolve numeric_conjugate_scalar(const std::function<double(double)>& G,
                                              const std::function<double(double)>& g,
                                              const Interval& domain, double mu,
                                              double residual_tol, int max_iter) {
  if (!std::isfinite(mu)) throw DomainViolation("numeric_conjugate: mu must be finite", 0, mu);

  // Starting point strictly inside the domain.
  double x0 = 0.0;
  if (!domain.contains(x0)) {
    if (std::isfinite(domain.lo) && std::isfinite(domain.hi))
      x0 = 0.5 * (domain.lo + domain.hi);
    else if (std::isfinite(domain.lo))
      x0 = domain.lo + 1.0;
    else
      x0 = domain.hi - 1.0;
  }

  // g is strictly increasing; grow a bracket [a, b] with g(a) <= mu <= g(b).
  double a = x0, b = x0;
  double fa = g(a) - mu, fb = fa;
  double step = 1.0;
  for (int i = 0; i < 200 && fa > 0.0; ++i) {
    a = advance_toward(a, domain.lo, -step);
    fa = g(a) - mu;
    step *= 2.0;
  }
  step = 1.0;
  for (int i = 0; i < 200 && fb < 0.0; ++i) {
    b = advance_toward(b, domain.hi, step);
    fb = g(b) - mu;
    step *= 2.0;
  }
  if (fa > 0.0 || fb < 0.0)
    throw DomainViolation("numeric_conjugate: mu outside the image of g", 0, mu);

  // Illinois-modified regula falsi on g(x) = mu; the stale-endpoint halving
  // prevents the one-sided stalls plain regula falsi is prone to.
  ScalarConjugateSolve out;
  double x = 0.5 * (a + b), fx = g(x) - mu;
  int side = 0;
  for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
    if (std::abs(fx) <= residual_tol) break;
    if (fx > 0.0) {
      b = x;
      fb = fx;
      if (side == 1) fa *= 0.5;
      side = 1;
    } else {
      a = x;
      fa = fx;
      if (side == -1) fb *= 0.5;
      side = -1;
    }
    double secant = (fb != fa) ? (a * fb - b * fa) / (fb - fa) : 0.5 * (a + b);
    x = (std::isfinite(secant) && secant > a && secant < b) ? secant : 0.5 * (a + b);
    fx = g(x) - mu;
  }
  if (std::abs(fx) > residual_tol)
    throw ConvergenceFailure("numeric_conjugate: no convergence after iteration cap, residual = " +
                                 std::to_string(std::abs(fx)),
                             std::abs(fx));
  out.argmax = x;
  out.residual = std::abs(fx);
  out.value = x * mu - G(x);
  return out;
}

ConjugateSolve numeric_conjugate(const ConjugatePair& pair, std::span<const double> mu,
                                 double residual_tol, int max_iter) {
  ConjugateSolve out;
  out.argmax.resize(mu.size());
  for (int i = 0; i < pair.dim(); ++i) {
    const ScalarConjugate& c = pair.coord(i);
    auto s = numeric_conjugate_scalar([&c](double t) { return c.G(t); },
                                      [&c](double t) { return c.g(t); }, c.primal(),
                                      mu[static_cast<std::size_t>(i)], residual_tol, max_iter);
    out.value += s.value;
    out.argmax[static_cast<std::size_t>(i)] = s.argmax;
    out.residual = std::max(out.residual, s.residual);
    out.iterations = std::max(out.iterations, s.iterations);
  }
  return out;
}

}  // namespace mdopt
