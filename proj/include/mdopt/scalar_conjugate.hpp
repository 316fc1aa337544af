// Closed-form catalog of scalar convex-conjugate coordinate geometries.
#pragma once

#include <cmath>
#include <stdexcept>

#include "mdopt/region.hpp"

namespace mdopt {

// Each kind names the strictly convex scalar G whose gradient links one
// natural coordinate to its mean coordinate:
//
//   half_square     G(t) = t^2/2             self-conjugate (gaussian)
//   exponential     G(t) = exp(t)            poisson, natural side
//   softplus        G(t) = log(1 + exp(t))   bernoulli, natural side
//   neg_entropy     G(m) = m log m - m       conjugate of exponential
//   binary_entropy  G(m) = m log m + (1-m) log(1-m), conjugate of softplus
//
// The last two exist so a pair can be viewed with the primal and dual roles
// swapped (ConjugatePair::conjugate()); the mean-side mirror step is then the
// same code as the natural-side one.
enum class ScalarKind { half_square, exponential, softplus, neg_entropy, binary_entropy };

constexpr ScalarKind conjugate_kind(ScalarKind k) {
  switch (k) {
    case ScalarKind::half_square: return ScalarKind::half_square;
    case ScalarKind::exponential: return ScalarKind::neg_entropy;
    case ScalarKind::neg_entropy: return ScalarKind::exponential;
    case ScalarKind::softplus: return ScalarKind::binary_entropy;
    case ScalarKind::binary_entropy: return ScalarKind::softplus;
  }
  throw std::logic_error("conjugate_kind: bad kind");
}

namespace detail {

inline double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

inline double softplus_fn(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

// x log x extended by continuity to x = 0.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace detail

struct ScalarConjugate {
  ScalarKind kind;

  double G(double t) const {
    switch (kind) {
      case ScalarKind::half_square: return 0.5 * t * t;
      case ScalarKind::exponential: return std::exp(t);
      case ScalarKind::softplus: return detail::softplus_fn(t);
      case ScalarKind::neg_entropy: return detail::xlogx(t) - t;
      case ScalarKind::binary_entropy: return detail::xlogx(t) + detail::xlogx(1.0 - t);
    }
    return 0.0;
  }

  // dG/dt, the scalar mirror map.
  double g(double t) const {
    switch (kind) {
      case ScalarKind::half_square: return t;
      case ScalarKind::exponential: return std::exp(t);
      case ScalarKind::softplus: return detail::logistic(t);
      case ScalarKind::neg_entropy: return std::log(t);
      case ScalarKind::binary_entropy: return std::log(t) - std::log1p(-t);
    }
    return 0.0;
  }

  double ddG(double t) const {
    switch (kind) {
      case ScalarKind::half_square: return 1.0;
      case ScalarKind::exponential: return std::exp(t);
      case ScalarKind::softplus: {
        double s = detail::logistic(t);
        return s * (1.0 - s);
      }
      case ScalarKind::neg_entropy: return 1.0 / t;
      case ScalarKind::binary_entropy: return 1.0 / (t * (1.0 - t));
    }
    return 0.0;
  }

  // Conjugate value H(m); defined on the open dual domain but evaluated with
  // the closure-continuous formula, so the same code serves H and its
  // continuous extension to boundary observations.
  double H(double m) const {
    switch (kind) {
      case ScalarKind::half_square: return 0.5 * m * m;
      case ScalarKind::exponential: return detail::xlogx(m) - m;
      case ScalarKind::softplus: return detail::xlogx(m) + detail::xlogx(1.0 - m);
      case ScalarKind::neg_entropy: return std::exp(m);
      case ScalarKind::binary_entropy: return detail::softplus_fn(m);
    }
    return 0.0;
  }

  // dH/dm, the inverse of g.
  double h(double m) const {
    switch (kind) {
      case ScalarKind::half_square: return m;
      case ScalarKind::exponential: return std::log(m);
      case ScalarKind::softplus: return std::log(m) - std::log1p(-m);
      case ScalarKind::neg_entropy: return std::exp(m);
      case ScalarKind::binary_entropy: return detail::logistic(m);
    }
    return 0.0;
  }

  double ddH(double m) const {
    switch (kind) {
      case ScalarKind::half_square: return 1.0;
      case ScalarKind::exponential: return 1.0 / m;
      case ScalarKind::softplus: return 1.0 / (m * (1.0 - m));
      case ScalarKind::neg_entropy: return std::exp(m);
      case ScalarKind::binary_entropy: {
        double s = detail::logistic(m);
        return s * (1.0 - s);
      }
    }
    return 0.0;
  }

  Interval primal() const {
    switch (kind) {
      case ScalarKind::half_square:
      case ScalarKind::exponential:
      case ScalarKind::softplus: return {};
      case ScalarKind::neg_entropy: return {0.0, kInf};
      case ScalarKind::binary_entropy: return {0.0, 1.0};
    }
    return {};
  }

  Interval dual() const {
    switch (kind) {
      case ScalarKind::half_square: return {};
      case ScalarKind::exponential: return {0.0, kInf};
      case ScalarKind::softplus: return {0.0, 1.0};
      case ScalarKind::neg_entropy:
      case ScalarKind::binary_entropy: return {};
    }
    return {};
  }
};

}  // namespace mdopt
