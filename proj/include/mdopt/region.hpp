// Open-box domain descriptors shared by the conjugate-pair catalog.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mdopt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// A point left the open domain it is required to stay inside.
class DomainViolation : public std::runtime_error {
 public:
  DomainViolation(const std::string& what, int coordinate, double value)
      : std::runtime_error(what), coordinate(coordinate), value(value) {}

  int coordinate;
  double value;
};

// Open interval (lo, hi). Endpoints may be infinite; membership is strict
// at finite endpoints.
struct Interval {
  double lo = -kInf;
  double hi = kInf;

  bool contains(double x) const { return x > lo && x < hi; }
  bool contains_closure(double x) const { return x >= lo && x <= hi; }
};

inline std::string interval_string(const Interval& iv) {
  auto end = [](double v) -> std::string {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
  };
  return "(" + end(iv.lo) + "," + end(iv.hi) + ")";
}

// Per-coordinate open box with strict membership tests.
class Region {
 public:
  Region() = default;

  explicit Region(std::vector<Interval> coords) : coords_(std::move(coords)) {
    for (const Interval& c : coords_)
      if (!(c.lo < c.hi))
        throw std::invalid_argument("Region: interval lower bound must be below upper bound");
  }

  int dim() const { return static_cast<int>(coords_.size()); }
  const Interval& coord(int i) const { return coords_[static_cast<std::size_t>(i)]; }

  // Index of the first coordinate outside the open box, -1 if none.
  // Non-finite values always count as violations.
  int first_violation(std::span<const double> x) const {
    for (std::size_t i = 0; i < coords_.size(); ++i)
      if (!std::isfinite(x[i]) || !coords_[i].contains(x[i])) return static_cast<int>(i);
    return -1;
  }

  bool contains(std::span<const double> x) const {
    return x.size() == coords_.size() && first_violation(x) < 0;
  }

  bool contains_closure(std::span<const double> x) const {
    if (x.size() != coords_.size()) return false;
    for (std::size_t i = 0; i < coords_.size(); ++i)
      if (!std::isfinite(x[i]) || !coords_[i].contains_closure(x[i])) return false;
    return true;
  }

  // Throws DomainViolation naming the offending coordinate.
  void require(std::span<const double> x, const std::string& label) const {
    if (x.size() != coords_.size())
      throw std::invalid_argument(label + ": expected " + std::to_string(coords_.size()) +
                                  " coordinates, got " + std::to_string(x.size()));
    int i = first_violation(x);
    if (i >= 0) {
      char val[40];
      std::snprintf(val, sizeof val, "%.17g", x[i]);
      throw DomainViolation(label + "[" + std::to_string(i) + "] = " + val +
                                " outside open domain " + interval_string(coords_[i]),
                            i, x[i]);
    }
  }

 private:
  std::vector<Interval> coords_;
};

}  // namespace mdopt
