#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mdopt {

// Step-size sequence alpha_t for t >= 1.
struct StepSchedule {
  enum class Kind { constant, inv_t, inv_sqrt_t };

  Kind kind = Kind::constant;
  double scale = 1.0;

  double at(std::int64_t t) const {
    if (t < 1) throw std::invalid_argument("StepSchedule: step index must be >= 1");
    if (!(scale > 0.0)) throw std::invalid_argument("StepSchedule: scale must be positive");
    switch (kind) {
      case Kind::constant: return scale;
      case Kind::inv_t: return scale / static_cast<double>(t);
      case Kind::inv_sqrt_t: return scale / std::sqrt(static_cast<double>(t));
    }
    return scale;
  }

  std::string name() const {
    switch (kind) {
      case Kind::constant: return "constant";
      case Kind::inv_t: return "inv_t";
      case Kind::inv_sqrt_t: return "inv_sqrt_t";
    }
    return "constant";
  }

  static std::optional<Kind> parse_kind(std::string_view s) {
    if (s == "constant") return Kind::constant;
    if (s == "inv_t") return Kind::inv_t;
    if (s == "inv_sqrt_t") return Kind::inv_sqrt_t;
    return std::nullopt;
  }

  friend bool operator==(const StepSchedule&, const StepSchedule&) = default;
};

}  // namespace mdopt
