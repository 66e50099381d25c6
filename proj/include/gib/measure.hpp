#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include "gib/errors.hpp"
#include "gib/tolerances.hpp"

namespace gib {

/// Correlation measure used for both terms of the bottleneck objective.
class Measure {
 public:
  enum class Kind { shannon, renyi, jeffreys };

  static Measure shannon() { return Measure(Kind::shannon, 1.0); }
  static Measure jeffreys() { return Measure(Kind::jeffreys, 0.0); }

  /// Rényi order q in [0, 2]; the solver's guarantees do not extend past 2.
  static Measure renyi(double q) {
    require(std::isfinite(q) && q >= 0.0 && q <= 2.0, ErrorKind::OutOfRange,
            "Renyi order q must lie in [0, 2], got " + show(q));
    return Measure(Kind::renyi, q);
  }

  Kind kind() const { return kind_; }
  double q() const { return q_; }

  /// True for the Shannon measure and for Rényi orders within tol::q_one of 1.
  bool is_shannon() const {
    return kind_ == Kind::shannon || (kind_ == Kind::renyi && std::abs(q_ - 1.0) < tol::q_one);
  }
  bool is_renyi() const { return kind_ == Kind::renyi; }
  bool is_jeffreys() const { return kind_ == Kind::jeffreys; }

  /// Short label: "shannon", "jeffreys" or "renyi:<q>".
  std::string label() const {
    switch (kind_) {
      case Kind::shannon: return "shannon";
      case Kind::jeffreys: return "jeffreys";
      case Kind::renyi: {
        char buf[48];
        std::snprintf(buf, sizeof buf, "renyi:%.12g", q_);
        return buf;
      }
    }
    return "unknown";
  }

  friend bool operator==(const Measure&, const Measure&) = default;

 private:
  Measure(Kind kind, double q) : kind_(kind), q_(q) {}

  Kind kind_;
  double q_;
};

}  // namespace gib
