#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "bandit_hjb/key_value.hpp"

namespace bhjb {

/// Normalization applied to cumulative rewards so the rescaled value function
/// has a non-trivial limit. sqrt_n gives a stochastic (diffusive) limit,
/// linear_n a deterministic one; other powers degenerate for the supported
/// families.
struct ScalingFactor {
  enum class Family { sqrt_n, linear_n };
  Family family = Family::sqrt_n;

  double operator()(double n) const {
    return family == Family::sqrt_n ? std::sqrt(n) : n;
  }
  const char* name() const { return family == Family::sqrt_n ? "sqrt" : "linear"; }

  static ScalingFactor sqrt_n() { return {Family::sqrt_n}; }
  static ScalingFactor linear_n() { return {Family::linear_n}; }
  static ScalingFactor from_name(const std::string& name);
};

/// A scalar sequence of the horizon n. Model spec files describe prior
/// sequences as coefficients of n-powers; arbitrary callables are accepted
/// programmatically.
using Sequence = std::function<double(double)>;

/// c_n*n + c_sqrt*sqrt(n) + c_const + c_inv_sqrt/sqrt(n) + c_inv_n/n.
struct PowerSeq {
  double c_n = 0.0;
  double c_sqrt = 0.0;
  double c_const = 0.0;
  double c_inv_sqrt = 0.0;
  double c_inv_n = 0.0;

  double operator()(double n) const {
    const double r = std::sqrt(n);
    return c_n * n + c_sqrt * r + c_const + c_inv_sqrt / r + c_inv_n / n;
  }

  static PowerSeq constant(double c) { return {0.0, 0.0, c, 0.0, 0.0}; }

  /// Read `prefix` (plain value => constant term) and `prefix.c_*` keys.
  /// Returns the fallback (zero by default) when none of them are present.
  static PowerSeq from_keyvalues(const KeyValueMap& kv, const std::string& prefix);
  static PowerSeq from_keyvalues(const KeyValueMap& kv, const std::string& prefix,
                                 PowerSeq fallback);
};

}  // namespace bhjb
