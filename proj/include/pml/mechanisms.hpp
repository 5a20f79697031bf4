#pragma once

// Mechanism constructors: the utility-safe mechanism, the input-independent
// mechanism, the 3x3 two-output optimum fixture, and the LDP-derived baselines
// (exponential, randomized response) with the PML -> LDP budget conversion.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pml/core.hpp"
#include "pml/leakage.hpp"

namespace pml {

/// Zeros on every rank below h, uniform mass 1/(M-h+1) on the rest. Optimal
/// for the fixed-support worst-case-utility problem at threshold h.
inline Mechanism utility_safe(const UtilityOrder& order, int h) {
  const std::size_t n = order.inputs(), m = order.outputs();
  if (h < 1 || static_cast<std::size_t>(h) > m)
    throw std::invalid_argument("utility_safe: h must be in [1, M]");
  const double mass = 1.0 / static_cast<double>(m - h + 1);
  RealTable probs(n, m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (order(i, j) >= h) probs(i, j) = mass;
  return Mechanism(std::move(probs));
}

/// All N rows identical to `weights` (a distribution over M outputs): output
/// independent of input, zero leakage.
inline Mechanism independent(std::size_t n, const std::vector<double>& weights) {
  if (n == 0 || weights.empty()) throw std::invalid_argument("independent: empty shape");
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0)
      throw std::invalid_argument("independent: weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kRowSumTol)
    throw std::invalid_argument("independent: weights must sum to 1");
  RealTable probs(n, weights.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < weights.size(); ++j) probs(i, j) = weights[j];
  return Mechanism(std::move(probs));
}

/// The two-output optimal mechanism for the 3x3 cyclic order when the top
/// prior letter dominates: valid when P(x2)+P(x3) <= 1/2 and x1 is the argmax.
inline Mechanism example1_mechanism(const Prior& prior) {
  if (prior.size() != 3) throw std::invalid_argument("example1_mechanism: needs N = 3");
  const double p1 = prior[0], p2 = prior[1], p3 = prior[2];
  if (p2 + p3 > 0.5 + kRowSumTol)
    throw std::invalid_argument("example1_mechanism: requires P(x2)+P(x3) <= 1/2");
  if (p1 < p2 || p1 < p3)
    throw std::invalid_argument("example1_mechanism: requires x1 to maximize the prior");
  RealTable probs{{(1.0 - 2.0 * p3) / (2.0 * p1), (1.0 - 2.0 * p2) / (2.0 * p1), 0.0},
                  {0.0, 1.0, 0.0},
                  {1.0, 0.0, 0.0}};
  return Mechanism(std::move(probs));
}

/// LDP budget obtained from a PML budget, in nats.
struct LdpBudget {
  double value;
};

/// Converts a PML budget eps into the LDP budget that guarantees eps-PML under
/// the given p_min. Undefined at eps >= -log p_min, where every mechanism is
/// already eps-PML; callers must handle that regime themselves.
inline LdpBudget ldp_budget(double eps, double p_min) {
  if (!(p_min > 0.0 && p_min < 1.0)) throw std::invalid_argument("ldp_budget: p_min out of (0,1)");
  if (eps < 0.0) throw std::invalid_argument("ldp_budget: eps must be nonnegative");
  if (eps >= -std::log(p_min) - 1e-12)
    throw std::invalid_argument(
        "ldp_budget: eps >= -log p_min; conversion degenerates (every mechanism qualifies)");
  const double value = -std::log((std::exp(-eps) - p_min) / (1.0 - p_min));
  return LdpBudget{value};
}

/// Row i proportional to exp(u'_ij * ldp / (2 max|u'|)). Strictly positive
/// everywhere, hence worst-case order 1.
inline Mechanism exponential_mechanism(const UtilityValues& values, LdpBudget ldp) {
  const std::size_t n = values.inputs(), m = values.outputs();
  double max_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) max_abs = std::max(max_abs, std::abs(values(i, j)));
  const double scale = max_abs > 0.0 ? ldp.value / (2.0 * max_abs) : 0.0;
  RealTable probs(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    double row_max = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) row_max = std::max(row_max, values(i, j) * scale);
    double norm = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      probs(i, j) = std::exp(values(i, j) * scale - row_max);
      norm += probs(i, j);
    }
    for (std::size_t j = 0; j < m; ++j) probs(i, j) /= norm;
  }
  return Mechanism(std::move(probs));
}

/// Per-row argmax column of a value table, smallest index on ties.
inline std::vector<std::size_t> argmax_remap(const UtilityValues& values) {
  std::vector<std::size_t> remap(values.inputs());
  for (std::size_t i = 0; i < values.inputs(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < values.outputs(); ++j)
      if (values(i, j) > values(i, best)) best = j;
    remap[i] = best;
  }
  return remap;
}

/// N-ary randomized response on the input followed by the deterministic remap
/// x' -> argmax_y u'(x', y).
inline Mechanism randomized_response(const UtilityValues& values, LdpBudget ldp) {
  const std::size_t n = values.inputs(), m = values.outputs();
  const double e = std::exp(ldp.value);
  const double denom = static_cast<double>(n - 1) + e;
  const auto remap = argmax_remap(values);
  RealTable probs(n, m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      probs(i, remap[k]) += (k == i ? e : 1.0) / denom;
  return Mechanism(std::move(probs));
}

/// Largest threshold whose closed-form leakage fits the budget, with its
/// utility-safe mechanism. h = 1 always qualifies.
inline std::pair<int, Mechanism> piecewise_safe_for_budget(const Prior& prior,
                                                           const UtilityOrder& order,
                                                           double eps) {
  if (eps < 0.0) throw std::invalid_argument("piecewise_safe_for_budget: eps must be >= 0");
  int best = 1;
  for (int h = static_cast<int>(order.outputs()); h >= 2; --h)
    if (corollary_epsilon(prior, order, h) <= eps + 1e-12) {
      best = h;
      break;
    }
  return {best, utility_safe(order, best)};
}

}  // namespace pml
