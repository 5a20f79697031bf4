#pragma once

// Trade-off solvers: minimal leakage for a fixed utility threshold (closed
// form or LP bisection), maximal threshold under a leakage budget (binary
// search), and the full curve over h = 1..M.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pml/core.hpp"
#include "pml/feasibility.hpp"
#include "pml/leakage.hpp"
#include "pml/mechanisms.hpp"

namespace pml {

enum class Mode { kSafe, kOptimal };

inline const char* mode_name(Mode mode) { return mode == Mode::kSafe ? "safe" : "optimal"; }

struct TradeoffPoint {
  int h;
  double min_eps;  // nats
  Mechanism witness;
  Mode mode;
};

/// Minimal eps achieving worst-case order >= h. Safe mode is the closed form
/// with the utility-safe witness; optimal mode bisects over the feasibility
/// program (pruned by default) on [0, safe value].
inline TradeoffPoint min_epsilon(const Prior& prior, const UtilityOrder& order, int h, Mode mode,
                                 double tol = 1e-6, bool prune = true) {
  if (tol <= 0.0) throw std::invalid_argument("min_epsilon: tol must be positive");
  const double safe_eps = corollary_epsilon(prior, order, h);
  Mechanism safe_mech = utility_safe(order, h);
  if (mode == Mode::kSafe || safe_eps == 0.0)
    return {h, safe_eps, std::move(safe_mech), mode};

  const auto feasible_at = [&](double eps) {
    return solve_feasibility(build_program(prior, order, h, eps, prune));
  };

  // eps = 0 can be feasible when a single column already covers all ranks >= h
  auto at_zero = feasible_at(0.0);
  if (at_zero.feasible) return {h, 0.0, std::move(*at_zero.witness), mode};

  double lo = 0.0, hi = safe_eps;
  Mechanism witness = std::move(safe_mech);  // Theorem-1 witness at the upper bracket
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    auto result = feasible_at(mid);
    if (result.feasible) {
      hi = mid;
      witness = std::move(*result.witness);
    } else {
      lo = mid;
    }
  }
  return {h, hi, std::move(witness), mode};
}

/// Largest h achievable within the budget (monotone predicate, binary search),
/// resolved to the least-leakage witness at that h.
inline TradeoffPoint max_h_for_budget(const Prior& prior, const UtilityOrder& order, double eps,
                                      Mode mode, double tol = 1e-6) {
  if (eps < 0.0) throw std::invalid_argument("max_h_for_budget: eps must be >= 0");
  const int m = static_cast<int>(order.outputs());
  int best = 1;
  if (mode == Mode::kSafe) {
    // The closed form is not monotone in h for arbitrary orders (a column can
    // leave Y+(h) and take the largest bound with it), so scan for the
    // largest qualifying threshold directly.
    for (int h = m; h >= 2; --h)
      if (corollary_epsilon(prior, order, h) <= eps + 1e-12) {
        best = h;
        break;
      }
  } else {
    // LP feasibility shrinks with h, so the predicate is monotone here.
    const auto achievable = [&](int h) {
      return solve_feasibility(build_program(prior, order, h, eps)).feasible;
    };
    int lo = 1, hi = m;
    while (lo < hi) {  // achievable(1) always holds
      const int mid = (lo + hi + 1) / 2;
      if (achievable(mid))
        lo = mid;
      else
        hi = mid - 1;
    }
    best = lo;
  }
  return min_epsilon(prior, order, best, mode, tol);
}

struct CurveEntry {
  int h;
  std::optional<TradeoffPoint> point;
  std::string error;
};

/// One point per threshold h = 1..M; failed points carry the error instead.
inline std::vector<CurveEntry> tradeoff_curve(const Prior& prior, const UtilityOrder& order,
                                              Mode mode, double tol = 1e-6) {
  std::vector<CurveEntry> curve;
  for (int h = 1; h <= static_cast<int>(order.outputs()); ++h) {
    CurveEntry entry{h, std::nullopt, ""};
    try {
      entry.point = min_epsilon(prior, order, h, mode, tol);
    } catch (const SolverError& e) {
      entry.error = e.what();
    }
    curve.push_back(std::move(entry));
  }
  return curve;
}

}  // namespace pml
