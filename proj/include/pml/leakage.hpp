#pragma once

// Pointwise maximal leakage: per-output PML, its worst case over the output
// support, the support/residual decomposition, and the closed-form leakage of
// the utility-safe construction. All values are in nats.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pml/core.hpp"

namespace pml {

/// PML of a single output: log( max_i p_ij / P_Y(y_j) ). By Bayes this equals
/// log max_i P(X=x_i | Y=y_j) / P(X=x_i) without ever dividing by a prior.
inline double pml_of_output(const Prior& prior, const Mechanism& mech, std::size_t j) {
  if (prior.size() != mech.inputs())
    throw std::invalid_argument("pml_of_output: prior/mechanism shape mismatch");
  if (j >= mech.outputs()) throw std::invalid_argument("pml_of_output: column out of range");
  double p_y = 0.0, p_max = 0.0;
  for (std::size_t i = 0; i < mech.inputs(); ++i) {
    p_y += prior[i] * mech(i, j);
    p_max = std::max(p_max, mech(i, j));
  }
  if (p_max <= 0.0)
    throw std::invalid_argument("pml_of_output: column " + std::to_string(j) +
                                " is out of the output support");
  return std::log(p_max / p_y);
}

/// Maximum PML over the output support. The mechanism is eps-PML iff this
/// value is <= eps.
inline double worst_case_pml(const Prior& prior, const Mechanism& mech) {
  double worst = 0.0;
  bool any = false;
  for (std::size_t j : output_support(mech)) {
    worst = any ? std::max(worst, pml_of_output(prior, mech, j)) : pml_of_output(prior, mech, j);
    any = true;
  }
  if (!any) throw std::invalid_argument("worst_case_pml: empty output support");
  return worst;
}

struct Decomposition {
  double support_term;   // -log prior mass of the induced input support
  double residual_term;  // PML under the prior rescaled to that support
};

/// Splits the PML of output j into the unavoidable support-revelation term and
/// the residual term. The two always sum back to pml_of_output.
inline Decomposition decompose(const Prior& prior, const Mechanism& mech, std::size_t j) {
  const auto support = induced_input_support(mech, j);
  double mass = 0.0, p_y = 0.0, p_max = 0.0;
  for (std::size_t i : support) {
    mass += prior[i];
    p_y += prior[i] * mech(i, j);
    p_max = std::max(p_max, mech(i, j));
  }
  const double support_term = -std::log(mass);
  // residual = log( p_max / sum_i Q_i p_ij ) with Q the rescaled prior
  const double residual_term = std::log(p_max * mass / p_y);
  return {support_term, residual_term};
}

/// -log of the prior mass of inputs with rank >= h in column j; the floor on
/// any mechanism's PML at that output once ranks below h are forbidden.
inline double column_lower_bound(const Prior& prior, const UtilityOrder& order, int h,
                                 std::size_t j) {
  if (prior.size() != order.inputs())
    throw std::invalid_argument("column_lower_bound: prior/order shape mismatch");
  if (h < 1 || static_cast<std::size_t>(h) > order.outputs())
    throw std::invalid_argument("column_lower_bound: h must be in [1, M]");
  if (j >= order.outputs()) throw std::invalid_argument("column_lower_bound: column out of range");
  double mass = 0.0;
  for (std::size_t i = 0; i < order.inputs(); ++i)
    if (order(i, j) >= h) mass += prior[i];
  if (mass <= 0.0)
    throw std::invalid_argument("column_lower_bound: column " + std::to_string(j) +
                                " has no rank >= h; bound is infinite");
  return -std::log(mass);
}

/// Leakage of the utility-safe mechanism at threshold h, in closed form:
/// the largest column lower bound over the canonical support Y+(h).
inline double corollary_epsilon(const Prior& prior, const UtilityOrder& order, int h) {
  double worst = 0.0;
  for (std::size_t j : y_plus(order, h))
    worst = std::max(worst, column_lower_bound(prior, order, h, j));
  return worst;
}

struct OutputLeakage {
  std::size_t output;
  double pml;
  double support_term;
  double residual_term;
  std::vector<std::size_t> input_support;
};

struct LeakageReport {
  std::vector<OutputLeakage> per_output;
  double worst_case;
  std::size_t argmax_output;
};

inline LeakageReport analyze_leakage(const Prior& prior, const Mechanism& mech) {
  LeakageReport report;
  report.worst_case = -std::numeric_limits<double>::infinity();
  report.argmax_output = 0;
  for (std::size_t j : output_support(mech)) {
    const auto dec = decompose(prior, mech, j);
    OutputLeakage out;
    out.output = j;
    out.pml = pml_of_output(prior, mech, j);
    out.support_term = dec.support_term;
    out.residual_term = dec.residual_term;
    out.input_support = induced_input_support(mech, j);
    if (out.pml > report.worst_case) {
      report.worst_case = out.pml;
      report.argmax_output = j;
    }
    report.per_output.push_back(std::move(out));
  }
  if (report.per_output.empty())
    throw std::invalid_argument("analyze_leakage: empty output support");
  return report;
}

}  // namespace pml
