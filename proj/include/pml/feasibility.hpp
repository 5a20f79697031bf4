#pragma once

// Linear feasibility check for the general mechanism-design problem: zero
// pattern from the utility threshold, per-cell PML inequalities, row
// stochasticity. Solved by a dense phase-one simplex with Bland's rule.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pml/core.hpp"
#include "pml/leakage.hpp"

namespace pml {

/// The solver could not certify feasible/infeasible at tolerance.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Columns whose PML lower bound rules them out of any eps-feasible support:
/// columns outside Y+(h), plus columns whose bound exceeds eps.
inline std::vector<std::size_t> prune_columns(const Prior& prior, const UtilityOrder& order,
                                              int h, double eps) {
  if (eps < 0.0) throw std::invalid_argument("prune_columns: eps must be >= 0");
  const auto keepable = y_plus(order, h);
  std::vector<bool> in_yplus(order.outputs(), false);
  for (std::size_t j : keepable) in_yplus[j] = true;
  std::vector<std::size_t> pruned;
  for (std::size_t j = 0; j < order.outputs(); ++j) {
    if (!in_yplus[j]) {
      pruned.push_back(j);
    } else if (column_lower_bound(prior, order, h, j) > eps + 1e-12) {
      pruned.push_back(j);
    }
  }
  return pruned;
}

struct FeasibilityProgram {
  Prior prior;
  double eps;
  std::size_t inputs;
  std::size_t outputs;
  std::vector<std::pair<std::size_t, std::size_t>> free_cells;
  std::vector<std::pair<std::size_t, std::size_t>> forced_zero_cells;
  std::vector<std::size_t> pruned_columns;
  bool structurally_infeasible;
  std::string infeasibility_reason;
};

/// Assembles the program for (order, h, eps). Forced zeros sit at ranks below
/// h and on every cell of a pruned column; pruned columns contribute no
/// variables at all.
inline FeasibilityProgram build_program(const Prior& prior, const UtilityOrder& order, int h,
                                        double eps, bool prune = true) {
  if (prior.size() != order.inputs())
    throw std::invalid_argument("build_program: prior/order shape mismatch");
  if (h < 1 || static_cast<std::size_t>(h) > order.outputs())
    throw std::invalid_argument("build_program: h must be in [1, M]");
  FeasibilityProgram prog{prior, eps,   order.inputs(), order.outputs(), {}, {}, {},
                          false, ""};
  if (prune) prog.pruned_columns = prune_columns(prior, order, h, eps);
  std::vector<bool> is_pruned(order.outputs(), false);
  for (std::size_t j : prog.pruned_columns) is_pruned[j] = true;

  std::vector<int> free_per_row(order.inputs(), 0);
  for (std::size_t i = 0; i < order.inputs(); ++i)
    for (std::size_t j = 0; j < order.outputs(); ++j) {
      if (!is_pruned[j] && order(i, j) >= h) {
        prog.free_cells.emplace_back(i, j);
        ++free_per_row[i];
      } else {
        prog.forced_zero_cells.emplace_back(i, j);
      }
    }
  for (std::size_t i = 0; i < order.inputs(); ++i)
    if (free_per_row[i] == 0) {
      prog.structurally_infeasible = true;
      prog.infeasibility_reason = "row " + std::to_string(i) + " has every cell forced to zero";
      break;
    }
  return prog;
}

struct FeasibilityResult {
  bool feasible;
  std::optional<Mechanism> witness;
  std::vector<std::size_t> pruned_columns;
};

namespace detail {

// Phase-one simplex on the dense tableau. Variables: one per free cell, one
// slack per PML inequality, one artificial per row-sum equality. Feasible iff
// the artificials can be driven to (numerical) zero.
class PhaseOneSimplex {
 public:
  PhaseOneSimplex(std::size_t num_rows, std::size_t num_vars) : m_(num_rows), n_(num_vars) {
    tableau_.assign(m_ + 1, std::vector<double>(n_ + 1, 0.0));
    basis_.assign(m_, 0);
  }

  std::vector<double>& row(std::size_t r) { return tableau_[r]; }
  void set_basis(std::size_t r, std::size_t var) { basis_[r] = var; }
  void mark_artificial_from(std::size_t first) { first_artificial_ = first; }

  // Returns the phase-one optimum (total residual infeasibility).
  double solve() {
    auto& obj = tableau_[m_];
    // objective: minimize sum of artificials, expressed over nonbasic columns
    for (std::size_t r = 0; r < m_; ++r)
      if (basis_[r] >= first_artificial_)
        for (std::size_t c = 0; c <= n_; ++c) obj[c] -= tableau_[r][c];

    const double tol = 1e-11;
    const std::size_t max_iters = 50000 + 200 * m_ * n_;
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
      // Bland: smallest-index entering column with negative reduced cost.
      std::size_t enter = n_;
      for (std::size_t c = 0; c < n_; ++c) {
        if (c >= first_artificial_) continue;
        if (obj[c] < -tol) {
          enter = c;
          break;
        }
      }
      if (enter == n_) return -obj[n_];

      // Bland ratio test: minimal ratio, ties to the smallest basic index.
      std::size_t leave = m_;
      double best_ratio = 0.0;
      for (std::size_t r = 0; r < m_; ++r) {
        const double a = tableau_[r][enter];
        if (a > tol) {
          const double ratio = tableau_[r][n_] / a;
          if (leave == m_ || ratio < best_ratio - 1e-15 ||
              (std::abs(ratio - best_ratio) <= 1e-15 && basis_[r] < basis_[leave])) {
            leave = r;
            best_ratio = ratio;
          }
        }
      }
      if (leave == m_)
        throw SolverError("phase-one simplex: unbounded direction in a bounded program");
      pivot(leave, enter);
    }
    throw SolverError("phase-one simplex: iteration limit exceeded");
  }

  double value_of(std::size_t var) const {
    for (std::size_t r = 0; r < m_; ++r)
      if (basis_[r] == var) return tableau_[r][n_];
    return 0.0;
  }

 private:
  void pivot(std::size_t r, std::size_t c) {
    auto& prow = tableau_[r];
    const double inv = 1.0 / prow[c];
    for (double& v : prow) v *= inv;
    prow[c] = 1.0;
    for (std::size_t k = 0; k <= m_; ++k) {
      if (k == r) continue;
      auto& row_k = tableau_[k];
      const double factor = row_k[c];
      if (factor == 0.0) continue;
      for (std::size_t col = 0; col <= n_; ++col) row_k[col] -= factor * prow[col];
      row_k[c] = 0.0;
    }
    basis_[r] = c;
  }

  std::size_t m_, n_;
  std::size_t first_artificial_ = 0;
  std::vector<std::vector<double>> tableau_;
  std::vector<std::size_t> basis_;
};

inline bool witness_satisfies(const FeasibilityProgram& prog, const Mechanism& mech,
                              double tol) {
  std::vector<bool> forced(prog.inputs * prog.outputs, true);
  for (const auto& [i, j] : prog.free_cells) forced[i * prog.outputs + j] = false;
  for (std::size_t i = 0; i < prog.inputs; ++i)
    for (std::size_t j = 0; j < prog.outputs; ++j)
      if (forced[i * prog.outputs + j] && mech(i, j) != 0.0) return false;
  const double cap = std::exp(prog.eps);
  for (std::size_t j = 0; j < prog.outputs; ++j) {
    double p_y = 0.0;
    for (std::size_t i = 0; i < prog.inputs; ++i) p_y += prog.prior[i] * mech(i, j);
    for (std::size_t i = 0; i < prog.inputs; ++i)
      if (mech(i, j) - cap * p_y > tol) return false;
  }
  return true;
}

}  // namespace detail

/// Certifies the program feasible (with a cleaned witness mechanism) or
/// infeasible. Deterministic for fixed input.
inline FeasibilityResult solve_feasibility(const FeasibilityProgram& prog) {
  if (prog.structurally_infeasible) return {false, std::nullopt, prog.pruned_columns};

  const std::size_t num_free = prog.free_cells.size();
  const std::size_t n_rows = prog.inputs;
  const std::size_t num_ineq = num_free;  // one PML inequality per free cell
  const std::size_t rows = n_rows + num_ineq;
  const std::size_t vars = num_free + num_ineq + n_rows;  // free + slack + artificial
  const std::size_t slack0 = num_free;
  const std::size_t art0 = num_free + num_ineq;

  // free cells grouped by column for the P_Y terms
  std::vector<std::vector<std::size_t>> col_cells(prog.outputs);
  for (std::size_t v = 0; v < num_free; ++v) col_cells[prog.free_cells[v].second].push_back(v);

  detail::PhaseOneSimplex sx(rows, vars);
  sx.mark_artificial_from(art0);

  for (std::size_t v = 0; v < num_free; ++v) sx.row(prog.free_cells[v].first)[v] = 1.0;
  for (std::size_t i = 0; i < n_rows; ++i) {
    sx.row(i)[art0 + i] = 1.0;
    sx.row(i)[vars] = 1.0;
    sx.set_basis(i, art0 + i);
  }
  const double cap = std::exp(prog.eps);
  for (std::size_t v = 0; v < num_free; ++v) {
    const std::size_t r = n_rows + v;
    auto& row = sx.row(r);
    row[v] += 1.0;
    const auto [i, j] = prog.free_cells[v];
    (void)i;
    for (std::size_t w : col_cells[j]) row[w] -= cap * prog.prior[prog.free_cells[w].first];
    row[slack0 + v] = 1.0;
    row[vars] = 0.0;
    sx.set_basis(r, slack0 + v);
  }

  const double optimum = sx.solve();
  if (optimum > 1e-8) return {false, std::nullopt, prog.pruned_columns};

  // Extract the witness; snap tiny entries to exact zero and renormalize.
  RealTable probs(prog.inputs, prog.outputs, 0.0);
  for (std::size_t v = 0; v < num_free; ++v) {
    double x = sx.value_of(v);
    if (x < 1e-9) x = 0.0;
    probs(prog.free_cells[v].first, prog.free_cells[v].second) = x;
  }
  for (std::size_t i = 0; i < prog.inputs; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < prog.outputs; ++j) sum += probs(i, j);
    if (sum <= 0.0) throw SolverError("feasibility: degenerate witness row");
    for (std::size_t j = 0; j < prog.outputs; ++j) probs(i, j) /= sum;
  }
  Mechanism witness(std::move(probs));
  if (!detail::witness_satisfies(prog, witness, 1e-6))
    throw SolverError("feasibility: witness failed re-validation after zero-snapping");
  return {true, std::move(witness), prog.pruned_columns};
}

/// Debug dump of a program in a plain text form suitable for diffing against
/// an external solver.
inline void dump_program(const FeasibilityProgram& prog, std::ostream& os) {
  os << "vars " << prog.free_cells.size() << " eps " << prog.eps << "\n";
  for (std::size_t v = 0; v < prog.free_cells.size(); ++v)
    os << "x" << v << " = p[" << prog.free_cells[v].first << "][" << prog.free_cells[v].second
       << "]\n";
  os << "pruned_columns";
  for (std::size_t j : prog.pruned_columns) os << " " << j;
  os << "\n";
  for (std::size_t i = 0; i < prog.inputs; ++i) {
    os << "eq row" << i << ":";
    for (std::size_t v = 0; v < prog.free_cells.size(); ++v)
      if (prog.free_cells[v].first == i) os << " +x" << v;
    os << " = 1\n";
  }
  const double cap = std::exp(prog.eps);
  for (std::size_t v = 0; v < prog.free_cells.size(); ++v) {
    os << "ineq x" << v << ":";
    os << " x" << v;
    for (std::size_t w = 0; w < prog.free_cells.size(); ++w)
      if (prog.free_cells[w].second == prog.free_cells[v].second)
        os << " - " << cap * prog.prior[prog.free_cells[w].first] << "*x" << w;
    os << " <= 0\n";
  }
}

}  // namespace pml
