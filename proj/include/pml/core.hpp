#pragma once

// Core data model: priors, utility tables, row-stochastic mechanisms and the
// structural derivations on them (rank orders, supports, worst-case utility).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pml {

inline constexpr double kRowSumTol = 1e-9;

/// Dense row-major table, the storage behind every N x M object here.
template <typename T>
class Table {
 public:
  Table() = default;
  Table(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Table(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw std::invalid_argument("ragged table literal");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Table& a, const Table& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RealTable = Table<double>;
using IntTable = Table<int>;

/// Full-support distribution over the input alphabet.
class Prior {
 public:
  explicit Prior(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw std::invalid_argument("prior: empty");
    double sum = 0.0;
    for (double p : probs_) {
      if (!std::isfinite(p) || p <= 0.0)
        throw std::invalid_argument("prior: entries must be strictly positive");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
      throw std::invalid_argument("prior: probabilities must sum to 1, got " +
                                  std::to_string(sum));
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }
  double min_prob() const { return *std::min_element(probs_.begin(), probs_.end()); }

 private:
  std::vector<double> probs_;
};

/// Raw per-(input, output) utility values.
class UtilityValues {
 public:
  explicit UtilityValues(RealTable values) : values_(std::move(values)) {
    if (values_.rows() == 0 || values_.cols() == 0)
      throw std::invalid_argument("utility values: empty table");
    for (double v : values_.data())
      if (!std::isfinite(v)) throw std::invalid_argument("utility values: non-finite entry");
  }

  std::size_t inputs() const { return values_.rows(); }
  std::size_t outputs() const { return values_.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  const RealTable& table() const { return values_; }

 private:
  RealTable values_;
};

/// Per-input ranking of outputs: each row is a permutation of 1..M,
/// 1 = worst output for that input, M = best.
class UtilityOrder {
 public:
  explicit UtilityOrder(IntTable orders) : orders_(std::move(orders)) {
    if (orders_.rows() == 0 || orders_.cols() == 0)
      throw std::invalid_argument("utility order: empty table");
    const std::size_t m = orders_.cols();
    std::vector<bool> seen(m);
    for (std::size_t i = 0; i < orders_.rows(); ++i) {
      std::fill(seen.begin(), seen.end(), false);
      for (std::size_t j = 0; j < m; ++j) {
        int r = orders_(i, j);
        if (r < 1 || static_cast<std::size_t>(r) > m || seen[r - 1])
          throw std::invalid_argument("utility order: row " + std::to_string(i) +
                                      " is not a permutation of 1..M");
        seen[r - 1] = true;
      }
    }
  }

  std::size_t inputs() const { return orders_.rows(); }
  std::size_t outputs() const { return orders_.cols(); }
  int operator()(std::size_t i, std::size_t j) const { return orders_(i, j); }
  const IntTable& table() const { return orders_; }

 private:
  IntTable orders_;
};

/// Row-stochastic conditional distribution P(Y = y_j | X = x_i).
/// Zero means exactly 0; support semantics depend on it.
class Mechanism {
 public:
  explicit Mechanism(RealTable probs) : probs_(std::move(probs)) {
    if (probs_.rows() == 0 || probs_.cols() == 0)
      throw std::invalid_argument("mechanism: empty table");
    for (std::size_t i = 0; i < probs_.rows(); ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < probs_.cols(); ++j) {
        double p = probs_(i, j);
        if (!(p >= 0.0 && p <= 1.0 + kRowSumTol))
          throw std::invalid_argument("mechanism: entry out of [0,1]");
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTol)
        throw std::invalid_argument("mechanism: row " + std::to_string(i) +
                                    " sums to " + std::to_string(sum));
    }
  }

  std::size_t inputs() const { return probs_.rows(); }
  std::size_t outputs() const { return probs_.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return probs_(i, j); }
  const RealTable& table() const { return probs_; }

 private:
  RealTable probs_;
};

/// Ranks each row of a value table: rank k goes to the k-th smallest value.
/// Ties give the smaller rank to the smaller column index.
inline UtilityOrder order_from_values(const UtilityValues& values) {
  const std::size_t n = values.inputs(), m = values.outputs();
  IntTable orders(n, m);
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < n; ++i) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return values(i, a) < values(i, b);
    });
    for (std::size_t k = 0; k < m; ++k) orders(i, idx[k]) = static_cast<int>(k + 1);
  }
  return UtilityOrder(std::move(orders));
}

struct Labels {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

/// One experiment's worth of data: prior + utility order, optionally the raw
/// values the order was derived from.
struct Scenario {
  Prior prior;
  UtilityOrder order;
  std::optional<UtilityValues> values;
  std::optional<Labels> labels;

  Scenario(Prior p, UtilityOrder o, std::optional<UtilityValues> v = std::nullopt,
           std::optional<Labels> l = std::nullopt)
      : prior(std::move(p)), order(std::move(o)), values(std::move(v)), labels(std::move(l)) {
    if (prior.size() != order.inputs())
      throw std::invalid_argument("scenario: prior length does not match order rows");
    if (values) {
      if (values->inputs() != order.inputs() || values->outputs() != order.outputs())
        throw std::invalid_argument("scenario: values shape does not match order");
      if (!(order_from_values(*values).table() == order.table()))
        throw std::invalid_argument("scenario: utility_values inconsistent with utility_order");
    }
  }
};

/// Columns j with P_Y(y_j) > 0. Priors have full support, so this is simply
/// the set of columns with a positive entry.
inline std::vector<std::size_t> output_support(const Mechanism& mech) {
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < mech.outputs(); ++j)
    for (std::size_t i = 0; i < mech.inputs(); ++i)
      if (mech(i, j) > 0.0) {
        cols.push_back(j);
        break;
      }
  return cols;
}

/// Inputs consistent with observing output j: { i : p_ij > 0 }.
inline std::vector<std::size_t> induced_input_support(const Mechanism& mech, std::size_t j) {
  if (j >= mech.outputs()) throw std::invalid_argument("induced_input_support: column out of range");
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < mech.inputs(); ++i)
    if (mech(i, j) > 0.0) rows.push_back(i);
  if (rows.empty())
    throw std::invalid_argument("induced_input_support: column " + std::to_string(j) +
                                " is out of the output support");
  return rows;
}

/// Outputs that hold at least one rank >= h for some input.
inline std::vector<std::size_t> y_plus(const UtilityOrder& order, int h) {
  if (h < 1 || static_cast<std::size_t>(h) > order.outputs())
    throw std::invalid_argument("y_plus: h must be in [1, M]");
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < order.outputs(); ++j)
    for (std::size_t i = 0; i < order.inputs(); ++i)
      if (order(i, j) >= h) {
        cols.push_back(j);
        break;
      }
  return cols;
}

/// Worst-case utility order h(P): minimum rank over positive mechanism entries.
inline int worst_case_order(const Mechanism& mech, const UtilityOrder& order) {
  if (mech.inputs() != order.inputs() || mech.outputs() != order.outputs())
    throw std::invalid_argument("worst_case_order: shape mismatch");
  int best = static_cast<int>(order.outputs()) + 1;
  for (std::size_t i = 0; i < mech.inputs(); ++i)
    for (std::size_t j = 0; j < mech.outputs(); ++j)
      if (mech(i, j) > 0.0) best = std::min(best, order(i, j));
  if (best > static_cast<int>(order.outputs()))
    throw std::invalid_argument("worst_case_order: mechanism has no positive entry");
  return best;
}

/// Minimum raw utility over the mechanism's support.
inline double worst_case_value(const Mechanism& mech, const UtilityValues& values) {
  if (mech.inputs() != values.inputs() || mech.outputs() != values.outputs())
    throw std::invalid_argument("worst_case_value: shape mismatch");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mech.inputs(); ++i)
    for (std::size_t j = 0; j < mech.outputs(); ++j)
      if (mech(i, j) > 0.0) best = std::min(best, values(i, j));
  return best;
}

/// z_i: number of exact zeros in row i.
inline std::vector<int> row_zero_counts(const Mechanism& mech) {
  std::vector<int> counts(mech.inputs(), 0);
  for (std::size_t i = 0; i < mech.inputs(); ++i)
    for (std::size_t j = 0; j < mech.outputs(); ++j)
      if (mech(i, j) == 0.0) ++counts[i];
  return counts;
}

}  // namespace pml
