// distance.hpp - distance between changepoint configurations:
//   d(C1, C2) = |m - k| + min over assignments of sum |tau_i - eta_j| / N
// where every point of the smaller configuration is matched to a distinct
// point of the larger one and N is the series length.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "cptkit/core.hpp"

namespace cptkit {

/// Dense row-major cost matrix. The smaller dimension is the fully matched
/// side of the assignment.
template <typename Cost>
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, Cost fill = Cost{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  CostMatrix(std::initializer_list<std::initializer_list<Cost>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) {
        throw Error(ErrorCode::InvalidParameter, "cost matrix rows must have equal length");
      }
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  Cost& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Cost& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Cost> data_;
};

template <typename Cost>
struct AssignmentResult {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (row, col), 0-based
  Cost total_cost{};
};

/// Exact minimum-cost rectangular assignment (Hungarian method with
/// potentials, shortest augmenting paths). Every index of the smaller
/// dimension is matched exactly once; pairs are returned sorted by row.
template <typename Cost>
AssignmentResult<Cost> min_assignment(const CostMatrix<Cost>& cost) {
  AssignmentResult<Cost> result;
  if (cost.empty()) return result;

  const bool transposed = cost.rows() > cost.cols();
  const std::size_t n = transposed ? cost.cols() : cost.rows();  // matched side
  const std::size_t m = transposed ? cost.rows() : cost.cols();
  auto at = [&](std::size_t i, std::size_t j) -> Cost {
    const Cost c = transposed ? cost(j - 1, i - 1) : cost(i - 1, j - 1);
    if (!(c >= Cost{})) {
      throw Error(ErrorCode::InvalidParameter, "assignment costs must be non-negative");
    }
    return c;
  };

  const Cost inf = std::numeric_limits<Cost>::has_infinity
                       ? std::numeric_limits<Cost>::infinity()
                       : std::numeric_limits<Cost>::max() / 4;
  std::vector<Cost> u(n + 1, Cost{}), v(m + 1, Cost{});
  std::vector<std::size_t> owner(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::vector<Cost> min_slack(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      Cost delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const Cost reduced = at(i0, j) - u[i0] - v[j];
        if (reduced < min_slack[j]) {
          min_slack[j] = reduced;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (std::size_t j = 1; j <= m; ++j) {
    if (owner[j] == 0) continue;
    const std::size_t i = owner[j];
    if (transposed) {
      result.pairs.emplace_back(j - 1, i - 1);
    } else {
      result.pairs.emplace_back(i - 1, j - 1);
    }
  }
  std::sort(result.pairs.begin(), result.pairs.end());
  for (const auto& [r, c] : result.pairs) result.total_cost += cost(r, c);
  return result;
}

struct DistanceBreakdown {
  std::size_t count_term = 0;        // |m - k|
  std::int64_t assignment_units = 0;  // minimal sum of |tau_i - eta_j|
  std::size_t normalizer = 1;        // N
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (time in C1, time in C2)

  double assignment_term() const noexcept {
    return static_cast<double>(assignment_units) / static_cast<double>(normalizer);
  }
  double total() const noexcept {
    return static_cast<double>(count_term) + assignment_term();
  }
};

/// Integer matrix |tau_i - eta_j| with rows from the larger configuration.
inline CostMatrix<std::int64_t> changepoint_cost_matrix(const ChangepointConfig& larger,
                                                        const ChangepointConfig& smaller) {
  CostMatrix<std::int64_t> cost(larger.count(), smaller.count());
  for (std::size_t i = 0; i < larger.count(); ++i) {
    for (std::size_t j = 0; j < smaller.count(); ++j) {
      const auto a = static_cast<std::int64_t>(larger.times()[i]);
      const auto b = static_cast<std::int64_t>(smaller.times()[j]);
      cost(i, j) = a > b ? a - b : b - a;
    }
  }
  return cost;
}

inline DistanceBreakdown config_distance_breakdown(const ChangepointConfig& first,
                                                   const ChangepointConfig& second) {
  if (first.series_length() != second.series_length()) {
    throw Error(ErrorCode::InvalidComparison,
                "config_distance: series lengths differ (" +
                    std::to_string(first.series_length()) + " vs " +
                    std::to_string(second.series_length()) + ")");
  }
  DistanceBreakdown out;
  out.normalizer = first.series_length();
  const std::size_t m = first.count();
  const std::size_t k = second.count();
  out.count_term = m > k ? m - k : k - m;
  if (m == 0 || k == 0) return out;

  const bool first_larger = m >= k;
  const auto& larger = first_larger ? first : second;
  const auto& smaller = first_larger ? second : first;
  const auto assignment = min_assignment(changepoint_cost_matrix(larger, smaller));
  out.assignment_units = assignment.total_cost;
  for (const auto& [i, j] : assignment.pairs) {
    const auto a = larger.times()[i];
    const auto b = smaller.times()[j];
    out.matches.emplace_back(first_larger ? a : b, first_larger ? b : a);
  }
  std::sort(out.matches.begin(), out.matches.end());
  return out;
}

inline double config_distance(const ChangepointConfig& first,
                              const ChangepointConfig& second) {
  return config_distance_breakdown(first, second).total();
}

}  // namespace cptkit
