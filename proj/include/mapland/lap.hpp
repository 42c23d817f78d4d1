#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mapland/cost_array.hpp"
#include "mapland/error.hpp"

namespace mapland {

// Row-major square integer matrix.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(int n, Cost fill = 0) : n_(n), data_(static_cast<std::size_t>(n) * n, fill) {}
  SquareMatrix(int n, std::vector<Cost> data) : n_(n), data_(std::move(data)) {
    if (data_.size() != static_cast<std::size_t>(n) * n) throw ShapeError("matrix data is not n*n");
  }
  static SquareMatrix from_rows(const std::vector<std::vector<Cost>>& rows) {
    const int n = static_cast<int>(rows.size());
    SquareMatrix m(n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(rows[i].size()) != n)
        throw ShapeError("matrix is not square: row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                         " entries, expected " + std::to_string(n));
      for (int j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  int size() const { return n_; }
  Cost& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * n_ + j]; }
  Cost operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * n_ + j]; }
  Cost* row(int i) { return data_.data() + static_cast<std::size_t>(i) * n_; }
  const Cost* row(int i) const { return data_.data() + static_cast<std::size_t>(i) * n_; }
  void resize(int n) {
    n_ = n;
    data_.assign(static_cast<std::size_t>(n) * n, 0);
  }

  bool operator==(const SquareMatrix&) const = default;

 private:
  int n_ = 0;
  std::vector<Cost> data_;
};

struct LapSolution {
  Permutation perm;  // row i -> column perm[i]
  Cost value = 0;
};

inline Cost assignment_cost(const SquareMatrix& b, std::span<const Index> perm) {
  Cost v = 0;
  for (int i = 0; i < b.size(); ++i) v += b(i, perm[i]);
  return v;
}

// Exact LAP solver: shortest augmenting paths with integer potentials
// (O(n^3)), followed by a pass that selects the lexicographically smallest
// optimal permutation. Holds scratch buffers; use one instance per thread.
class LapSolver {
 public:
  LapSolution solve(const SquareMatrix& b) {
    LapSolution out;
    solve_into(b, out);
    return out;
  }

  void solve_into(const SquareMatrix& b, LapSolution& out) {
    const int n = b.size();
    if (n < 1) throw ShapeError("LAP needs n >= 1");
    hungarian(b);
    lexicographic_minimum(b);
    out.perm.assign(match_.begin(), match_.end());
    out.value = assignment_cost(b, out.perm);
  }

 private:
  static constexpr Cost kInf = std::numeric_limits<Cost>::max() / 4;

  // 1-based potentials u (rows) and v (columns); p[j] is the row matched to
  // column j, with column 0 as the virtual root.
  void hungarian(const SquareMatrix& b) {
    const int n = b.size();
    const auto m = static_cast<std::size_t>(n) + 1;
    if (u_.size() < m) {
      u_.resize(m);
      v_.resize(m);
      minv_.resize(m);
      p_.resize(m);
      way_.resize(m);
      used_.resize(m);
    }
    Cost* u = u_.data();
    Cost* v = v_.data();
    Cost* minv = minv_.data();
    int* p = p_.data();
    int* way = way_.data();
    char* used = used_.data();
    // Warm start: column potentials at the column minima (all reduced costs
    // stay >= 0), then match rows greedily along zero reduced-cost edges.
    std::fill_n(u, m, 0);
    std::fill_n(p, m, 0);
    v[0] = 0;
    for (int j = 1; j <= n; ++j) v[j] = b(0, j - 1);
    for (int i = 1; i < n; ++i) {
      const Cost* row = b.row(i) - 1;
      for (int j = 1; j <= n; ++j) v[j] = std::min(v[j], row[j]);
    }
    row_matched_.assign(m, 0);
    for (int i = 1; i <= n; ++i) {
      const Cost* row = b.row(i - 1) - 1;
      for (int j = 1; j <= n; ++j) {
        if (p[j] == 0 && row[j] == v[j]) {
          p[j] = i;
          row_matched_[i] = 1;
          break;
        }
      }
    }
    for (int i = 1; i <= n; ++i) {
      if (row_matched_[i]) continue;
      p[0] = i;
      int j0 = 0;
      std::fill_n(minv, m, kInf);
      std::fill_n(used, m, 0);
      do {
        used[j0] = 1;
        const int i0 = p[j0];
        const Cost* row = b.row(i0 - 1) - 1;
        const Cost ui = u[i0];
        Cost delta = kInf;
        int j1 = 0;
        for (int j = 1; j <= n; ++j) {
          if (used[j]) continue;
          const Cost cur = row[j] - ui - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
          if (minv[j] < delta) {
            delta = minv[j];
            j1 = j;
          }
        }
        for (int j = 0; j <= n; ++j) {
          if (used[j]) {
            u[p[j]] += delta;
            v[j] -= delta;
          } else {
            minv[j] -= delta;
          }
        }
        j0 = j1;
      } while (p[j0] != 0);
      do {
        const int j1 = way[j0];
        p[j0] = p[j1];
        j0 = j1;
      } while (j0);
    }
    match_.resize(n);
    owner_.resize(n);
    for (int j = 1; j <= n; ++j) {
      match_[p[j] - 1] = j - 1;
      owner_[j - 1] = p[j] - 1;
    }
  }

  bool tight(const SquareMatrix& b, int i, int j) const { return b(i, j) - u_[i + 1] - v_[j + 1] == 0; }

  // With optimal duals fixed, the optimal permutations are exactly the
  // perfect matchings on zero reduced-cost edges. Walk rows in order and
  // re-route the current matching onto the smallest feasible tight column.
  void lexicographic_minimum(const SquareMatrix& b) {
    const int n = b.size();
    fixed_col_.assign(n, 0);
    for (int i = 0; i < n; ++i) {
      const Cost* row = b.row(i);
      const Cost ui = u_[i + 1];
      for (int j = 0; j < match_[i]; ++j) {
        if (fixed_col_[j] || row[j] - ui - v_[j + 1] != 0) continue;
        if (reroute(b, i, j)) break;
      }
      fixed_col_[match_[i]] = 1;
    }
  }

  // Tries to give column j to row i: the row currently owning j must reach
  // match_[i] through an alternating path over unfixed rows and columns.
  bool reroute(const SquareMatrix& b, int i, int j) {
    const int n = b.size();
    const int target = match_[i];
    const int start = owner_[j];
    parent_col_.assign(n, -1);  // column -> column through which its owner was reached (-2 = start row)
    seen_col_.assign(n, 0);
    queue_.clear();
    queue_.push_back(start);
    std::vector<int>& via = via_;  // row -> column that led to it (-1 for start)
    via.assign(n, -1);
    std::size_t head = 0;
    int found = -1;
    while (head < queue_.size() && found < 0) {
      const int row = queue_[head++];
      for (int col = 0; col < n; ++col) {
        if (col == j || fixed_col_[col] || seen_col_[col] || !tight(b, row, col)) continue;
        seen_col_[col] = 1;
        parent_col_[col] = row;
        if (col == target) {
          found = col;
          break;
        }
        const int next = owner_[col];
        via[next] = col;
        queue_.push_back(next);
      }
    }
    if (found < 0) return false;
    // Flip along the path: each row on it takes the column that was reached
    // from it.
    int col = found;
    while (true) {
      const int row = parent_col_[col];
      const int prev = via[row];
      match_[row] = col;
      owner_[col] = row;
      if (row == start) break;
      col = prev;
    }
    match_[i] = j;
    owner_[j] = i;
    return true;
  }

  std::vector<Cost> u_, v_, minv_;
  std::vector<int> p_, way_, match_, owner_;
  std::vector<char> used_, fixed_col_, seen_col_, row_matched_;
  std::vector<int> parent_col_, queue_, via_;
};

inline LapSolution solve_lap(const SquareMatrix& b) {
  LapSolver solver;
  return solver.solve(b);
}

}  // namespace mapland
