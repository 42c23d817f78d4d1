#pragma once

// Brute-force reference implementations used only by the tests. They share
// nothing with the library beyond the data types.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "mapland/cost_array.hpp"
#include "mapland/lap.hpp"
#include "mapland/rng.hpp"

namespace oracle {

using mapland::Cost;
using mapland::Index;
using mapland::Permutation;

// Minimum over all n! permutations; ties resolve to the lexicographically
// smallest since next_permutation walks in lexicographic order.
inline mapland::LapSolution brute_lap(const mapland::SquareMatrix& b) {
  const int n = b.size();
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0);
  mapland::LapSolution best{p, std::numeric_limits<Cost>::max()};
  do {
    Cost v = 0;
    for (int i = 0; i < n; ++i) v += b(i, p[i]);
    if (v < best.value) best = {p, v};
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

inline mapland::SquareMatrix random_matrix(int n, mapland::Rng& rng, Cost lo, Cost hi) {
  mapland::SquareMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

inline std::vector<Permutation> all_permutations(int n) {
  std::vector<Permutation> out;
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0);
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Direct index formula, independent of CostArray::offset and strides.
inline Cost cost_at(const mapland::CostArray& c, const std::vector<Index>& idx) {
  std::size_t off = 0;
  for (Index v : idx) off = off * static_cast<std::size_t>(c.card()) + static_cast<std::size_t>(v);
  return c.costs()[off];
}

inline Cost objective(const mapland::CostArray& c, const std::vector<Permutation>& cols) {
  Cost total = 0;
  for (int i = 0; i < c.card(); ++i) {
    std::vector<Index> idx{static_cast<Index>(i)};
    for (const auto& col : cols) idx.push_back(col[i]);
    total += cost_at(c, idx);
  }
  return total;
}

inline std::vector<Permutation> columns_of(const mapland::Assignment& a) {
  std::vector<Permutation> cols;
  for (int d = 2; d <= a.dims(); ++d) {
    auto col = a.column(d);
    cols.emplace_back(col.begin(), col.end());
  }
  return cols;
}

// Every solution reachable by re-permuting one dimension d >= 2 outright, or
// by re-permuting dimensions 2..D jointly relative to dimension 1
// (row i of every stored column taken from row p(i)).
inline std::vector<std::vector<Permutation>> single_dimension_neighbors(const mapland::Assignment& a,
                                                                        bool include_dim1) {
  const auto base = columns_of(a);
  const int n = a.card();
  std::vector<std::vector<Permutation>> out;
  for (const auto& p : all_permutations(n)) {
    for (std::size_t c = 0; c < base.size(); ++c) {
      auto cols = base;
      cols[c] = p;
      out.push_back(cols);
    }
    if (include_dim1) {
      auto cols = base;
      for (auto& col : cols) {
        Permutation next(n);
        for (int i = 0; i < n; ++i) next[i] = col[p[i]];
        col = next;
      }
      out.push_back(cols);
    }
  }
  return out;
}

// Subset move semantics written out independently: dims excluding 1 are
// jointly relabelled by p; dims including 1 move the complement instead.
inline std::vector<Permutation> subset_move(const std::vector<Permutation>& base, const std::vector<int>& dims,
                                            const Permutation& p) {
  const bool first = std::find(dims.begin(), dims.end(), 1) != dims.end();
  auto cols = base;
  for (std::size_t c = 0; c < base.size(); ++c) {
    const int d = static_cast<int>(c) + 2;
    const bool in = std::find(dims.begin(), dims.end(), d) != dims.end();
    if (in != first) {
      for (std::size_t i = 0; i < p.size(); ++i) cols[c][i] = base[c][p[i]];
    }
  }
  return cols;
}

inline bool is_vlsn_local_min(const mapland::CostArray& c, const mapland::Assignment& a, bool include_dim1) {
  const Cost here = objective(c, columns_of(a));
  for (const auto& cols : single_dimension_neighbors(a, include_dim1))
    if (objective(c, cols) < here) return false;
  return true;
}

inline bool is_subset_local_min(const mapland::CostArray& c, const mapland::Assignment& a,
                                const std::vector<std::vector<int>>& subsets) {
  const auto base = columns_of(a);
  const Cost here = objective(c, base);
  const auto perms = all_permutations(a.card());
  for (const auto& dims : subsets)
    for (const auto& p : perms)
      if (objective(c, subset_move(base, dims, p)) < here) return false;
  return true;
}

// All subsets of {1..D} used by order-K VNS for K = 1..floor(D/2).
inline std::vector<std::vector<int>> vns_all_subsets(int dims) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 1; mask < (1u << dims); ++mask) {
    std::vector<int> s;
    for (int d = 1; d <= dims; ++d)
      if (mask & (1u << (d - 1))) s.push_back(d);
    const int k = static_cast<int>(s.size());
    if (k <= dims / 2) out.push_back(s);
  }
  return out;
}

}  // namespace oracle
