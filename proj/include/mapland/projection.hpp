#pragma once

#include <algorithm>
#include <initializer_list>
#include <string>
#include <vector>

#include "mapland/cost_array.hpp"
#include "mapland/error.hpp"
#include "mapland/lap.hpp"

namespace mapland {

// Sorted set of distinct 1-based dimensions, 1 <= k < D.
class DimensionSubset {
 public:
  DimensionSubset() = default;
  DimensionSubset(int total_dims, std::vector<int> dims) : dims_(std::move(dims)) {
    std::sort(dims_.begin(), dims_.end());
    if (dims_.empty()) throw ConfigError("dimension subset is empty");
    if (std::adjacent_find(dims_.begin(), dims_.end()) != dims_.end())
      throw ConfigError("dimension subset has duplicates");
    if (dims_.front() < 1 || dims_.back() > total_dims)
      throw ConfigError("dimension subset out of range 1.." + std::to_string(total_dims));
    if (static_cast<int>(dims_.size()) >= total_dims) throw ConfigError("dimension subset needs k < D");
  }
  DimensionSubset(int total_dims, std::initializer_list<int> dims) : DimensionSubset(total_dims, std::vector<int>(dims)) {}

  int k() const { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  bool contains(int d) const { return std::binary_search(dims_.begin(), dims_.end(), d); }
  bool has_first() const { return dims_.front() == 1; }

  std::string to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(dims_[i]);
    }
    return s + "}";
  }

  bool operator==(const DimensionSubset&) const = default;

 private:
  std::vector<int> dims_;
};

namespace detail {

// Every projection has the separable form entry(i,j) = c[row_off[i] + col_off[j]].
inline void fill_separable(const CostArray& c, const std::vector<std::size_t>& row_off,
                           const std::vector<std::size_t>& col_off, SquareMatrix& out) {
  const int n = c.card();
  if (out.size() != n) out.resize(n);
  const Cost* base = c.costs().data();
  for (int i = 0; i < n; ++i) {
    const Cost* src = base + row_off[i];
    Cost* dst = out.row(i);
    for (int j = 0; j < n; ++j) dst[j] = src[col_off[j]];
  }
}

// Per-thread offset buffers so projections do not allocate.
inline std::vector<std::size_t>& offsets(int which, int n) {
  thread_local std::vector<std::size_t> buf[2];
  auto& v = buf[which];
  v.assign(static_cast<std::size_t>(n), 0);
  return v;
}

inline void check_dim(const CostArray& c, int d) {
  if (d < 1 || d > c.dims()) throw ShapeError("dimension " + std::to_string(d) + " out of range 1.." + std::to_string(c.dims()));
}

}  // namespace detail

// Single-dimension projection C(d,S).
//   d != 1: entry(i,j) = c[i, pi_2(i), ..., j (at d), ..., pi_D(i)]
//   d == 1: entry(i,j) = c[i, pi_2(j), ..., pi_D(j)]
inline void project_single_into(const CostArray& c, const Assignment& s, int d, SquareMatrix& out) {
  check_same_shape(c, s);
  detail::check_dim(c, d);
  const int n = c.card();
  auto& row_off = detail::offsets(0, n);
  auto& col_off = detail::offsets(1, n);
  for (int i = 0; i < n; ++i) row_off[i] = static_cast<std::size_t>(i) * c.stride(1);
  for (int e = 2; e <= c.dims(); ++e) {
    for (int i = 0; i < n; ++i) {
      if (d == 1) {
        col_off[i] += static_cast<std::size_t>(s.at(e, i)) * c.stride(e);
      } else if (e == d) {
        col_off[i] += static_cast<std::size_t>(i) * c.stride(e);
      } else {
        row_off[i] += static_cast<std::size_t>(s.at(e, i)) * c.stride(e);
      }
    }
  }
  detail::fill_separable(c, row_off, col_off, out);
}

inline SquareMatrix project_single(const CostArray& c, const Assignment& s, int d) {
  SquareMatrix m;
  project_single_into(c, s, d, m);
  return m;
}

// k-dimension projection C(d_1..d_k, S).
//   1 not in dims: position d gets pi_d(j) for d in dims, pi_d(i) otherwise.
//   1 in dims:     position d in dims\{1} gets pi_d(i), all other d >= 2 get pi_d(j).
// The first index is always i.
inline void project_subset_into(const CostArray& c, const Assignment& s, const DimensionSubset& dims,
                                SquareMatrix& out) {
  check_same_shape(c, s);
  if (dims.dims().back() > c.dims() || dims.k() >= c.dims()) throw ShapeError("dimension subset does not fit D");
  const int n = c.card();
  const bool first = dims.has_first();
  auto& row_off = detail::offsets(0, n);
  auto& col_off = detail::offsets(1, n);
  for (int i = 0; i < n; ++i) row_off[i] = static_cast<std::size_t>(i) * c.stride(1);
  for (int e = 2; e <= c.dims(); ++e) {
    std::size_t* dst = dims.contains(e) != first ? col_off.data() : row_off.data();
    const auto col = s.column(e);
    const std::size_t stride = c.stride(e);
    for (int i = 0; i < n; ++i) dst[i] += static_cast<std::size_t>(col[i]) * stride;
  }
  detail::fill_separable(c, row_off, col_off, out);
}

inline SquareMatrix project_subset(const CostArray& c, const Assignment& s, const DimensionSubset& dims) {
  SquareMatrix m;
  project_subset_into(c, s, dims, m);
  return m;
}

// Update for a single-dimension move with LAP optimum perm.
//   d != 1: column d is replaced by perm.
//   d == 1: every stored column becomes s_e o perm, keeping dimension 1 fixed.
inline Assignment apply_move_single(const Assignment& s, int d, std::span<const Index> perm) {
  if (d < 1 || d > s.dims()) throw ShapeError("dimension out of range");
  if (static_cast<int>(perm.size()) != s.card() || !is_permutation(perm))
    throw ValueError("move is not a permutation of size N");
  Assignment next = s;
  if (d != 1) {
    next.set_column(d, perm);
  } else {
    for (int e = 2; e <= s.dims(); ++e) next.compose_column(e, perm);
  }
  return next;
}

// Update for a k-dimension move with LAP optimum perm.
//   1 not in dims: columns in dims become s_d o perm.
//   1 in dims:     columns outside dims become s_d o perm; dims\{1} stay.
inline Assignment apply_move_subset(const Assignment& s, const DimensionSubset& dims, std::span<const Index> perm) {
  if (dims.dims().back() > s.dims() || dims.k() >= s.dims()) throw ShapeError("dimension subset does not fit D");
  if (static_cast<int>(perm.size()) != s.card() || !is_permutation(perm))
    throw ValueError("move is not a permutation of size N");
  Assignment next = s;
  const bool first = dims.has_first();
  for (int e = 2; e <= s.dims(); ++e)
    if (dims.contains(e) != first) next.compose_column(e, perm);
  return next;
}

}  // namespace mapland
