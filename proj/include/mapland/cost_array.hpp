#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mapland/error.hpp"
#include "mapland/rng.hpp"

namespace mapland {

using Cost = std::int64_t;
using Index = std::int32_t;  // 0-based element index within one dimension
using Permutation = std::vector<Index>;

inline bool is_permutation(std::span<const Index> p) {
  std::vector<char> seen(p.size(), 0);
  for (Index v : p) {
    if (v < 0 || static_cast<std::size_t>(v) >= p.size() || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

inline Permutation identity_permutation(int n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), Index{0});
  return p;
}

// Dense N^D cost array, row-major with the first index slowest.
class CostArray {
 public:
  CostArray(int dims, int card, std::vector<Cost> costs) : dims_(dims), card_(card), costs_(std::move(costs)) {
    validate_shape(dims, card);
    if (costs_.size() != element_count(dims, card))
      throw ShapeError("cost array length " + std::to_string(costs_.size()) + " != N^D = " +
                       std::to_string(element_count(dims, card)));
    init_strides();
  }

  static CostArray zeros(int dims, int card) {
    validate_shape(dims, card);
    return CostArray(dims, card, std::vector<Cost>(element_count(dims, card), 0));
  }

  static void validate_shape(int dims, int card) {
    if (dims < 3) throw ShapeError("dimensionality D must be >= 3, got " + std::to_string(dims));
    if (card < 2) throw ShapeError("cardinality N must be >= 2, got " + std::to_string(card));
  }

  // N^D, or throws RangeError if it does not fit in 64 bits.
  static std::uint64_t element_count(int dims, int card) {
    std::uint64_t n = 1;
    for (int d = 0; d < dims; ++d) {
      if (n > UINT64_MAX / static_cast<std::uint64_t>(card)) throw RangeError("N^D overflows 64 bits");
      n *= static_cast<std::uint64_t>(card);
    }
    return n;
  }

  int dims() const { return dims_; }
  int card() const { return card_; }
  std::span<const Cost> costs() const { return costs_; }

  // Stride of 1-based dimension d in the flat array: N^(D-d).
  std::size_t stride(int d) const { return strides_[d - 1]; }

  // idx holds D zero-based indices (i1,...,iD).
  std::size_t offset(std::span<const Index> idx) const {
    if (static_cast<int>(idx.size()) != dims_) throw ShapeError("index arity != D");
    std::size_t off = 0;
    for (int d = 0; d < dims_; ++d) {
      if (idx[d] < 0 || idx[d] >= card_) throw ShapeError("index out of range");
      off += static_cast<std::size_t>(idx[d]) * strides_[d];
    }
    return off;
  }

  Cost at(std::span<const Index> idx) const { return costs_[offset(idx)]; }
  Cost at(std::initializer_list<Index> idx) const {
    return at(std::span<const Index>(idx.begin(), idx.size()));
  }
  Cost operator[](std::size_t flat) const { return costs_[flat]; }

  bool operator==(const CostArray& o) const {
    return dims_ == o.dims_ && card_ == o.card_ && costs_ == o.costs_;
  }

 private:
  void init_strides() {
    strides_.assign(dims_, 1);
    for (int d = dims_ - 2; d >= 0; --d) strides_[d] = strides_[d + 1] * static_cast<std::size_t>(card_);
  }

  int dims_;
  int card_;
  std::vector<Cost> costs_;
  std::vector<std::size_t> strides_;
};

// A feasible MAP solution: permutations for dimensions 2..D. Dimension 1 is
// the identity and is not stored. Columns are contiguous, column d occupying
// [(d-2)*N, (d-1)*N).
class Assignment {
 public:
  Assignment() = default;

  static Assignment identity(int dims, int card) {
    CostArray::validate_shape(dims, card);
    Assignment a;
    a.dims_ = dims;
    a.card_ = card;
    a.cols_.resize(static_cast<std::size_t>(dims - 1) * card);
    for (int c = 0; c < dims - 1; ++c)
      for (int i = 0; i < card; ++i) a.cols_[static_cast<std::size_t>(c) * card + i] = i;
    return a;
  }

  // columns[k] is the permutation of dimension k+2.
  static Assignment from_columns(int dims, int card, const std::vector<Permutation>& columns) {
    CostArray::validate_shape(dims, card);
    if (static_cast<int>(columns.size()) != dims - 1)
      throw ShapeError("expected D-1 = " + std::to_string(dims - 1) + " columns");
    Assignment a;
    a.dims_ = dims;
    a.card_ = card;
    a.cols_.reserve(static_cast<std::size_t>(dims - 1) * card);
    for (const auto& col : columns) {
      if (static_cast<int>(col.size()) != card) throw ShapeError("column length != N");
      if (!is_permutation(col)) throw ValueError("column is not a permutation");
      a.cols_.insert(a.cols_.end(), col.begin(), col.end());
    }
    return a;
  }

  // Columns laid out as in raw(); each must be a permutation.
  template <class T>
  static Assignment from_raw(int dims, int card, std::span<const T> raw) {
    CostArray::validate_shape(dims, card);
    if (raw.size() != static_cast<std::size_t>(dims - 1) * card) throw ShapeError("raw assignment has wrong length");
    Assignment a;
    a.dims_ = dims;
    a.card_ = card;
    a.cols_.assign(raw.begin(), raw.end());
    for (int d = 2; d <= dims; ++d)
      if (!is_permutation(a.column(d))) throw ValueError("column is not a permutation");
    return a;
  }

  int dims() const { return dims_; }
  int card() const { return card_; }

  // Permutation of 1-based dimension d; d = 1 is not stored (identity).
  std::span<const Index> column(int d) const {
    check_dim(d);
    return {cols_.data() + static_cast<std::size_t>(d - 2) * card_, static_cast<std::size_t>(card_)};
  }

  // pi_d(i) for any 1-based dimension d, including d = 1.
  Index at(int d, Index i) const {
    if (d == 1) return i;
    return cols_[static_cast<std::size_t>(d - 2) * card_ + i];
  }

  void set_column(int d, std::span<const Index> perm) {
    check_dim(d);
    if (static_cast<int>(perm.size()) != card_) throw ShapeError("column length != N");
    if (!is_permutation(perm)) throw ValueError("column is not a permutation");
    std::copy(perm.begin(), perm.end(), cols_.begin() + static_cast<std::ptrdiff_t>(d - 2) * card_);
  }

  // Replaces column d by column_d o perm, i.e. row i takes old row perm(i).
  void compose_column(int d, std::span<const Index> perm) {
    check_dim(d);
    auto col = column(d);
    Permutation next(card_);
    for (int i = 0; i < card_; ++i) next[i] = col[perm[i]];
    std::copy(next.begin(), next.end(), cols_.begin() + static_cast<std::ptrdiff_t>(d - 2) * card_);
  }

  std::span<const Index> raw() const { return cols_; }

  bool operator==(const Assignment& o) const = default;
  auto operator<=>(const Assignment& o) const = default;

  // Canonical text: 1-based columns separated by '/', elements by ','.
  std::string encode() const {
    std::string s;
    for (int c = 0; c < dims_ - 1; ++c) {
      if (c) s += '/';
      for (int i = 0; i < card_; ++i) {
        if (i) s += ',';
        s += std::to_string(cols_[static_cast<std::size_t>(c) * card_ + i] + 1);
      }
    }
    return s;
  }

  static Assignment decode(std::string_view text) {
    std::vector<Permutation> columns;
    Permutation current;
    std::string token;
    auto flush_token = [&] {
      if (token.empty()) throw FormatError("empty element in assignment encoding");
      current.push_back(static_cast<Index>(std::stol(token)) - 1);
      token.clear();
    };
    for (char ch : text) {
      if (ch == ',') {
        flush_token();
      } else if (ch == '/') {
        flush_token();
        columns.push_back(std::move(current));
        current.clear();
      } else if (ch >= '0' && ch <= '9') {
        token += ch;
      } else if (ch != ' ' && ch != '\r' && ch != '\t') {
        throw FormatError(std::string("unexpected character '") + ch + "' in assignment encoding");
      }
    }
    flush_token();
    columns.push_back(std::move(current));
    const int card = static_cast<int>(columns.front().size());
    return from_columns(static_cast<int>(columns.size()) + 1, card, columns);
  }

 private:
  void check_dim(int d) const {
    if (d < 2 || d > dims_) throw ShapeError("stored columns are dimensions 2..D, got " + std::to_string(d));
  }

  int dims_ = 0;
  int card_ = 0;
  std::vector<Index> cols_;
};

struct AssignmentHash {
  std::size_t operator()(const Assignment& a) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (Index v : a.raw()) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 32));
  }
};

inline void check_same_shape(const CostArray& c, const Assignment& s) {
  if (c.dims() != s.dims() || c.card() != s.card())
    throw ShapeError("assignment shape (" + std::to_string(s.dims()) + "," + std::to_string(s.card()) +
                     ") does not match cost array (" + std::to_string(c.dims()) + "," +
                     std::to_string(c.card()) + ")");
}

// Sum over i of c[i, pi_2(i), ..., pi_D(i)].
inline Cost evaluate(const CostArray& c, const Assignment& s) {
  check_same_shape(c, s);
  Cost total = 0;
  for (int i = 0; i < c.card(); ++i) {
    std::size_t off = static_cast<std::size_t>(i) * c.stride(1);
    for (int d = 2; d <= c.dims(); ++d) off += static_cast<std::size_t>(s.at(d, i)) * c.stride(d);
    total += c[off];
  }
  return total;
}

// (N!)^(D-1).
inline std::uint64_t count_solutions(int dims, int card) {
  CostArray::validate_shape(dims, card);
  std::uint64_t fact = 1;
  for (int k = 2; k <= card; ++k) {
    if (fact > UINT64_MAX / static_cast<std::uint64_t>(k)) throw RangeError("N! overflows 64 bits");
    fact *= static_cast<std::uint64_t>(k);
  }
  std::uint64_t total = 1;
  for (int d = 1; d < dims; ++d) {
    if (total > UINT64_MAX / fact) throw RangeError("(N!)^(D-1) overflows 64 bits");
    total *= fact;
  }
  return total;
}

struct InstanceSpec {
  int dims = 3;
  int card = 2;
  std::uint64_t seed = 0;
  Cost low = 0;
  Cost high = 100000;

  bool operator==(const InstanceSpec&) const = default;
};

// Coefficients i.i.d. uniform on [low, high], drawn in flat order.
inline CostArray generate(const InstanceSpec& spec) {
  CostArray::validate_shape(spec.dims, spec.card);
  if (spec.low > spec.high) throw ConfigError("low > high");
  const auto count = CostArray::element_count(spec.dims, spec.card);
  std::vector<Cost> costs(count);
  Rng rng(spec.seed);
  for (auto& v : costs) v = rng.uniform(spec.low, spec.high);
  return CostArray(spec.dims, spec.card, std::move(costs));
}

inline Permutation random_permutation(int card, Rng& rng) {
  auto p = identity_permutation(card);
  rng.shuffle(std::span<Index>(p));
  return p;
}

inline Assignment random_assignment(int dims, int card, Rng& rng) {
  std::vector<Permutation> cols;
  cols.reserve(dims - 1);
  for (int d = 2; d <= dims; ++d) cols.push_back(random_permutation(card, rng));
  return Assignment::from_columns(dims, card, cols);
}

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

// Visits every feasible assignment exactly once, ordered lexicographically by
// the tuple of column permutation ranks (column 2 most significant).
inline void for_each_solution(int dims, int card, const std::function<void(const Assignment&)>& visit,
                              std::uint64_t cap = kDefaultEnumerationCap) {
  std::uint64_t total = 0;
  try {
    total = count_solutions(dims, card);
  } catch (const RangeError&) {
    throw CapExceededError("solution count (N!)^(D-1) overflows 64 bits; refusing to enumerate");
  }
  if (total > cap)
    throw CapExceededError("enumeration of " + std::to_string(total) + " solutions exceeds cap " +
                           std::to_string(cap));
  std::vector<Permutation> cols(dims - 1, identity_permutation(card));
  for (;;) {
    visit(Assignment::from_columns(dims, card, cols));
    // Odometer over next_permutation, last column fastest.
    int c = dims - 2;
    for (; c >= 0; --c) {
      if (std::next_permutation(cols[c].begin(), cols[c].end())) break;
      // next_permutation wrapped the column back to the identity.
    }
    if (c < 0) return;
  }
}

inline std::vector<Assignment> enumerate_solutions(int dims, int card, std::uint64_t cap = kDefaultEnumerationCap) {
  std::vector<Assignment> out;
  for_each_solution(dims, card, [&](const Assignment& a) { out.push_back(a); }, cap);
  return out;
}

}  // namespace mapland
