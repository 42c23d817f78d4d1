#pragma once

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mapland/cost_array.hpp"
#include "mapland/error.hpp"

namespace mapland {

using NodeId = std::uint32_t;

struct Edge {
  NodeId from;
  NodeId to;
  Cost weight;  // f(from) - f(to) > 0
};

// Landscape digraph over discovered assignments. Edges point from worse to
// strictly better neighbours; node ids follow insertion order.
//
// Node columns live in one flat array (N <= 65535 always holds, since a
// larger N has no addressable cost array) and are indexed by an open
// addressing table, which keeps multi-million node landscapes compact.
class LandscapeGraph {
  using Cell = std::uint16_t;
  static constexpr NodeId kEmpty = std::numeric_limits<NodeId>::max();
  static constexpr std::uint32_t kNoEdge = std::numeric_limits<std::uint32_t>::max();

 public:
  LandscapeGraph() = default;
  LandscapeGraph(int dims, int card) : dims_(dims), card_(card), width_(static_cast<std::size_t>(dims - 1) * card) {
    if (card > std::numeric_limits<Cell>::max()) throw ShapeError("landscape graphs need N <= 65535");
  }

  int dims() const { return dims_; }
  int card() const { return card_; }

  // Returns the node id and whether the node is new.
  std::pair<NodeId, bool> insert(const Assignment& a, Cost objective) {
    if (a.dims() != dims_ || a.card() != card_) throw ShapeError("assignment shape does not match graph");
    const auto raw = a.raw();
    const std::uint64_t h = hash(raw);
    if ((count_ + 1) * 2 > table_.size()) grow();
    std::size_t slot = h & (table_.size() - 1);
    while (table_[slot] != kEmpty) {
      if (matches(table_[slot], h, raw)) return {table_[slot], false};
      slot = (slot + 1) & (table_.size() - 1);
    }
    if (count_ >= kEmpty - 1) throw CapExceededError("landscape graph node ids exhausted");
    const auto id = static_cast<NodeId>(count_++);
    table_[slot] = id;
    cells_.insert(cells_.end(), raw.begin(), raw.end());
    hashes_.push_back(h);
    objective_.push_back(objective);
    source_.push_back(0);
    expanded_.push_back(0);
    head_.push_back(kNoEdge);
    tail_.push_back(kNoEdge);
    degree_.push_back(0);
    return {id, true};
  }

  std::optional<NodeId> find(const Assignment& a) const {
    if (a.dims() != dims_ || a.card() != card_ || table_.empty()) return std::nullopt;
    const auto raw = a.raw();
    const std::uint64_t h = hash(raw);
    std::size_t slot = h & (table_.size() - 1);
    while (table_[slot] != kEmpty) {
      if (matches(table_[slot], h, raw)) return table_[slot];
      slot = (slot + 1) & (table_.size() - 1);
    }
    return std::nullopt;
  }

  // Adds u -> v unless already present. Requires f(u) > f(v) and u != v.
  bool add_edge(NodeId u, NodeId v) {
    if (u == v) throw ValueError("self-loop in landscape graph");
    const Cost w = objective_[u] - objective_[v];
    if (w <= 0) throw ValueError("landscape edges must point to strictly better solutions");
    for (auto x : successors(u))
      if (x == v) return false;
    if (edges_.size() >= kNoEdge) throw CapExceededError("landscape graph edge ids exhausted");
    const auto e = static_cast<std::uint32_t>(edges_.size());
    edges_.push_back({u, v, w});
    next_.push_back(kNoEdge);
    if (tail_[u] == kNoEdge)
      head_[u] = e;
    else
      next_[tail_[u]] = e;
    tail_[u] = e;
    ++degree_[u];
    return true;
  }

  void mark_source(NodeId id) { source_[id] = 1; }
  void mark_expanded(NodeId id) { expanded_[id] = 1; }

  std::size_t node_count() const { return count_; }
  std::size_t edge_count() const { return edges_.size(); }
  Assignment node(NodeId id) const { return Assignment::from_raw(dims_, card_, cells(id)); }
  Cost objective(NodeId id) const { return objective_[id]; }
  bool is_source(NodeId id) const { return source_[id] != 0; }
  bool is_expanded(NodeId id) const { return expanded_[id] != 0; }
  std::size_t out_degree(NodeId id) const { return degree_[id]; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Successors of one node in insertion order.
  class SuccessorRange {
   public:
    class iterator {
     public:
      using iterator_category = std::forward_iterator_tag;
      using value_type = NodeId;
      using difference_type = std::ptrdiff_t;
      using pointer = const NodeId*;
      using reference = NodeId;

      iterator() = default;
      iterator(const LandscapeGraph* g, std::uint32_t e) : g_(g), e_(e) {}
      NodeId operator*() const { return g_->edges_[e_].to; }
      iterator& operator++() {
        e_ = g_->next_[e_];
        return *this;
      }
      iterator operator++(int) {
        auto old = *this;
        ++*this;
        return old;
      }
      bool operator==(const iterator& o) const { return e_ == o.e_; }

     private:
      const LandscapeGraph* g_ = nullptr;
      std::uint32_t e_ = kNoEdge;
    };

    SuccessorRange(const LandscapeGraph* g, std::uint32_t first) : g_(g), first_(first) {}
    iterator begin() const { return {g_, first_}; }
    iterator end() const { return {g_, kNoEdge}; }
    bool empty() const { return first_ == kNoEdge; }

   private:
    const LandscapeGraph* g_;
    std::uint32_t first_;
  };

  SuccessorRange successors(NodeId id) const { return {this, head_[id]}; }

  // Expanded nodes without outgoing edges (local minima).
  bool is_sink(NodeId id) const { return expanded_[id] && degree_[id] == 0; }

  std::vector<NodeId> sinks() const {
    std::vector<NodeId> out;
    for (NodeId id = 0; id < count_; ++id)
      if (is_sink(id)) out.push_back(id);
    return out;
  }

  std::vector<NodeId> sources() const {
    std::vector<NodeId> out;
    for (NodeId id = 0; id < count_; ++id)
      if (source_[id]) out.push_back(id);
    return out;
  }

  bool is_complete() const {
    return std::all_of(expanded_.begin(), expanded_.end(), [](char e) { return e != 0; });
  }

 private:
  std::span<const Cell> cells(NodeId id) const { return {cells_.data() + id * width_, width_}; }

  static std::uint64_t hash(std::span<const Index> raw) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (Index v : raw) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 0x100000001b3ULL;
    }
    return h ^ (h >> 29);
  }

  bool matches(NodeId id, std::uint64_t h, std::span<const Index> raw) const {
    if (hashes_[id] != h) return false;
    const Cell* c = cells_.data() + id * width_;
    for (std::size_t k = 0; k < width_; ++k)
      if (c[k] != static_cast<Cell>(raw[k])) return false;
    return true;
  }

  void grow() {
    std::vector<NodeId> table(std::max<std::size_t>(16, table_.size() * 2), kEmpty);
    for (NodeId id = 0; id < count_; ++id) {
      std::size_t slot = hashes_[id] & (table.size() - 1);
      while (table[slot] != kEmpty) slot = (slot + 1) & (table.size() - 1);
      table[slot] = id;
    }
    table_ = std::move(table);
  }

  int dims_ = 0;
  int card_ = 0;
  std::size_t width_ = 0;
  std::size_t count_ = 0;
  std::vector<Cell> cells_;
  std::vector<std::uint64_t> hashes_;
  std::vector<NodeId> table_;
  std::vector<Cost> objective_;
  std::vector<char> source_;
  std::vector<char> expanded_;
  std::vector<std::uint32_t> head_, tail_, degree_;
  std::vector<std::uint32_t> next_;
  std::vector<Edge> edges_;
};

}  // namespace mapland
