#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mapland/cost_array.hpp"
#include "mapland/error.hpp"
#include "mapland/graph.hpp"
#include "mapland/lap.hpp"
#include "mapland/parallel.hpp"
#include "mapland/projection.hpp"
#include "mapland/rng.hpp"

namespace mapland {

enum class NeighborhoodKind {
  vlsn_all_dims,   // one LAP per dimension 1..D
  vlsn_no_dim1,    // one LAP per dimension 2..D
  vns_order_k,     // all K-subsets of {2..D} plus {1} with all (K-1)-subsets
  vns_all_orders,  // union of vns_order_k for K = 1..floor(D/2)
};

struct Neighborhood {
  NeighborhoodKind kind = NeighborhoodKind::vlsn_all_dims;
  int order = 0;  // K, only for vns_order_k

  static Neighborhood vlsn() { return {NeighborhoodKind::vlsn_all_dims, 0}; }
  static Neighborhood vlsn_no_dim1() { return {NeighborhoodKind::vlsn_no_dim1, 0}; }
  static Neighborhood vns(int k) { return {NeighborhoodKind::vns_order_k, k}; }
  static Neighborhood vns_all() { return {NeighborhoodKind::vns_all_orders, 0}; }

  // "vlsn", "vlsn-nod1", "vns:K", "vns-all".
  static Neighborhood parse(std::string_view text) {
    if (text == "vlsn") return vlsn();
    if (text == "vlsn-nod1") return vlsn_no_dim1();
    if (text == "vns-all") return vns_all();
    if (text.starts_with("vns:")) {
      int k = 0;
      const auto rest = text.substr(4);
      auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), k);
      if (ec != std::errc{} || ptr != rest.data() + rest.size() || k < 1)
        throw ConfigError("bad VNS order in '" + std::string(text) + "'");
      return vns(k);
    }
    throw ConfigError("unknown algorithm '" + std::string(text) + "' (expected vlsn, vlsn-nod1, vns:K, vns-all)");
  }

  std::string name() const {
    switch (kind) {
      case NeighborhoodKind::vlsn_all_dims: return "vlsn";
      case NeighborhoodKind::vlsn_no_dim1: return "vlsn-nod1";
      case NeighborhoodKind::vns_order_k: return "vns:" + std::to_string(order);
      case NeighborhoodKind::vns_all_orders: return "vns-all";
    }
    return "?";
  }

  // K < D and K <= D - K.
  void validate(int dims) const {
    if (kind == NeighborhoodKind::vns_order_k && (order < 1 || order >= dims || order > dims - order))
      throw ConfigError("VNS order K=" + std::to_string(order) + " invalid for D=" + std::to_string(dims) +
                        " (need 1 <= K, K < D, K <= D-K)");
  }

  bool operator==(const Neighborhood&) const = default;
};

// One candidate move family: a dimension subset plus which projection
// definition drives it. Single scopes use the single-dimension projection and
// column replacement; subset scopes use the k-dimension projection and
// column composition.
struct MoveScope {
  DimensionSubset dims;
  bool single = false;

  std::string to_string() const { return (single ? "d" : "S") + dims.to_string(); }
};

namespace detail {

inline void for_each_combination(int lo, int hi, int k, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> pick;
  std::function<void(int)> rec = [&](int from) {
    if (static_cast<int>(pick.size()) == k) {
      visit(pick);
      return;
    }
    for (int d = from; d <= hi; ++d) {
      pick.push_back(d);
      rec(d + 1);
      pick.pop_back();
    }
  };
  rec(lo);
}

}  // namespace detail

// Candidate scopes in tie-break order: subsets without dimension 1 first,
// then subsets with it; within each group lexicographic by dimension list.
inline std::vector<MoveScope> move_scopes(int dims, const Neighborhood& nb) {
  nb.validate(dims);
  std::vector<MoveScope> scopes;
  auto add_order = [&](int k) {
    detail::for_each_combination(2, dims, k, [&](const std::vector<int>& pick) {
      scopes.push_back({DimensionSubset(dims, pick), false});
    });
    detail::for_each_combination(2, dims, k - 1, [&](const std::vector<int>& pick) {
      std::vector<int> with_first{1};
      with_first.insert(with_first.end(), pick.begin(), pick.end());
      scopes.push_back({DimensionSubset(dims, with_first), false});
    });
  };
  switch (nb.kind) {
    case NeighborhoodKind::vlsn_all_dims:
    case NeighborhoodKind::vlsn_no_dim1:
      for (int d = 2; d <= dims; ++d) scopes.push_back({DimensionSubset(dims, {d}), true});
      if (nb.kind == NeighborhoodKind::vlsn_all_dims) scopes.push_back({DimensionSubset(dims, {1}), true});
      return scopes;
    case NeighborhoodKind::vns_order_k:
      add_order(nb.order);
      break;
    case NeighborhoodKind::vns_all_orders:
      for (int k = 1; k <= dims / 2; ++k) add_order(k);
      break;
  }
  std::stable_sort(scopes.begin(), scopes.end(), [](const MoveScope& a, const MoveScope& b) {
    if (a.dims.has_first() != b.dims.has_first()) return !a.dims.has_first();
    return a.dims.dims() < b.dims.dims();
  });
  return scopes;
}

// Binomial(n, k), small arguments only.
inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

struct Candidate {
  std::size_t scope = 0;
  LapSolution lap;
};

// Evaluates every scope of a neighbourhood at a given solution: one
// projection and one LAP solve each. Shared by descent and exploration.
class MoveEvaluator {
 public:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  MoveEvaluator(const CostArray& costs, const Neighborhood& nb)
      : costs_(&costs), neighborhood_(nb), scopes_(move_scopes(costs.dims(), nb)) {
    // Scopes that build the same matrix and apply the same update share one
    // LAP: a subset holding dimension 1 matches the complementary subset
    // without it, and {1} matches the single dimension-1 move.
    std::vector<std::vector<char>> keys;
    for (const auto& scope : scopes_) {
      std::vector<char> key(static_cast<std::size_t>(costs.dims()) + 1, 0);
      const int d0 = scope.dims.dims().front();
      if (scope.single && d0 != 1) {
        key[0] = 1;
        key[static_cast<std::size_t>(d0)] = 1;
      } else {
        const bool first = scope.dims.has_first();
        for (int e = 2; e <= costs.dims(); ++e) key[static_cast<std::size_t>(e)] = scope.dims.contains(e) != first;
      }
      const auto hit = std::find(keys.begin(), keys.end(), key);
      alias_.push_back(hit == keys.end() ? alias_.size() : alias_[static_cast<std::size_t>(hit - keys.begin())]);
      keys.push_back(std::move(key));
    }
  }

  const std::vector<MoveScope>& scopes() const { return scopes_; }
  const CostArray& costs() const { return *costs_; }
  std::size_t lap_solves() const { return lap_solves_; }

  // Index of the first scope equivalent to scope k.
  std::size_t alias(std::size_t k) const { return alias_[k]; }

  // Scopes equivalent to `skip` are left out (value = max, empty perm); an
  // exploration passes the scope a node was reached through, since that
  // neighbourhood cannot improve on the node.
  void evaluate(const Assignment& s, std::vector<Candidate>& out, std::size_t skip = kNone) {
    out.resize(scopes_.size());
    for (std::size_t k = 0; k < scopes_.size(); ++k) {
      out[k].scope = k;
      if (skip != kNone && alias_[k] == skip) {
        out[k].lap.perm.clear();
        out[k].lap.value = std::numeric_limits<Cost>::max();
        continue;
      }
      ++lap_solves_;
      if (alias_[k] != k) {
        out[k].lap = out[alias_[k]].lap;
        continue;
      }
      const auto& scope = scopes_[k];
      const int d0 = scope.dims.dims().front();
      if (scope.single)
        project_single_into(*costs_, s, d0, matrix_);
      else
        project_subset_into(*costs_, s, scope.dims, matrix_);
      solver_.solve_into(matrix_, out[k].lap);
    }
  }

  Assignment apply(const Assignment& s, const Candidate& c) const {
    const auto& scope = scopes_[c.scope];
    if (scope.single) return apply_move_single(s, scope.dims.dims().front(), c.lap.perm);
    return apply_move_subset(s, scope.dims, c.lap.perm);
  }

 private:
  const CostArray* costs_;
  Neighborhood neighborhood_;
  std::vector<MoveScope> scopes_;

  std::vector<std::size_t> alias_;
  LapSolver solver_;
  SquareMatrix matrix_;
  std::size_t lap_solves_ = 0;
};

// Index of the first candidate with the smallest value (scope order breaks ties).
inline std::size_t best_candidate(const std::vector<Candidate>& cands) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < cands.size(); ++k)
    if (cands[k].lap.value < cands[best].lap.value) best = k;
  return best;
}

inline constexpr std::size_t kNoScope = std::numeric_limits<std::size_t>::max();

struct TrajectoryPoint {
  Assignment solution;
  Cost objective = 0;
  std::size_t scope = kNoScope;  // scope of the move that produced this point
};

struct DescentResult {
  std::vector<TrajectoryPoint> trajectory;  // starts with the initial solution
  std::size_t lap_solves = 0;

  const Assignment& sink() const { return trajectory.back().solution; }
  Cost objective() const { return trajectory.back().objective; }
  std::size_t moves() const { return trajectory.size() - 1; }
};

// Steepest descent: evaluate every scope, take the best LAP value, move only
// on strict improvement, stop at the first step without one.
inline DescentResult descend(MoveEvaluator& eval, const Assignment& start) {
  const auto& costs = eval.costs();
  DescentResult r;
  const auto before = eval.lap_solves();
  r.trajectory.push_back({start, evaluate(costs, start), kNoScope});
  std::vector<Candidate> cands;
  for (;;) {
    const auto& here = r.trajectory.back();
    eval.evaluate(here.solution, cands);
    const auto best = best_candidate(cands);
    if (cands[best].lap.value >= here.objective) break;
    auto next = eval.apply(here.solution, cands[best]);
    const Cost value = cands[best].lap.value;
    r.trajectory.push_back({std::move(next), value, cands[best].scope});
  }
  r.lap_solves = eval.lap_solves() - before;
  return r;
}

inline DescentResult descend(const CostArray& costs, const Assignment& start, const Neighborhood& nb) {
  check_same_shape(costs, start);
  MoveEvaluator eval(costs, nb);
  return descend(eval, start);
}

inline DescentResult vlsn_descend(const CostArray& costs, const Assignment& start, bool include_dim1 = true) {
  return descend(costs, start, include_dim1 ? Neighborhood::vlsn() : Neighborhood::vlsn_no_dim1());
}

// order == 0 selects the union of all orders.
inline DescentResult vns_descend(const CostArray& costs, const Assignment& start, int order) {
  return descend(costs, start, order == 0 ? Neighborhood::vns_all() : Neighborhood::vns(order));
}

// ---------------------------------------------------------------- starts

inline constexpr std::uint64_t kDefaultStartCap = 10'000'000;

// Cartesian product of cyclic shifts: for (t_2..t_D) in {0..N-1}^(D-1),
// column d maps i -> (i + t_d) mod N. Tuples in lexicographic order.
inline std::vector<Assignment> make_grid_starts(int dims, int card, std::uint64_t cap = kDefaultStartCap) {
  CostArray::validate_shape(dims, card);
  std::uint64_t total = 1;
  for (int d = 2; d <= dims; ++d) {
    if (total > cap / static_cast<std::uint64_t>(card))
      throw CapExceededError("grid of N^(D-1) starts exceeds cap " + std::to_string(cap));
    total *= static_cast<std::uint64_t>(card);
  }
  std::vector<Assignment> out;
  out.reserve(total);
  std::vector<int> shift(dims - 1, 0);
  std::vector<Permutation> cols(dims - 1, Permutation(card));
  for (std::uint64_t t = 0; t < total; ++t) {
    for (int c = 0; c < dims - 1; ++c)
      for (int i = 0; i < card; ++i) cols[c][i] = static_cast<Index>((i + shift[c]) % card);
    out.push_back(Assignment::from_columns(dims, card, cols));
    for (int c = dims - 2; c >= 0; --c) {
      if (++shift[c] < card) break;
      shift[c] = 0;
    }
  }
  return out;
}

inline std::vector<Assignment> make_random_starts(int dims, int card, std::size_t mu, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Assignment> out;
  out.reserve(mu);
  for (std::size_t k = 0; k < mu; ++k) out.push_back(random_assignment(dims, card, rng));
  return out;
}

// Keeps the first occurrence of each assignment, preserving order.
inline std::vector<Assignment> dedup_starts(const std::vector<Assignment>& starts) {
  std::unordered_map<Assignment, char, AssignmentHash> seen;
  std::vector<Assignment> out;
  for (const auto& s : starts)
    if (seen.try_emplace(s, 1).second) out.push_back(s);
  return out;
}

enum class StartStrategy { explicit_list, random, grid };

struct StartConfig {
  StartStrategy strategy = StartStrategy::random;
  std::size_t mu = 1;
  std::uint64_t seed = 0;
  std::vector<Assignment> list;  // explicit_list only
};

inline std::vector<Assignment> make_starts(int dims, int card, const StartConfig& cfg) {
  switch (cfg.strategy) {
    case StartStrategy::explicit_list:
      if (cfg.list.empty()) throw ConfigError("explicit start list is empty");
      for (const auto& s : cfg.list)
        if (s.dims() != dims || s.card() != card) throw ShapeError("start shape does not match instance");
      return cfg.list;
    case StartStrategy::random:
      if (cfg.mu < 1) throw ConfigError("mu must be >= 1");
      return make_random_starts(dims, card, cfg.mu, cfg.seed);
    case StartStrategy::grid:
      return make_grid_starts(dims, card);
  }
  return {};
}

struct SearchConfig {
  Neighborhood neighborhood = Neighborhood::vlsn();
  StartConfig starts;
  bool record_landscape = false;
  int jobs = 1;
};

struct SearchResult {
  Assignment best;
  Cost y = 0;
  std::size_t best_start = 0;
  std::vector<Assignment> starts;
  std::vector<DescentResult> runs;  // one per start, same order
  std::size_t lap_solves = 0;
  std::size_t moves = 0;
  std::optional<LandscapeGraph> landscape;  // trajectory graph when recorded
};

// Descends from every start; best is the minimum over sinks, ties going to
// the lower start index.
inline SearchResult multi_start(const CostArray& costs, const SearchConfig& cfg) {
  cfg.neighborhood.validate(costs.dims());
  SearchResult res;
  res.starts = make_starts(costs.dims(), costs.card(), cfg.starts);
  res.runs.resize(res.starts.size());
  const int workers = std::max(1, cfg.jobs);
  std::vector<std::optional<MoveEvaluator>> evals(static_cast<std::size_t>(workers));
  parallel_for(res.starts.size(), workers, [&](std::size_t i, std::size_t w) {
    if (!evals[w]) evals[w].emplace(costs, cfg.neighborhood);
    res.runs[i] = descend(*evals[w], res.starts[i]);
  });
  for (std::size_t i = 0; i < res.runs.size(); ++i) {
    const auto& run = res.runs[i];
    res.lap_solves += run.lap_solves;
    res.moves += run.moves();
    if (i == 0 || run.objective() < res.y) {
      res.y = run.objective();
      res.best = run.sink();
      res.best_start = i;
    }
  }
  if (cfg.record_landscape) {
    LandscapeGraph g(costs.dims(), costs.card());
    for (const auto& run : res.runs) {
      NodeId prev = 0;
      for (std::size_t t = 0; t < run.trajectory.size(); ++t) {
        const auto& p = run.trajectory[t];
        const auto id = g.insert(p.solution, p.objective).first;
        g.mark_expanded(id);
        if (t == 0)
          g.mark_source(id);
        else
          g.add_edge(prev, id);
        prev = id;
      }
    }
    res.landscape = std::move(g);
  }
  return res;
}

}  // namespace mapland
