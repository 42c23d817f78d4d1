#pragma once

#include <algorithm>
#include <deque>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mapland/cost_array.hpp"
#include "mapland/error.hpp"
#include "mapland/graph.hpp"
#include "mapland/parallel.hpp"
#include "mapland/search.hpp"

namespace mapland {

struct ExploreOptions {
  std::size_t node_cap = 5'000'000;
  std::size_t edge_cap = 50'000'000;
  int jobs = 1;
  std::size_t chunk = 2048;  // nodes expanded per parallel batch
};

// Thrown when an exploration cap is hit; carries the graph built so far.
class PartialExplorationError : public CapExceededError {
 public:
  PartialExplorationError(const std::string& what, LandscapeGraph partial)
      : CapExceededError(what), partial_(std::make_shared<LandscapeGraph>(std::move(partial))) {}
  const LandscapeGraph& partial() const { return *partial_; }

 private:
  std::shared_ptr<LandscapeGraph> partial_;
};

namespace detail {

struct Improvement {
  Assignment target;
  Cost value;
  std::size_t scope;  // alias of the scope that produced it
};

// Improving LAP-optimal neighbours of s, one per scope, duplicates removed
// (first scope wins). Scopes equivalent to `skip` are not evaluated.
inline void improving_neighbors(MoveEvaluator& eval, const Assignment& s, Cost fs, std::vector<Candidate>& scratch,
                                std::vector<Improvement>& out, std::size_t skip = MoveEvaluator::kNone) {
  out.clear();
  eval.evaluate(s, scratch, skip);
  for (const auto& c : scratch) {
    if (c.lap.value >= fs) continue;
    auto t = eval.apply(s, c);
    bool dup = false;
    for (const auto& o : out)
      if (o.target == t) dup = true;
    if (!dup) out.push_back({std::move(t), c.lap.value, eval.alias(c.scope)});
  }
}

}  // namespace detail

// Breadth-first expansion of every improving LAP-optimal move from the
// starts. Node ids are discovery order, which is also expansion order, so the
// result does not depend on `jobs`.
inline LandscapeGraph explore(const CostArray& costs, const std::vector<Assignment>& starts, const Neighborhood& nb,
                              const ExploreOptions& opt = {}) {
  if (starts.empty()) throw ConfigError("explore needs at least one start");
  nb.validate(costs.dims());
  LandscapeGraph g(costs.dims(), costs.card());
  for (const auto& s : starts) {
    check_same_shape(costs, s);
    g.mark_source(g.insert(s, evaluate(costs, s)).first);
  }
  if (g.node_count() > opt.node_cap) throw PartialExplorationError("node cap exceeded by starts", std::move(g));

  const int workers = std::max(1, opt.jobs);
  std::vector<std::optional<MoveEvaluator>> evals(static_cast<std::size_t>(workers));
  std::vector<std::vector<Candidate>> scratch(static_cast<std::size_t>(workers));
  std::vector<std::vector<detail::Improvement>> found;
  // Scope each node was first reached through; its neighbourhood holds
  // nothing better than the node itself.
  std::vector<std::size_t> arrival(g.node_count(), MoveEvaluator::kNone);

  std::size_t next = 0;
  while (next < g.node_count()) {
    const std::size_t end = std::min(g.node_count(), next + std::max<std::size_t>(1, opt.chunk));
    found.resize(end - next);
    parallel_for(end - next, workers, [&](std::size_t k, std::size_t w) {
      if (!evals[w]) evals[w].emplace(costs, nb);
      const auto id = static_cast<NodeId>(next + k);
      detail::improving_neighbors(*evals[w], g.node(id), g.objective(id), scratch[w], found[k], arrival[id]);
    });
    for (std::size_t k = 0; k < end - next; ++k) {
      const auto u = static_cast<NodeId>(next + k);
      for (auto& imp : found[k]) {
        const auto [v, fresh] = g.insert(imp.target, imp.value);
        if (fresh) arrival.push_back(imp.scope);
        g.add_edge(u, v);
      }
      g.mark_expanded(u);
      if (g.node_count() > opt.node_cap)
        throw PartialExplorationError("node cap " + std::to_string(opt.node_cap) + " exceeded", std::move(g));
      if (g.edge_count() > opt.edge_cap)
        throw PartialExplorationError("edge cap " + std::to_string(opt.edge_cap) + " exceeded", std::move(g));
    }
    next = end;
  }
  return g;
}

// Full landscape over every feasible solution. Nodes are in enumeration
// order; the roots (in-degree 0) are recorded as sources.
inline LandscapeGraph enumerate_landscape(const CostArray& costs, const Neighborhood& nb,
                                          std::uint64_t cap = kDefaultEnumerationCap) {
  nb.validate(costs.dims());
  LandscapeGraph g(costs.dims(), costs.card());
  for_each_solution(
      costs.dims(), costs.card(), [&](const Assignment& a) { g.insert(a, evaluate(costs, a)); }, cap);
  MoveEvaluator eval(costs, nb);
  std::vector<Candidate> scratch;
  std::vector<detail::Improvement> found;
  std::vector<char> has_in(g.node_count(), 0);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    detail::improving_neighbors(eval, g.node(u), g.objective(u), scratch, found);
    for (const auto& imp : found) {
      const auto v = g.find(imp.target);
      if (!v) throw ValueError("move left the enumerated solution set");
      g.add_edge(u, *v);
      has_in[*v] = 1;
    }
    g.mark_expanded(u);
  }
  for (NodeId u = 0; u < g.node_count(); ++u)
    if (!has_in[u]) g.mark_source(u);
  return g;
}

// Node with the smallest objective, lowest id on ties.
inline NodeId best_node(const LandscapeGraph& g) {
  if (g.node_count() == 0) throw ValueError("empty landscape graph");
  NodeId best = 0;
  for (NodeId u = 1; u < g.node_count(); ++u)
    if (g.objective(u) < g.objective(best)) best = u;
  return best;
}

// Kahn's algorithm.
inline bool is_acyclic(const LandscapeGraph& g) {
  std::vector<std::size_t> indeg(g.node_count(), 0);
  for (const auto& e : g.edges()) ++indeg[e.to];
  std::vector<NodeId> stack;
  for (NodeId u = 0; u < g.node_count(); ++u)
    if (!indeg[u]) stack.push_back(u);
  std::size_t seen = 0;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    ++seen;
    for (auto v : g.successors(u))
      if (--indeg[v] == 0) stack.push_back(v);
  }
  return seen == g.node_count();
}

// Unit-length BFS distances from source; nullopt where unreachable.
inline std::vector<std::optional<std::size_t>> bfs_distances(const LandscapeGraph& g, NodeId source) {
  if (source >= g.node_count()) throw ValueError("source not in graph");
  std::vector<std::optional<std::size_t>> dist(g.node_count());
  std::deque<NodeId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (auto v : g.successors(u)) {
      if (dist[v]) continue;
      dist[v] = *dist[u] + 1;
      queue.push_back(v);
    }
  }
  return dist;
}

struct SinkSummary {
  NodeId id;
  Cost objective;
  std::optional<std::size_t> distance;  // from the designated source
};

struct GraphStats {
  std::size_t n_nodes = 0;
  std::size_t n_edges = 0;
  std::size_t n_sources = 0;
  std::size_t n_sinks = 0;
  std::optional<NodeId> designated_source;
  std::vector<SinkSummary> sinks;
};

// Counts plus per-sink objective and distance from `source` (defaults to the
// first recorded source).
inline GraphStats summarize(const LandscapeGraph& g, std::optional<NodeId> source = std::nullopt) {
  GraphStats st;
  st.n_nodes = g.node_count();
  st.n_edges = g.edge_count();
  const auto sources = g.sources();
  st.n_sources = sources.size();
  if (!source && !sources.empty()) source = sources.front();
  st.designated_source = source;
  std::vector<std::optional<std::size_t>> dist;
  if (source) dist = bfs_distances(g, *source);
  for (auto id : g.sinks()) st.sinks.push_back({id, g.objective(id), source ? dist[id] : std::nullopt});
  st.n_sinks = st.sinks.size();
  return st;
}

inline nlohmann::json to_json(const GraphStats& st) {
  nlohmann::json j;
  j["n_nodes"] = st.n_nodes;
  j["n_edges"] = st.n_edges;
  j["n_sources"] = st.n_sources;
  j["n_sinks"] = st.n_sinks;
  j["designated_source"] = st.designated_source ? nlohmann::json(*st.designated_source) : nlohmann::json(nullptr);
  auto& sinks = j["sinks"] = nlohmann::json::array();
  for (const auto& s : st.sinks)
    sinks.push_back({{"id", s.id},
                     {"objective", s.objective},
                     {"distance", s.distance ? nlohmann::json(*s.distance) : nlohmann::json(nullptr)}});
  return j;
}

// Export as <prefix>.edges.txt ("u v weight" per line), <prefix>.nodes.txt
// ("id objective is_source is_sink encoding" per line) and
// <prefix>.summary.json.
inline void write_graph(const LandscapeGraph& g, const std::string& prefix) {
  {
    std::ofstream out(prefix + ".edges.txt", std::ios::trunc);
    if (!out) throw IoError("cannot write " + prefix + ".edges.txt");
    for (const auto& e : g.edges()) out << e.from << ' ' << e.to << ' ' << e.weight << '\n';
  }
  {
    std::ofstream out(prefix + ".nodes.txt", std::ios::trunc);
    if (!out) throw IoError("cannot write " + prefix + ".nodes.txt");
    for (NodeId u = 0; u < g.node_count(); ++u)
      out << u << ' ' << g.objective(u) << ' ' << (g.is_source(u) ? 1 : 0) << ' ' << (g.is_sink(u) ? 1 : 0) << ' '
          << g.node(u).encode() << '\n';
  }
  std::ofstream out(prefix + ".summary.json", std::ios::trunc);
  if (!out) throw IoError("cannot write " + prefix + ".summary.json");
  auto j = to_json(summarize(g));
  j["D"] = g.dims();
  j["N"] = g.card();
  out << j.dump(2) << '\n';
}

// Inverse of write_graph (the summary file is not needed).
inline LandscapeGraph read_graph(const std::string& prefix) {
  std::ifstream nodes(prefix + ".nodes.txt");
  if (!nodes) throw IoError("cannot open " + prefix + ".nodes.txt");
  std::vector<std::tuple<Assignment, Cost, bool, bool>> rows;
  std::string line;
  while (std::getline(nodes, line)) {
    if (line.empty()) continue;
    std::istringstream in(line);
    std::size_t id = 0;
    Cost f = 0;
    int src = 0, sink = 0;
    std::string enc;
    if (!(in >> id >> f >> src >> sink >> enc)) throw FormatError("bad node line: " + line);
    if (id != rows.size()) throw FormatError("node ids must be dense and ordered");
    rows.emplace_back(Assignment::decode(enc), f, src != 0, sink != 0);
  }
  if (rows.empty()) throw FormatError("graph has no nodes");
  const auto& first = std::get<0>(rows.front());
  LandscapeGraph g(first.dims(), first.card());
  for (const auto& [a, f, src, sink] : rows) {
    const auto [id, fresh] = g.insert(a, f);
    if (!fresh) throw FormatError("duplicate node " + a.encode());
    if (src) g.mark_source(id);
  }
  std::ifstream edges(prefix + ".edges.txt");
  if (!edges) throw IoError("cannot open " + prefix + ".edges.txt");
  while (std::getline(edges, line)) {
    if (line.empty()) continue;
    std::istringstream in(line);
    std::size_t u = 0, v = 0;
    Cost w = 0;
    if (!(in >> u >> v >> w)) throw FormatError("bad edge line: " + line);
    if (u >= g.node_count() || v >= g.node_count()) throw FormatError("edge references unknown node");
    g.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));
    if (g.edges().back().weight != w) throw FormatError("edge weight disagrees with node objectives");
  }
  // Nodes with outgoing edges were expanded; zero out-degree nodes only if
  // flagged as sinks.
  for (NodeId u = 0; u < g.node_count(); ++u)
    if (g.out_degree(u) > 0 || std::get<3>(rows[u])) g.mark_expanded(u);
  return g;
}

}  // namespace mapland
