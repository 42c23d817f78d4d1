#pragma once

// Structural check of the N = 2 move graphs: with dimensions 2..D the
// undirected move graph is the hypercube Q_{D-1} under the labeling
// bit (d-2) = "column d is the swap"; adding dimension 1 contributes exactly
// 2^(D-2) edges, each joining a label to its complement.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mapland/cost_array.hpp"
#include "mapland/landscape.hpp"
#include "mapland/projection.hpp"

namespace mapland {

struct HypercubeReport {
  int dims = 0;
  std::size_t vertices = 0;
  std::size_t cube_edges = 0;   // with dimensions 2..D
  std::size_t diagonals = 0;    // extra edges once dimension 1 is added
  bool labeling_bijective = false;
  bool is_hypercube = false;     // edge set == Q_{D-1} under the labeling
  bool regular = false;          // every vertex has degree D-1
  bool diagonals_antipodal = false;
  bool diagonal_count_ok = false;
  std::optional<bool> oriented_skeleton_ok;  // only when a cost array was given and is disjunctive
  std::vector<std::string> mismatches;

  bool passed() const {
    return labeling_bijective && is_hypercube && regular && diagonals_antipodal && diagonal_count_ok &&
           mismatches.empty() && oriented_skeleton_ok.value_or(true);
  }
};

inline std::uint32_t hypercube_label(const Assignment& a) {
  std::uint32_t label = 0;
  for (int d = 2; d <= a.dims(); ++d)
    if (a.at(d, 0) == 1) label |= 1u << (d - 2);
  return label;
}

namespace detail {

using LabelEdge = std::pair<std::uint32_t, std::uint32_t>;

inline LabelEdge undirected(std::uint32_t a, std::uint32_t b) { return a < b ? LabelEdge{a, b} : LabelEdge{b, a}; }

// Undirected move graph over all N = 2 solutions: every non-identity
// single-dimension move for d in [first_dim, D], through the same update
// rules the searches use.
inline std::set<LabelEdge> n2_move_graph(int dims, int first_dim) {
  std::set<LabelEdge> edges;
  const Permutation swap{1, 0};
  for_each_solution(dims, 2, [&](const Assignment& s) {
    for (int d = first_dim; d <= dims; ++d) {
      const auto t = apply_move_single(s, d, swap);
      if (t == s) continue;
      edges.insert(undirected(hypercube_label(s), hypercube_label(t)));
    }
  });
  return edges;
}

}  // namespace detail

inline HypercubeReport verify_hypercube(int dims, const CostArray* orient = nullptr) {
  HypercubeReport r;
  r.dims = dims;
  if (dims < 3) throw ConfigError("verify_hypercube needs D >= 3");
  if (dims - 1 > 24) throw CapExceededError("2^(D-1) vertices exceeds the verifier cap (D <= 25)");
  const std::uint32_t n_vertices = 1u << (dims - 1);
  const std::uint32_t all_ones = n_vertices - 1;

  std::set<std::uint32_t> labels;
  for_each_solution(dims, 2, [&](const Assignment& s) { labels.insert(hypercube_label(s)); });
  r.vertices = labels.size();
  r.labeling_bijective = labels.size() == n_vertices && count_solutions(dims, 2) == n_vertices;
  if (!r.labeling_bijective) r.mismatches.push_back("labeling is not a bijection onto {0,1}^(D-1)");

  const auto cube = detail::n2_move_graph(dims, 2);
  r.cube_edges = cube.size();
  std::set<detail::LabelEdge> expected;
  for (std::uint32_t x = 0; x < n_vertices; ++x)
    for (int b = 0; b < dims - 1; ++b) expected.insert(detail::undirected(x, x ^ (1u << b)));
  r.is_hypercube = cube == expected;
  if (!r.is_hypercube) {
    for (const auto& e : cube)
      if (!expected.count(e))
        r.mismatches.push_back("unexpected edge " + std::to_string(e.first) + "-" + std::to_string(e.second));
    for (const auto& e : expected)
      if (!cube.count(e)) r.mismatches.push_back("missing edge " + std::to_string(e.first) + "-" + std::to_string(e.second));
  }
  std::vector<int> degree(n_vertices, 0);
  for (const auto& [a, b] : cube) {
    ++degree[a];
    ++degree[b];
  }
  r.regular = std::all_of(degree.begin(), degree.end(), [&](int d) { return d == dims - 1; });
  if (!r.regular) r.mismatches.push_back("move graph over dims 2..D is not (D-1)-regular");

  const auto full = detail::n2_move_graph(dims, 1);
  std::vector<detail::LabelEdge> extra;
  for (const auto& e : full)
    if (!cube.count(e)) extra.push_back(e);
  for (const auto& e : cube)
    if (!full.count(e)) r.mismatches.push_back("adding dimension 1 removed an edge");
  r.diagonals = extra.size();
  r.diagonal_count_ok = extra.size() == n_vertices / 2;
  if (!r.diagonal_count_ok)
    r.mismatches.push_back("expected " + std::to_string(n_vertices / 2) + " diagonals, found " +
                           std::to_string(extra.size()));
  r.diagonals_antipodal = std::all_of(extra.begin(), extra.end(),
                                      [&](const detail::LabelEdge& e) { return (e.first ^ e.second) == all_ones; });
  if (!r.diagonals_antipodal) r.mismatches.push_back("a dimension-1 edge does not join antipodal labels");

  if (orient) {
    if (orient->dims() != dims || orient->card() != 2) throw ShapeError("orienting cost array must be N=2 with the same D");
    const auto g = enumerate_landscape(*orient, Neighborhood::vlsn_no_dim1());
    std::set<Cost> values;
    for (NodeId u = 0; u < g.node_count(); ++u) values.insert(g.objective(u));
    if (values.size() == g.node_count()) {
      std::set<detail::LabelEdge> skeleton;
      for (const auto& e : g.edges())
        skeleton.insert(detail::undirected(hypercube_label(g.node(e.from)), hypercube_label(g.node(e.to))));
      r.oriented_skeleton_ok = skeleton == expected;
      if (!*r.oriented_skeleton_ok) r.mismatches.push_back("oriented landscape skeleton differs from Q_{D-1}");
    }
  }
  return r;
}

}  // namespace mapland
