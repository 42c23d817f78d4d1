#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mapland/error.hpp"
#include "mapland/graph.hpp"
#include "mapland/landscape.hpp"

namespace mapland {

struct SinkRecord {
  NodeId sink = 0;
  Cost fitness = 0;
  std::optional<std::size_t> distance;  // edge count from the source; absent if unreachable
};

// One record per sink of g, with its BFS distance from source.
inline std::vector<SinkRecord> shortest_paths(const LandscapeGraph& g, NodeId source) {
  const auto dist = bfs_distances(g, source);
  std::vector<SinkRecord> out;
  for (auto id : g.sinks()) out.push_back({id, g.objective(id), dist[id]});
  return out;
}

// Pearson correlation between distance and fitness over the reachable
// records. nullopt means undefined: fewer than two points, or zero variance
// in either coordinate.
inline std::optional<double> fitness_distance_correlation(std::span<const SinkRecord> records) {
  std::vector<std::pair<long double, long double>> pts;
  for (const auto& r : records)
    if (r.distance) pts.emplace_back(static_cast<long double>(*r.distance), static_cast<long double>(r.fitness));
  if (pts.size() < 2) return std::nullopt;
  long double mx = 0, my = 0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= pts.size();
  my /= pts.size();
  long double sxx = 0, syy = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  const double rho = static_cast<double>(sxy / std::sqrt(sxx * syy));
  return std::clamp(rho, -1.0, 1.0);
}

// Summary of a batch of per-instance scalars. std uses the n-1 denominator;
// the interval is mean +/- 2*std of the values themselves, not a standard
// error interval.
struct BatchStats {
  std::size_t n = 0;
  double mean = std::numeric_limits<double>::quiet_NaN();
  double std = std::numeric_limits<double>::quiet_NaN();
  double lo = std::numeric_limits<double>::quiet_NaN();
  double hi = std::numeric_limits<double>::quiet_NaN();
  double min = std::numeric_limits<double>::quiet_NaN();
  double max = std::numeric_limits<double>::quiet_NaN();
  std::size_t excluded = 0;  // values dropped as undefined (e.g. 0 denominators)
};

inline BatchStats batch_stats(std::span<const double> values, std::size_t excluded = 0) {
  BatchStats s;
  s.n = values.size();
  s.excluded = excluded;
  if (values.empty()) return s;
  long double sum = 0;
  for (double v : values) sum += v;
  s.mean = static_cast<double>(sum / values.size());
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  // Rounding can push the mean a hair outside [min, max] for near-constant data.
  s.mean = std::clamp(s.mean, s.min, s.max);
  if (values.size() >= 2) {
    long double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = static_cast<double>(std::sqrt(ss / (values.size() - 1)));
    s.lo = s.mean - 2 * s.std;
    s.hi = s.mean + 2 * s.std;
  }
  return s;
}

// Result of one algorithm on one instance from one start.
struct RunOutcome {
  std::size_t instance_id = 0;
  Cost y = 0;
  std::optional<std::int64_t> nodes;  // landscape nodes explored (nu)
  std::optional<std::int64_t> sinks;  // local minima found (mu)
};

struct InstanceDelta {
  std::size_t instance_id = 0;
  Cost dy = 0;  // y2 - y1
  std::optional<std::int64_t> dnu;
  std::optional<std::int64_t> dmu;
  std::optional<double> dy_dnu;  // undefined when dnu is 0 or missing
  std::optional<double> dy_dmu;
};

struct Comparison {
  std::vector<InstanceDelta> per_instance;
  BatchStats dy, dnu, dmu, dy_dnu, dy_dmu;
};

// A2 minus A1 per instance, then batch statistics. Both inputs must cover
// the same instances in the same order.
inline Comparison compare_algorithms(std::span<const RunOutcome> a1, std::span<const RunOutcome> a2) {
  if (a1.size() != a2.size()) throw ValueError("compare_algorithms: batches differ in size");
  Comparison c;
  std::vector<double> dy, dnu, dmu, rnu, rmu;
  std::size_t excl_dnu = 0, excl_dmu = 0, excl_rnu = 0, excl_rmu = 0;
  for (std::size_t i = 0; i < a1.size(); ++i) {
    if (a1[i].instance_id != a2[i].instance_id)
      throw ValueError("compare_algorithms: instance " + std::to_string(a1[i].instance_id) + " paired with " +
                       std::to_string(a2[i].instance_id));
    InstanceDelta d;
    d.instance_id = a1[i].instance_id;
    d.dy = a2[i].y - a1[i].y;
    dy.push_back(static_cast<double>(d.dy));
    if (a1[i].nodes && a2[i].nodes) {
      d.dnu = *a2[i].nodes - *a1[i].nodes;
      dnu.push_back(static_cast<double>(*d.dnu));
    } else {
      ++excl_dnu;
    }
    if (a1[i].sinks && a2[i].sinks) {
      d.dmu = *a2[i].sinks - *a1[i].sinks;
      dmu.push_back(static_cast<double>(*d.dmu));
    } else {
      ++excl_dmu;
    }
    if (d.dnu && *d.dnu != 0) {
      d.dy_dnu = static_cast<double>(d.dy) / static_cast<double>(*d.dnu);
      rnu.push_back(*d.dy_dnu);
    } else {
      ++excl_rnu;
    }
    if (d.dmu && *d.dmu != 0) {
      d.dy_dmu = static_cast<double>(d.dy) / static_cast<double>(*d.dmu);
      rmu.push_back(*d.dy_dmu);
    } else {
      ++excl_rmu;
    }
    c.per_instance.push_back(d);
  }
  c.dy = batch_stats(dy);
  c.dnu = batch_stats(dnu, excl_dnu);
  c.dmu = batch_stats(dmu, excl_dmu);
  c.dy_dnu = batch_stats(rnu, excl_rnu);
  c.dy_dmu = batch_stats(rmu, excl_rmu);
  return c;
}

}  // namespace mapland
