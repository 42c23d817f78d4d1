#include "commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_support.hpp"
#include "json.hpp"
#include "mapland/mapland.hpp"

namespace mapland::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ------------------------------------------------------------- instances

struct InstanceRef {
  std::size_t id = 0;
  std::uint64_t seed = 0;
  std::optional<fs::path> path;
};

struct LoadedInstance {
  CostArray costs;
  std::uint64_t seed;
};

std::vector<InstanceRef> list_instances(const Options& o) {
  std::vector<InstanceRef> refs;
  if (!o.instance.empty()) {
    refs.push_back({0, 0, fs::path(o.instance)});
  } else if (!o.batch.empty()) {
    std::vector<fs::path> files;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(o.batch, ec))
      if (entry.path().extension() == ".mapc") files.push_back(entry.path());
    if (ec) throw IoError("cannot list batch directory " + o.batch + ": " + ec.message());
    if (files.empty()) throw IoError("no .mapc instances in " + o.batch);
    std::sort(files.begin(), files.end());
    for (std::size_t i = 0; i < files.size(); ++i) refs.push_back({i, 0, files[i]});
  } else {
    check_memory(o.dims, o.card, o.max_bytes);
    if (o.low > o.high) throw ConfigError("--low must not exceed --high");
    for (std::size_t i = 0; i < o.count; ++i) refs.push_back({i, o.seed + i, std::nullopt});
  }
  return refs;
}

fs::path cache_path(const fs::path& dir, const InstanceSpec& s) {
  return dir / ("D" + std::to_string(s.dims) + "_N" + std::to_string(s.card) + "_s" + std::to_string(s.seed) + "_l" +
                std::to_string(s.low) + "_h" + std::to_string(s.high) + ".mapc");
}

// Generated instances are cached under MAPLAND_CACHE_DIR when it is set.
CostArray cached_generate(const InstanceSpec& spec) {
  const char* dir = std::getenv("MAPLAND_CACHE_DIR");
  if (!dir || !*dir) return generate(spec);
  const auto path = cache_path(dir, spec);
  if (fs::exists(path)) {
    try {
      auto parsed = read_instance_with_seed(path);
      if (parsed.seed == spec.seed && parsed.costs.dims() == spec.dims && parsed.costs.card() == spec.card)
        return std::move(parsed.costs);
    } catch (const FormatError&) {
      // fall through and regenerate
    }
  }
  auto costs = generate(spec);
  std::error_code ec;
  fs::create_directories(dir, ec);
  const auto tmp = path.string() + ".tmp" + std::to_string(spec.seed);
  {
    const auto bytes = serialize_instance(costs, spec.seed);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return costs;  // an unwritable cache is not an error
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  fs::rename(tmp, path, ec);
  return costs;
}

LoadedInstance load(const InstanceRef& ref, const Options& o) {
  if (ref.path) {
    auto parsed = read_instance_with_seed(*ref.path);
    return {std::move(parsed.costs), parsed.seed};
  }
  return {cached_generate({o.dims, o.card, ref.seed, o.low, o.high}), ref.seed};
}

// ------------------------------------------------------------- starts

std::vector<Assignment> read_starts_file(const std::string& path, int dims, int card) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open starts file " + path);
  std::vector<Assignment> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto a = Assignment::decode(line);
    if (a.dims() != dims || a.card() != card)
      throw ShapeError("start '" + line + "' does not match instance shape D=" + std::to_string(dims) +
                       " N=" + std::to_string(card));
    out.push_back(std::move(a));
  }
  if (out.empty()) throw ConfigError("starts file " + path + " holds no assignments");
  return out;
}

std::uint64_t start_seed(std::uint64_t instance_seed) { return derive_seed(instance_seed, 1); }

// Random starts are deduplicated, so the source count can fall below mu.
std::vector<Assignment> make_instance_starts(const Options& o, const CostArray& c, std::uint64_t instance_seed) {
  if (o.starts == "random") {
    if (o.mu < 1) throw ConfigError("--mu must be >= 1");
    return dedup_starts(make_random_starts(c.dims(), c.card(), o.mu, start_seed(instance_seed)));
  }
  if (o.starts == "grid") return make_grid_starts(c.dims(), c.card());
  if (o.starts == "file") {
    if (o.starts_file.empty()) throw ConfigError("--starts file needs --starts-file");
    return dedup_starts(read_starts_file(o.starts_file, c.dims(), c.card()));
  }
  throw ConfigError("unknown start strategy '" + o.starts + "' (expected random, grid, file)");
}

// ------------------------------------------------------------- runs

struct RunRecord {
  std::size_t id = 0;
  int dims = 0;
  int card = 0;
  std::uint64_t seed = 0;
  std::string algo;
  Cost y = 0;  // best objective anywhere in the recorded landscape
  Assignment best;
  Cost descent_y = 0;  // best sink reached by steepest descent from the starts
  std::size_t moves = 0;
  std::size_t lap_solves = 0;
  std::size_t starts = 0;
  GraphStats stats;
  std::optional<double> rho;
  double wall_ms = 0;
  std::optional<LandscapeGraph> graph;
};

RunRecord run_one(const Options& o, const CostArray& c, std::size_t id, std::uint64_t seed,
                  const std::vector<Assignment>& starts, const Neighborhood& nb, int jobs, bool keep_graph) {
  Stopwatch clock;
  RunRecord r;
  r.id = id;
  r.dims = c.dims();
  r.card = c.card();
  r.seed = seed;
  r.algo = nb.name();
  SearchConfig cfg;
  cfg.neighborhood = nb;
  cfg.starts.strategy = StartStrategy::explicit_list;
  cfg.starts.list = starts;
  cfg.record_landscape = o.no_landscape;
  cfg.jobs = jobs;
  auto res = multi_start(c, cfg);
  r.descent_y = res.y;
  r.moves = res.moves;
  r.lap_solves = res.lap_solves;
  r.starts = starts.size();
  LandscapeGraph g;
  if (o.no_landscape) {
    g = std::move(*res.landscape);
  } else {
    ExploreOptions opt;
    opt.node_cap = o.node_cap;
    opt.jobs = jobs;
    try {
      g = explore(c, starts, nb, opt);
    } catch (const PartialExplorationError& e) {
      throw CapExceededError("instance " + std::to_string(id) + ", " + nb.name() + ": " + e.what() +
                             " (raise --node-cap or pass --no-landscape)");
    }
  }
  // Both graph constructions contain the descent paths, so the landscape
  // best is never worse than the descent result.
  const auto top = best_node(g);
  r.y = g.objective(top);
  r.best = g.node(top);
  // Node 0 is the first start in both graph constructions.
  r.stats = summarize(g, NodeId{0});
  std::vector<SinkRecord> recs;
  for (const auto& s : r.stats.sinks) recs.push_back({s.id, s.objective, s.distance});
  r.rho = fitness_distance_correlation(recs);
  if (keep_graph) r.graph = std::move(g);
  r.wall_ms = clock.ms();
  return r;
}

// Orders are validated per instance, once D is known.
std::vector<Neighborhood> parse_algos(const Options& o) {
  std::vector<Neighborhood> out;
  const std::vector<std::string> names = o.algos.empty() ? std::vector<std::string>{"vlsn"} : o.algos;
  for (const auto& n : names) out.push_back(Neighborhood::parse(n));
  return out;
}

struct Batch {
  std::vector<InstanceRef> refs;
  std::vector<std::uint64_t> seeds;              // per instance, as loaded
  std::vector<std::vector<RunRecord>> records;   // [instance][algo], algos in argument order
};

// Instances run in parallel; a single instance gets the jobs internally.
Batch run_batch(const Options& o, const std::vector<Neighborhood>& algos, bool keep_graph) {
  Batch b;
  b.refs = list_instances(o);
  b.seeds.resize(b.refs.size());
  b.records.resize(b.refs.size());
  const bool single = b.refs.size() == 1;
  parallel_for(b.refs.size(), single ? 1 : o.jobs, [&](std::size_t i, std::size_t) {
    const auto inst = load(b.refs[i], o);
    b.seeds[i] = inst.seed;
    for (const auto& nb : algos) nb.validate(inst.costs.dims());
    const auto starts = make_instance_starts(o, inst.costs, inst.seed);
    for (const auto& nb : algos)
      b.records[i].push_back(run_one(o, inst.costs, i, inst.seed, starts, nb, single ? o.jobs : 1, keep_graph));
  });
  return b;
}

// Row order: instance index, then algorithm name.
std::vector<const RunRecord*> ordered(const Batch& b) {
  std::vector<const RunRecord*> out;
  for (const auto& per : b.records) {
    std::vector<const RunRecord*> row;
    for (const auto& r : per) row.push_back(&r);
    std::stable_sort(row.begin(), row.end(), [](const RunRecord* a, const RunRecord* c) { return a->algo < c->algo; });
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

std::string runs_csv(const Batch& b, bool timing) {
  CsvWriter csv({"instance_id", "D", "N", "seed", "algo", "y", "nodes", "edges", "sinks", "sources", "lap_solves",
                 "wall_ms"});
  for (const auto* r : ordered(b))
    csv.row({std::to_string(r->id), std::to_string(r->dims), std::to_string(r->card), std::to_string(r->seed), r->algo,
             std::to_string(r->y), std::to_string(r->stats.n_nodes), std::to_string(r->stats.n_edges),
             std::to_string(r->stats.n_sinks), std::to_string(r->stats.n_sources), std::to_string(r->lap_solves),
             timing ? fmt(r->wall_ms) : std::string()});
  return csv.text();
}

std::string sinks_csv(const Batch& b) {
  CsvWriter csv({"instance_id", "algo", "sink_id", "fitness", "distance"});
  for (const auto* r : ordered(b))
    for (const auto& s : r->stats.sinks)
      csv.row({std::to_string(r->id), r->algo, std::to_string(s.id), std::to_string(s.objective), fmt_opt(s.distance)});
  return csv.text();
}

const std::vector<std::string> kSummaryHeader{"scope", "metric", "n",   "mean", "std",
                                              "ci_lo", "ci_hi",  "min", "max",  "excluded"};

void summary_row(CsvWriter& csv, const std::string& scope, const std::string& metric, const BatchStats& s) {
  csv.row({scope, metric, std::to_string(s.n), fmt(s.mean), fmt(s.std), fmt(s.lo), fmt(s.hi), fmt(s.min), fmt(s.max),
           std::to_string(s.excluded)});
}

// Per-algorithm batch statistics of the per-instance columns.
void per_algo_summary(CsvWriter& csv, const Batch& b, const std::vector<Neighborhood>& algos) {
  std::vector<std::size_t> order(algos.size());
  for (std::size_t a = 0; a < order.size(); ++a) order[a] = a;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return algos[x].name() < algos[y].name(); });
  for (auto a : order) {
    std::map<std::string, std::vector<double>> cols;
    for (const auto& per : b.records) {
      const auto& r = per[a];
      cols["y"].push_back(static_cast<double>(r.y));
      cols["nodes"].push_back(static_cast<double>(r.stats.n_nodes));
      cols["edges"].push_back(static_cast<double>(r.stats.n_edges));
      cols["sinks"].push_back(static_cast<double>(r.stats.n_sinks));
      cols["sources"].push_back(static_cast<double>(r.stats.n_sources));
      cols["lap_solves"].push_back(static_cast<double>(r.lap_solves));
    }
    for (const char* m : {"y", "nodes", "edges", "sinks", "sources", "lap_solves"})
      summary_row(csv, algos[a].name(), m, batch_stats(cols[m]));
  }
}

// ------------------------------------------------------------- manifest

json config_json(const Options& o) {
  return {{"dims", o.dims},
          {"card", o.card},
          {"count", o.count},
          {"seed", o.seed},
          {"low", o.low},
          {"high", o.high},
          {"algos", o.algos},
          {"starts", o.starts},
          {"starts_file", o.starts_file},
          {"mu", o.mu},
          {"jobs", o.jobs},
          {"node_cap", o.node_cap},
          {"out", o.out},
          {"instance", o.instance},
          {"batch", o.batch},
          {"graph", o.graph},
          {"dims_range", o.dims_range},
          {"max_bytes", o.max_bytes},
          {"no_landscape", o.no_landscape},
          {"check_optimum", o.check_optimum},
          {"export_landscape", o.export_landscape},
          {"timing", o.timing}};
}

void write_manifest(OutputDir& dir, const Options& o, const std::vector<std::string>& argv, const json& seeds,
                    const Stopwatch& clock, const json& extra = json::object()) {
  json m;
  m["tool"] = "mapland";
  m["version"] = kVersion;
  m["command"] = o.command;
  m["argv"] = argv;
  m["config"] = config_json(o);
  m["seeds"] = seeds;
  m["generator"] = kGeneratorName;
  m["outputs"] = dir.files();
  m["timing"] = {{"wall_ms", clock.ms()}};
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  std::ofstream out(dir.root() / "manifest.json", std::ios::trunc);
  if (!out) throw IoError("cannot write manifest in " + dir.root().string());
  out << m.dump(2) << '\n';
}

json batch_seeds(const Options& o, const Batch& b) {
  json inst = json::array();
  for (std::size_t i = 0; i < b.refs.size(); ++i) {
    json e{{"instance_id", i}, {"seed", b.seeds[i]}, {"start_seed", start_seed(b.seeds[i])}};
    if (b.refs[i].path) e["file"] = b.refs[i].path->string();
    inst.push_back(e);
  }
  return {{"base", o.seed}, {"instances", inst}};
}

std::string file_algo(const std::string& name) {
  std::string s = name;
  std::replace(s.begin(), s.end(), ':', '-');
  return s;
}

std::string instance_tag(std::size_t id) {
  std::ostringstream s;
  s << "inst_" << std::setw(4) << std::setfill('0') << id;
  return s.str();
}

void require_out(const Options& o) {
  if (o.out.empty()) throw ConfigError(o.command + " needs --out DIR");
}

// ------------------------------------------------------------- commands

int cmd_generate(const Options& o, const std::vector<std::string>& argv) {
  require_out(o);
  Stopwatch clock;
  if (o.low > o.high) throw ConfigError("--low must not exceed --high");
  check_memory(o.dims, o.card, o.max_bytes);
  OutputDir dir(o.out);
  json seeds = json::array();
  for (std::size_t i = 0; i < o.count; ++i) {
    const InstanceSpec spec{o.dims, o.card, o.seed + i, o.low, o.high};
    const auto name = instance_tag(i) + ".mapc";
    write_instance(cached_generate(spec), dir.root() / name, spec);
    dir.record(name);
    dir.record(instance_tag(i) + ".json");
    seeds.push_back(spec.seed);
  }
  write_manifest(dir, o, argv, {{"base", o.seed}, {"instances", seeds}}, clock);
  std::cout << "generated " << o.count << " instance(s) D=" << o.dims << " N=" << o.card << " in " << o.out << '\n';
  return kOk;
}

void print_record(const RunRecord& r) {
  std::cout << "instance=" << r.id << " algo=" << r.algo << " y=" << r.y << " descent_y=" << r.descent_y << " moves=" << r.moves
            << " lap_solves=" << r.lap_solves << " starts=" << r.starts << " nodes=" << r.stats.n_nodes
            << " edges=" << r.stats.n_edges << " sinks=" << r.stats.n_sinks << " best=" << r.best.encode() << '\n';
}

// solve and explore share this path; explore always exports the graph.
int cmd_solve(const Options& o, const std::vector<std::string>& argv, bool explore_mode) {
  Stopwatch clock;
  if (explore_mode) require_out(o);
  const auto algos = parse_algos(o);
  const bool export_graph = explore_mode || o.export_landscape;
  if (export_graph) require_out(o);
  const auto b = run_batch(o, algos, export_graph);
  for (const auto* r : ordered(b)) print_record(*r);

  json checks = json::array();
  if (o.check_optimum) {
    for (std::size_t i = 0; i < b.refs.size(); ++i) {
      const auto inst = load(b.refs[i], o);
      Cost opt = 0;
      bool first = true;
      for_each_solution(inst.costs.dims(), inst.costs.card(), [&](const Assignment& a) {
        const Cost v = evaluate(inst.costs, a);
        if (first || v < opt) opt = v;
        first = false;
      });
      for (const auto& r : b.records[i]) {
        const bool reached = r.y == opt;
        std::cout << "instance=" << i << " algo=" << r.algo << " optimum=" << opt
                  << " reached=" << (reached ? "yes" : "no") << '\n';
        checks.push_back({{"instance_id", i}, {"algo", r.algo}, {"optimum", opt}, {"reached", reached}});
      }
    }
  }

  if (o.out.empty()) return kOk;
  OutputDir dir(o.out);
  dir.write("runs.csv", runs_csv(b, o.timing));
  dir.write("sinks.csv", sinks_csv(b));
  if (export_graph) {
    for (const auto* r : ordered(b)) {
      const auto prefix = instance_tag(r->id) + "_" + file_algo(r->algo);
      write_graph(*r->graph, (dir.root() / prefix).string());
      for (const char* ext : {".edges.txt", ".nodes.txt", ".summary.json"}) dir.record(prefix + ext);
    }
  }
  json extra = json::object();
  if (o.check_optimum) extra["optimum_checks"] = checks;
  write_manifest(dir, o, argv, batch_seeds(o, b), clock, extra);
  return kOk;
}

int cmd_compare(const Options& o, const std::vector<std::string>& argv) {
  require_out(o);
  Stopwatch clock;
  if (o.algos.size() != 2) throw ConfigError("compare needs exactly two --algo values (A1 then A2)");
  const auto algos = parse_algos(o);
  const auto b = run_batch(o, algos, false);

  std::vector<RunOutcome> a1, a2;
  for (const auto& per : b.records) {
    auto outcome = [](const RunRecord& r) {
      return RunOutcome{r.id, r.y, static_cast<std::int64_t>(r.stats.n_nodes),
                        static_cast<std::int64_t>(r.stats.n_sinks)};
    };
    a1.push_back(outcome(per[0]));
    a2.push_back(outcome(per[1]));
  }
  const auto cmp = compare_algorithms(a1, a2);

  CsvWriter summary(kSummaryHeader);
  per_algo_summary(summary, b, algos);
  const auto scope = algos[1].name() + " - " + algos[0].name();
  summary_row(summary, scope, "dy", cmp.dy);
  summary_row(summary, scope, "dnu", cmp.dnu);
  summary_row(summary, scope, "dmu", cmp.dmu);
  summary_row(summary, scope, "dy_dnu", cmp.dy_dnu);
  summary_row(summary, scope, "dy_dmu", cmp.dy_dmu);

  CsvWriter deltas({"instance_id", "dy", "dnu", "dmu", "dy_dnu", "dy_dmu"});
  for (const auto& d : cmp.per_instance)
    deltas.row({std::to_string(d.instance_id), std::to_string(d.dy), fmt_opt(d.dnu), fmt_opt(d.dmu), fmt(d.dy_dnu),
                fmt(d.dy_dmu)});

  OutputDir dir(o.out);
  dir.write("runs.csv", runs_csv(b, o.timing));
  dir.write("sinks.csv", sinks_csv(b));
  dir.write("deltas.csv", deltas.text());
  dir.write("summary.csv", summary.text());
  write_manifest(dir, o, argv, batch_seeds(o, b), clock);

  std::cout << scope << ": instances=" << cmp.dy.n << " mean_dy=" << fmt(cmp.dy.mean) << " std_dy=" << fmt(cmp.dy.std)
            << " ci=[" << fmt(cmp.dy.lo) << "," << fmt(cmp.dy.hi) << "]\n";
  return kOk;
}

int cmd_multistart(const Options& o, const std::vector<std::string>& argv) {
  require_out(o);
  Stopwatch clock;
  const auto algos = parse_algos(o);
  const auto b = run_batch(o, algos, false);
  CsvWriter summary(kSummaryHeader);
  per_algo_summary(summary, b, algos);
  OutputDir dir(o.out);
  dir.write("runs.csv", runs_csv(b, o.timing));
  dir.write("sinks.csv", sinks_csv(b));
  dir.write("summary.csv", summary.text());
  write_manifest(dir, o, argv, batch_seeds(o, b), clock);
  for (const auto* r : ordered(b))
    std::cout << "instance=" << r->id << " algo=" << r->algo << " strategy=" << o.starts << " sources=" << r->stats.n_sources
              << " y=" << r->y << " nodes=" << r->stats.n_nodes << " sinks=" << r->stats.n_sinks << '\n';
  return kOk;
}

int cmd_analyze_fdc(const Options& o, const std::vector<std::string>& argv) {
  Stopwatch clock;
  if (!o.graph.empty()) {
    const auto g = read_graph(o.graph);
    const auto st = summarize(g);
    std::vector<SinkRecord> recs;
    for (const auto& s : st.sinks) recs.push_back({s.id, s.objective, s.distance});
    const auto rho = fitness_distance_correlation(recs);
    std::cout << "graph=" << o.graph << " sinks=" << st.n_sinks << " rho=" << (rho ? fmt(*rho) : "undefined") << '\n';
    if (!o.out.empty()) {
      OutputDir dir(o.out);
      CsvWriter csv({"sink_id", "fitness", "distance"});
      for (const auto& s : st.sinks) csv.row({std::to_string(s.id), std::to_string(s.objective), fmt_opt(s.distance)});
      dir.write("sinks.csv", csv.text());
      write_manifest(dir, o, argv, json::object(), clock, {{"rho", rho ? json(*rho) : json(nullptr)}});
    }
    return kOk;
  }

  const auto algos = parse_algos(o);
  const auto b = run_batch(o, algos, false);
  CsvWriter fdc({"instance_id", "D", "N", "algo", "sinks", "reachable_sinks", "rho"});
  std::map<std::string, std::pair<std::vector<double>, std::size_t>> per_algo;
  for (const auto* r : ordered(b)) {
    const auto reachable = std::count_if(r->stats.sinks.begin(), r->stats.sinks.end(),
                                         [](const SinkSummary& s) { return s.distance.has_value(); });
    fdc.row({std::to_string(r->id), std::to_string(r->dims), std::to_string(r->card), r->algo,
             std::to_string(r->stats.n_sinks), std::to_string(reachable), fmt(r->rho)});
    auto& [values, undefined] = per_algo[r->algo];
    if (r->rho)
      values.push_back(*r->rho);
    else
      ++undefined;
  }
  CsvWriter summary(kSummaryHeader);
  for (const auto& [algo, entry] : per_algo) {
    summary_row(summary, algo, "rho", batch_stats(entry.first, entry.second));
    const auto s = batch_stats(entry.first, entry.second);
    std::cout << "algo=" << algo << " instances=" << s.n + s.excluded << " defined=" << s.n << " mean_rho=" << fmt(s.mean)
              << " min_rho=" << fmt(s.min) << " max_rho=" << fmt(s.max) << '\n';
  }
  if (b.refs.size() == 1)
    for (const auto& r : b.records[0]) std::cout << "algo=" << r.algo << " rho=" << (r.rho ? fmt(*r.rho) : "undefined") << '\n';
  if (!o.out.empty()) {
    OutputDir dir(o.out);
    dir.write("fdc.csv", fdc.text());
    dir.write("sinks.csv", sinks_csv(b));
    dir.write("summary.csv", summary.text());
    write_manifest(dir, o, argv, batch_seeds(o, b), clock);
  }
  return kOk;
}

std::pair<int, int> parse_range(const std::string& text) {
  auto to_int = [&](const std::string& s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw ConfigError("bad dimension range '" + text + "'");
    return v;
  };
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const int d = to_int(text);
    return {d, d};
  }
  const int lo = to_int(text.substr(0, dots)), hi = to_int(text.substr(dots + 2));
  if (lo > hi) throw ConfigError("empty dimension range '" + text + "'");
  return {lo, hi};
}

int cmd_verify_hypercube(const Options& o, const std::vector<std::string>& argv) {
  Stopwatch clock;
  const auto [lo, hi] = parse_range(o.dims_range);
  CsvWriter csv({"D", "vertices", "cube_edges", "diagonals", "expected_diagonals", "result"});
  bool all = true;
  for (int d = lo; d <= hi; ++d) {
    const auto r = verify_hypercube(d);
    const bool ok = r.passed();
    all = all && ok;
    const auto expected = std::size_t{1} << (d - 2);
    std::cout << "D=" << d << ' ' << (ok ? "PASS" : "FAIL") << " vertices=" << r.vertices << " cube_edges=" << r.cube_edges
              << " diagonals=" << r.diagonals << '\n';
    for (const auto& m : r.mismatches) std::cout << "  " << m << '\n';
    csv.row({std::to_string(d), std::to_string(r.vertices), std::to_string(r.cube_edges), std::to_string(r.diagonals),
             std::to_string(expected), ok ? "PASS" : "FAIL"});
  }
  if (!o.out.empty()) {
    OutputDir dir(o.out);
    dir.write("hypercube.csv", csv.text());
    write_manifest(dir, o, argv, json::object(), clock);
  }
  if (!all) throw VerificationFailure("hypercube verification failed");
  return kOk;
}

// Strips "--name value" and "--name=value" occurrences.
std::vector<std::string> strip_option(const std::vector<std::string>& args, const std::string& name) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == name) {
      ++k;
      continue;
    }
    if (args[k].rfind(name + "=", 0) == 0) continue;
    out.push_back(args[k]);
  }
  return out;
}

int dispatch(const std::vector<std::string>& args);

int cmd_replay(const Options& o) {
  require_out(o);
  if (o.manifest.empty()) throw ConfigError("replay needs --manifest FILE");
  json m;
  try {
    m = json::parse(read_file(o.manifest));
  } catch (const json::exception& e) {
    throw FormatError("bad manifest: " + std::string(e.what()));
  }
  auto args = m.at("argv").get<std::vector<std::string>>();
  if (args.empty() || args.front() == "replay") throw ConfigError("manifest does not describe a replayable command");
  args = strip_option(strip_option(args, "--out"), "--jobs");
  args.insert(args.end(), {"--out", o.out, "--jobs", std::to_string(o.jobs)});
  const int code = dispatch(args);
  if (code != kOk) return code;

  std::size_t differing = 0, compared = 0;
  for (const auto& f : m.at("outputs")) {
    const auto name = f.at("path").get<std::string>();
    const auto path = fs::path(o.out) / name;
    ++compared;
    if (!fs::exists(path)) {
      std::cout << "missing  " << name << '\n';
      ++differing;
      continue;
    }
    const bool same = hex64(fnv1a(read_file(path))) == f.at("fnv1a64").get<std::string>();
    std::cout << (same ? "match    " : "differs  ") << name << '\n';
    if (!same) ++differing;
  }
  std::cout << "replay: " << compared - differing << "/" << compared << " outputs identical\n";
  if (differing) throw VerificationFailure(std::to_string(differing) + " output(s) differ from the manifest");
  return kOk;
}

// ------------------------------------------------------------- parsing

void add_instance_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--dims", o.dims, "dimensionality D")->capture_default_str();
  cmd->add_option("--card", o.card, "cardinality N")->capture_default_str();
  cmd->add_option("--count", o.count, "number of generated instances")->capture_default_str();
  cmd->add_option("--seed", o.seed, "base seed; instance i uses seed+i")->capture_default_str();
  cmd->add_option("--low", o.low, "smallest cost coefficient")->capture_default_str();
  cmd->add_option("--high", o.high, "largest cost coefficient")->capture_default_str();
  cmd->add_option("--max-bytes", o.max_bytes, "refuse instances whose cost array exceeds this")->capture_default_str();
  cmd->add_option("--jobs", o.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_flag("--timing", o.timing, "fill the wall_ms column (breaks byte-reproducibility)");
}

void add_search_options(CLI::App* cmd, Options& o) {
  add_instance_options(cmd, o);
  cmd->add_option("--instance", o.instance, "instance file (.mapc)");
  cmd->add_option("--batch", o.batch, "directory of .mapc instances");
  cmd->add_option("--algo", o.algos, "vlsn, vlsn-nod1, vns:K or vns-all (repeatable)");
  cmd->add_option("--starts", o.starts, "random, grid or file")
      ->capture_default_str()
      ->check(CLI::IsMember({"random", "grid", "file"}));
  cmd->add_option("--starts-file", o.starts_file, "one encoded assignment per line");
  cmd->add_option("--mu", o.mu, "number of random starts")->capture_default_str();
  cmd->add_option("--node-cap", o.node_cap, "landscape node cap")->capture_default_str();
  cmd->add_flag("--no-landscape", o.no_landscape, "graph statistics from descent trajectories only");
}

int dispatch(const std::vector<std::string>& args) {
  Options o;
  CLI::App app{"Landscape tools for the multidimensional assignment problem", "mapland"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto* generate = app.add_subcommand("generate", "write a batch of random instances");
  add_instance_options(generate, o);
  auto* solve = app.add_subcommand("solve", "search from the configured starts and report the best solution found");
  add_search_options(solve, o);
  solve->add_flag("--check-optimum", o.check_optimum, "compare against the enumerated optimum (tiny instances)");
  solve->add_flag("--export-landscape", o.export_landscape, "write the explored landscape graph");
  auto* compare = app.add_subcommand("compare", "compare two algorithms over a batch");
  add_search_options(compare, o);
  auto* multistart = app.add_subcommand("multistart", "multi-start runs over a batch");
  add_search_options(multistart, o);
  auto* explore_cmd = app.add_subcommand("explore", "explore and export landscapes");
  add_search_options(explore_cmd, o);
  auto* hyper = app.add_subcommand("verify-hypercube", "check the N=2 move graphs");
  hyper->add_option("--dims", o.dims_range, "D or a range such as 3..10")->capture_default_str();
  hyper->add_option("--out", o.out, "output directory");
  auto* fdc = app.add_subcommand("analyze-fdc", "fitness-distance correlation of landscape sinks");
  add_search_options(fdc, o);
  fdc->add_option("--graph", o.graph, "exported graph prefix to analyze instead of searching");
  auto* replay = app.add_subcommand("replay", "rerun a command from its manifest and compare outputs");
  replay->add_option("--manifest", o.manifest, "manifest.json of a previous run")->required();
  replay->add_option("--out", o.out, "output directory for the rerun")->required();
  replay->add_option("--jobs", o.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  o.command = app.get_subcommands().front()->get_name();

  if (generate->parsed()) return cmd_generate(o, args);
  if (solve->parsed()) return cmd_solve(o, args, false);
  if (explore_cmd->parsed()) return cmd_solve(o, args, true);
  if (compare->parsed()) return cmd_compare(o, args);
  if (multistart->parsed()) return cmd_multistart(o, args);
  if (hyper->parsed()) return cmd_verify_hypercube(o, args);
  if (fdc->parsed()) return cmd_analyze_fdc(o, args);
  if (replay->parsed()) return cmd_replay(o);
  return kConfig;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  try {
    return dispatch(args);
  } catch (const VerificationFailure& e) {
    std::cerr << "mapland: verification failed: " << e.what() << '\n';
    return kVerification;
  } catch (const CapExceededError& e) {
    std::cerr << "mapland: " << e.what() << '\n';
    return kCap;
  } catch (const IoError& e) {
    std::cerr << "mapland: " << e.what() << '\n';
    return kIo;
  } catch (const FormatError& e) {
    std::cerr << "mapland: " << e.what() << '\n';
    return kIo;
  } catch (const ConfigError& e) {
    std::cerr << "mapland: " << e.what() << '\n';
    return kConfig;
  } catch (const ShapeError& e) {
    std::cerr << "mapland: " << e.what() << '\n';
    return kConfig;
  } catch (const ValueError& e) {
    std::cerr << "mapland: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "mapland: " << e.what() << '\n';
    return kOther;
  }
}

}  // namespace mapland::cli
