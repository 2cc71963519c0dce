// sga: command-line front end for scene graph alignment.
//
// stdout carries exactly one JSON document per successful run; diagnostics
// go to stderr (verbosity from SGA_LOG). Exit codes: 0 ok, 1 usage or I/O
// error, 2 input rejected by validation.

#include "sga/config.hpp"
#include "sga/errors.hpp"
#include "sga/eval.hpp"
#include "sga/log.hpp"
#include "sga/losses.hpp"
#include "sga/sample.hpp"
#include "sga/synth.hpp"
#include "sga/weights_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

namespace fs = std::filesystem;
using namespace sga;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;

// Raised for problems with the command line itself.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::string config_path;
  std::string weights_path;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

struct Context {
  PipelineConfig config;
  std::uint64_t seed = 0;
};

Context make_context(const GlobalOptions& g) {
  Context ctx;
  if (!g.config_path.empty()) {
    auto loaded = load_config(g.config_path);
    for (const auto& w : loaded.warnings) log::warn(w);
    ctx.config = std::move(loaded.config);
  }
  if (!g.weights_path.empty()) ctx.config.paths.weights = g.weights_path;
  ctx.seed = g.seed ? *g.seed : ctx.config.seed;
  ctx.config.seed = ctx.seed;
  validate_config(ctx.config);
  return ctx;
}

struct LoadedWeights {
  EncoderWeights weights;
  Json meta;
  std::string hash;
};

LoadedWeights load_or_init_weights(const Context& ctx) {
  LoadedWeights out;
  if (ctx.config.paths.weights) {
    const fs::path p = *ctx.config.paths.weights;
    out.weights = load_weights(p);
    out.hash = file_content_hash(p);
    out.meta = {{"source", "file"}, {"path", p.string()}, {"hash", out.hash}};
  } else {
    out.weights = init_weights(ctx.config.encoder, ctx.seed);
    out.hash = "init-" + std::to_string(ctx.seed) + "-" +
               content_hash(encoder_config_to_json(ctx.config.encoder).dump());
    out.meta = {{"source", "init"}, {"seed", ctx.seed}, {"hash", out.hash}};
  }
  return out;
}

void print_json(const Json& j) { std::cout << j.dump(2) << '\n'; }

Json match_set_json(const MatchSet& m, const SceneGraph& a, const SceneGraph& b) {
  Json pairs = Json::array();
  for (const auto& p : m.pairs) {
    pairs.push_back({a.nodes[static_cast<std::size_t>(p.i)].id,
                     b.nodes[static_cast<std::size_t>(p.j)].id, p.score});
  }
  Json unmatched = Json::array();
  for (int i : m.unmatched_a) unmatched.push_back(a.nodes[static_cast<std::size_t>(i)].id);
  return {{"pairs", pairs},
          {"unmatched_a", unmatched},
          {"iterations", m.iterations},
          {"converged", m.converged},
          {"objective_error_bound", m.objective_error_bound}};
}

Json metrics_json(const SampleMetrics& s) {
  return {{"accuracy", s.accuracy}, {"precision", s.precision}, {"recall", s.recall},
          {"f1", s.f1},             {"tp", s.tp},               {"fp", s.fp},
          {"fn", s.fn},             {"tn_nomatch", s.tn_nomatch}};
}

Json mean_json(const MeanMetrics& m) {
  return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall},
          {"f1", m.f1},             {"count", m.count}};
}

// A JSON number, or null for a non-finite value.
Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Runs body(k) for k in [0, n) on up to `jobs` threads. Each index writes its
// own slot, so results do not depend on scheduling. The first exception is
// rethrown after all workers stop.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k; !stop && (k = next++) < n;) {
        try {
          body(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
          stop = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

// Pair directories under `dir`, sorted by name; `dir` itself when it holds a
// pair.
std::vector<fs::path> pair_dirs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw LoadError("pairs directory not found: " + dir.string());
  if (fs::exists(dir / "gt.json")) return {dir};
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory() && fs::exists(e.path() / "gt.json")) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw LoadError("no pair directories (with gt.json) under " + dir.string());
  return out;
}

// ---------------------------------------------------------------- commands

struct AlignArgs {
  std::string a, b, allocator;
};

int cmd_align(const GlobalOptions& g, const AlignArgs& args) {
  auto ctx = make_context(g);
  if (!args.allocator.empty()) ctx.config.allocator = allocator_from_string(args.allocator);
  const auto ga = load_graph(args.a, ctx.config.edges);
  const auto gb = load_graph(args.b, ctx.config.edges);
  const auto w = load_or_init_weights(ctx);
  const auto r = align_graphs(ga, gb, w.weights, ctx.config.align_config());
  Json out = match_set_json(r.matches, ga, gb);
  out["graph_a"] = ga.graph_id;
  out["graph_b"] = gb.graph_id;
  out["allocator"] = to_string(ctx.config.allocator);
  out["weights"] = w.meta;
  print_json(out);
  return kExitOk;
}

struct EncodeArgs {
  std::string graph;
};

int cmd_encode(const GlobalOptions& g, const EncodeArgs& args) {
  const auto ctx = make_context(g);
  const auto graph = load_graph(args.graph, ctx.config.edges);
  const auto w = load_or_init_weights(ctx);
  const auto enc = encode_graph(graph, w.weights);
  Json nodes = Json::array();
  for (std::size_t k = 0; k < graph.size(); ++k) {
    nodes.push_back({{"id", graph.nodes[k].id},
                     {"embedding", vector_to_json(enc.nodes.col(static_cast<Eigen::Index>(k)))}});
  }
  print_json({{"graph_id", graph.graph_id},
              {"d_model", enc.global.size()},
              {"global", vector_to_json(enc.global)},
              {"nodes", nodes},
              {"weights", w.meta}});
  return kExitOk;
}

struct RetrieveArgs {
  std::string query, db, rerank, allocator;
  std::optional<int> k;
};

int cmd_retrieve(const GlobalOptions& g, const RetrieveArgs& args) {
  auto ctx = make_context(g);
  auto& rc = ctx.config.retrieval;
  if (args.k) rc.k = *args.k;
  if (!args.rerank.empty()) rc.rerank = rerank_mode_from_string(args.rerank);
  if (!args.allocator.empty()) rc.allocator = allocator_from_string(args.allocator);
  validate_config(ctx.config);

  const auto query = load_graph(args.query, ctx.config.edges);
  const auto w = load_or_init_weights(ctx);
  const auto db = SceneDatabase::open(args.db, w.weights, w.hash, ctx.config.edges);
  const auto q = encode_graph(query, w.weights);
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = retrieve(query, q, db, rc.k, rc.rerank, ctx.config.align_config(rc.allocator));
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Json ranked = Json::array();
  for (const auto& r : res.ranked) {
    Json item = {{"scene_id", r.scene_id},
                 {"score", finite_or_null(r.score)},
                 {"global_similarity", r.global_similarity},
                 {"seconds", r.seconds},
                 {"failed", r.failed}};
    if (r.failed) item["error"] = r.error;
    if (const SceneEntry* e = db.find(r.scene_id); r.matches && e != nullptr) {
      item["matches"] = match_set_json(*r.matches, query, e->graph);
    }
    ranked.push_back(std::move(item));
  }
  print_json({{"query", query.graph_id},
              {"k", rc.k},
              {"rerank", to_string(rc.rerank)},
              {"allocator", to_string(rc.allocator)},
              {"database_size", db.size()},
              {"seconds", total},
              {"ranked", ranked},
              {"weights", w.meta}});
  return kExitOk;
}

struct EvalArgs {
  std::string pairs, allocator, out, csv;
};

int cmd_eval(const GlobalOptions& g, const EvalArgs& args) {
  auto ctx = make_context(g);
  if (!args.allocator.empty()) ctx.config.allocator = allocator_from_string(args.allocator);
  const auto dirs = pair_dirs(args.pairs);
  const auto w = load_or_init_weights(ctx);
  const AlignConfig ac = ctx.config.align_config();

  std::vector<SampleMetrics> metrics(dirs.size());
  std::vector<double> overlaps(dirs.size());
  std::vector<Task> tasks(dirs.size());
  parallel_for(dirs.size(), g.jobs, [&](std::size_t k) {
    const auto s = load_sample(dirs[k], ctx.config.edges);
    const auto r = align_graphs(s.graph_a, s.graph_b, w.weights, ac);
    const auto gt = gt_index_pairs(s.gt, s.graph_a, s.graph_b);
    metrics[k] = sample_metrics(r.matches, gt, static_cast<int>(s.graph_a.size()));
    overlaps[k] = s.overlap_ratio;
    tasks[k] = s.task;
    log::info("eval " + dirs[k].filename().string() + ": f1 " + std::to_string(metrics[k].f1));
  });

  Json per_sample = Json::array();
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    per_sample.push_back({{"id", dirs[k].filename().string()},
                          {"task", to_string(tasks[k])},
                          {"overlap", overlaps[k]},
                          {"metrics", metrics_json(metrics[k])}});
  }
  const auto bins = bin_by_overlap(metrics, overlaps);
  Json bins_json = Json::array();
  for (const auto& b : bins) {
    bins_json.push_back({{"lo", b.lo},
                         {"hi", b.hi},
                         {"count", b.count},
                         {"mean", b.mean ? mean_json(*b.mean) : Json(nullptr)}});
  }
  const Json report = {{"allocator", to_string(ctx.config.allocator)},
                       {"overall", mean_json(aggregate(metrics))},
                       {"bins", bins_json},
                       {"per_sample", per_sample},
                       {"weights", w.meta}};
  if (!args.out.empty()) write_json_file(report, args.out, 2);
  if (!args.csv.empty()) {
    std::ofstream csv(args.csv);
    if (!csv) throw LoadError("cannot write " + args.csv);
    csv << "lo,hi,count,accuracy,precision,recall,f1\n";
    for (const auto& b : bins) {
      csv << b.lo << ',' << b.hi << ',' << b.count;
      if (b.mean) {
        csv << ',' << b.mean->accuracy << ',' << b.mean->precision << ',' << b.mean->recall << ','
            << b.mean->f1;
      } else {
        csv << ",,,,";
      }
      csv << '\n';
    }
  }
  print_json(report);
  return kExitOk;
}

struct SynthArgs {
  std::string task = "s2s", out;
  int count = 10;
  std::optional<double> overlap, feature_noise, position_noise, undersegment;
  bool distinct_classes = false;
};

int cmd_synth(const GlobalOptions& g, const SynthArgs& args) {
  const auto ctx = make_context(g);
  const Task task = task_from_string(args.task == "f2s" ? "F2S" : args.task == "s2s" ? "S2S" : args.task);
  if (args.count < 1) throw UsageError("--count must be >= 1");
  SynthConfig base;
  base.feature_dims = ctx.config.encoder.feature_dims;
  base.edges = ctx.config.edges;
  base.distinct_classes = args.distinct_classes;
  if (args.overlap) base.s2s_crop_overlap = *args.overlap;
  if (args.feature_noise) base.feature_noise_sigma = *args.feature_noise;
  if (args.position_noise) base.position_noise_sigma = *args.position_noise;
  if (args.undersegment) base.undersegment_prob = *args.undersegment;
  if (task == Task::s2s) base.n_objects_min = std::max(base.n_objects_min, 6);
  base.validate();

  const fs::path out = args.out;
  fs::create_directories(out);
  const auto n = static_cast<std::size_t>(args.count);
  std::vector<AlignmentSample> samples(n);
  std::vector<std::string> ids(n);
  parallel_for(n, g.jobs, [&](std::size_t k) {
    // Unattainable overlaps on a given scene are retried on fresh scenes.
    constexpr int kSceneAttempts = 20;
    for (int attempt = 0;; ++attempt) {
      SynthConfig c = base;
      c.seed = splitmix64(ctx.seed * 1000003ull + k * 131ull + static_cast<std::uint64_t>(attempt));
      try {
        const auto scene = generate_scene(c);
        const std::uint64_t pair_seed = splitmix64(c.seed);
        samples[k] = task == Task::f2s ? make_f2s_pair(scene, c, pair_seed)
                                       : make_s2s_pair(scene, c, pair_seed);
        break;
      } catch (const GenerationError& e) {
        if (attempt + 1 >= kSceneAttempts) throw;
        log::debug("synth sample " + std::to_string(k) + ": " + e.what() + "; retrying");
      }
    }
    char name[32];
    std::snprintf(name, sizeof name, "pair_%05zu", k);
    ids[k] = name;
    save_sample(samples[k], out / ids[k]);
  });

  Json listing = Json::array();
  for (std::size_t k = 0; k < n; ++k) {
    listing.push_back({{"id", ids[k]},
                       {"seed", samples[k].seed},
                       {"overlap", samples[k].overlap_ratio},
                       {"n_a", samples[k].graph_a.size()},
                       {"n_b", samples[k].graph_b.size()},
                       {"gt_pairs", samples[k].gt.pairs.size()}});
  }
  print_json({{"task", to_string(task)},
              {"count", args.count},
              {"seed", ctx.seed},
              {"out", out.string()},
              {"samples", listing}});
  return kExitOk;
}

struct RegisterArgs {
  std::string pair, allocator;
};

Json transform_json(const RigidTransform& T) {
  Json R = Json::array();
  for (int r = 0; r < 3; ++r) R.push_back({T.R(r, 0), T.R(r, 1), T.R(r, 2)});
  return {{"R", R}, {"t", {T.t.x(), T.t.y(), T.t.z()}}};
}

int cmd_register(const GlobalOptions& g, const RegisterArgs& args) {
  auto ctx = make_context(g);
  if (!args.allocator.empty()) ctx.config.allocator = allocator_from_string(args.allocator);
  const auto s = load_sample(args.pair, ctx.config.edges);
  const auto w = load_or_init_weights(ctx);
  const auto r = align_graphs(s.graph_a, s.graph_b, w.weights, ctx.config.align_config());
  std::vector<PointPair> pairs;
  for (const auto& m : r.matches.pairs) {
    pairs.push_back({s.graph_a.nodes[static_cast<std::size_t>(m.i)].position,
                     s.graph_b.nodes[static_cast<std::size_t>(m.j)].position});
  }
  RansacParams rp = ctx.config.registration;
  if (g.seed) rp.seed = *g.seed;
  const auto est = estimate_rigid(pairs, rp);

  Json out = {{"allocator", to_string(ctx.config.allocator)},
              {"correspondences", pairs.size()},
              {"inliers", est.inliers.size()},
              {"transform", transform_json(est.transform)},
              {"weights", w.meta}};
  if (s.a_to_b) {
    RigidTransform gt;
    gt.R = s.a_to_b->R;
    gt.t = s.a_to_b->t;
    const auto err = registration_error(est.transform, gt);
    Json bins = Json::array();
    for (const auto& b : kSuccessBins) {
      bins.push_back({{"max_rte", b.max_rte},
                      {"max_rre", b.max_rre},
                      {"pass", err.rte <= b.max_rte && err.rre <= b.max_rre}});
    }
    out["error"] = {{"rte", err.rte}, {"rre", err.rre}};
    out["success"] = bins;
  } else {
    out["error"] = nullptr;
    log::warn("gt.json has no transform; skipping RTE/RRE");
  }
  print_json(out);
  return kExitOk;
}

struct DemoFitArgs {
  std::string pair;
  int nodes = 6;
  std::optional<int> steps;
  std::optional<double> lr;
};

int cmd_demo_fit(const GlobalOptions& g, const DemoFitArgs& args) {
  const auto ctx = make_context(g);
  ToyFitParams p;
  p.seed = ctx.seed;
  p.temperature = ctx.config.losses.infonce_temperature;
  if (args.steps) p.steps = *args.steps;
  if (args.lr) p.lr = *args.lr;
  std::vector<double> losses;
  if (!args.pair.empty()) {
    losses = toy_embedding_fit(load_sample(args.pair, ctx.config.edges), p);
  } else {
    if (args.nodes < 1) throw UsageError("--nodes must be >= 1");
    std::vector<std::pair<int, int>> pos;
    // A cyclic shift: one positive per row and column.
    for (int k = 0; k < args.nodes; ++k) pos.emplace_back(k, (k + 1) % args.nodes);
    losses = toy_embedding_fit(args.nodes, args.nodes, pos, p);
  }
  print_json({{"steps", p.steps},
              {"lr", p.lr},
              {"temperature", p.temperature},
              {"initial_loss", losses.front()},
              {"final_loss", losses.back()},
              {"losses", losses}});
  return kExitOk;
}

struct ValidateArgs {
  std::vector<std::string> graphs;
  std::string pair;
  bool weights = false;
};

int cmd_validate(const GlobalOptions& g, const ValidateArgs& args) {
  Json checks = Json::array();
  bool ok = true;
  auto record = [&](const std::string& what, const std::string& target, std::vector<std::string> errs) {
    ok = ok && errs.empty();
    checks.push_back({{"kind", what}, {"target", target}, {"valid", errs.empty()}, {"errors", errs}});
  };
  auto guarded = [&](const std::string& what, const std::string& target, const std::function<void()>& f) {
    try {
      f();
    } catch (const LoadError&) {
      throw;
    } catch (const Error& e) {
      record(what, target, {e.what()});
    }
  };

  Context ctx;
  guarded("config", g.config_path.empty() ? "<defaults>" : g.config_path, [&] {
    ctx = make_context(g);
    record("config", g.config_path.empty() ? "<defaults>" : g.config_path, {});
  });
  for (const auto& path : args.graphs) {
    guarded("graph", path, [&] {
      const auto graph = load_graph(path, ctx.config.edges);
      auto errs = validate_graph(graph);
      if (graph.feature_dims.vl != ctx.config.encoder.feature_dims.vl ||
          graph.feature_dims.t != ctx.config.encoder.feature_dims.t) {
        errs.push_back("feature_dims differ from encoder.feature_dims");
      }
      record("graph", path, errs);
    });
  }
  if (!args.pair.empty()) {
    guarded("pair", args.pair, [&] {
      const auto s = load_sample(args.pair, ctx.config.edges);
      auto errs = validate_graph(s.graph_a);
      for (auto& e : validate_graph(s.graph_b)) errs.push_back(std::move(e));
      for (auto& e : validate_ground_truth(s.gt, s.graph_a, s.graph_b)) errs.push_back(std::move(e));
      record("pair", args.pair, errs);
    });
  }
  if (args.weights || !g.weights_path.empty()) {
    guarded("weights", g.weights_path.empty() ? "<init>" : g.weights_path, [&] {
      const auto w = load_or_init_weights(ctx);
      check_weights(w.weights);
      record("weights", g.weights_path.empty() ? "<init>" : g.weights_path, {});
    });
  }
  print_json({{"valid", ok}, {"checks", checks}});
  return ok ? kExitOk : kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scene graph alignment"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "Pipeline config JSON");
  app.add_option("--weights", g.weights_path, "Encoder weights JSON");
  app.add_option("--seed", g.seed, "Seed for weight init, synthesis and RANSAC");
  app.add_option("--jobs", g.jobs, "Worker threads for eval and synth")->check(CLI::PositiveNumber);

  std::function<int()> run;

  AlignArgs align;
  auto* c_align = app.add_subcommand("align", "Align two scene graphs");
  c_align->add_option("a", align.a, "Graph A (query/frame)")->required();
  c_align->add_option("b", align.b, "Graph B (map)")->required();
  c_align->add_option("--allocator", align.allocator, "mnn|mcf");
  c_align->callback([&] { run = [&] { return cmd_align(g, align); }; });

  EncodeArgs encode;
  auto* c_encode = app.add_subcommand("encode", "Dump node and global embeddings");
  c_encode->add_option("graph", encode.graph, "Scene graph JSON")->required();
  c_encode->callback([&] { run = [&] { return cmd_encode(g, encode); }; });

  RetrieveArgs retrieve_args;
  auto* c_ret = app.add_subcommand("retrieve", "Rank database scenes for a query graph");
  c_ret->add_option("--query", retrieve_args.query, "Query graph JSON")->required();
  c_ret->add_option("--db", retrieve_args.db, "Database directory")->required();
  c_ret->add_option("--k", retrieve_args.k, "Top-K candidates");
  c_ret->add_option("--rerank", retrieve_args.rerank, "direct|weighted");
  c_ret->add_option("--allocator", retrieve_args.allocator, "mnn|mcf");
  c_ret->callback([&] { run = [&] { return cmd_retrieve(g, retrieve_args); }; });

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Score alignment over a directory of pairs");
  c_eval->add_option("--pairs", eval.pairs, "Directory of pair directories")->required();
  c_eval->add_option("--allocator", eval.allocator, "mnn|mcf");
  c_eval->add_option("--out", eval.out, "Also write the report here");
  c_eval->add_option("--csv", eval.csv, "Per-bin CSV");
  c_eval->callback([&] { run = [&] { return cmd_eval(g, eval); }; });

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate synthetic alignment pairs");
  c_synth->add_option("--task", synth.task, "f2s|s2s")->check(CLI::IsMember({"f2s", "s2s", "F2S", "S2S"}));
  c_synth->add_option("--count", synth.count, "Number of pairs");
  c_synth->add_option("--out", synth.out, "Output directory")->required();
  c_synth->add_option("--overlap", synth.overlap, "S2S target overlap");
  c_synth->add_option("--feature-noise", synth.feature_noise, "Feature noise sigma");
  c_synth->add_option("--position-noise", synth.position_noise, "Position noise sigma, meters");
  c_synth->add_option("--undersegment", synth.undersegment, "F2S split probability");
  c_synth->add_flag("--distinct-classes", synth.distinct_classes, "One class per object");
  c_synth->callback([&] { run = [&] { return cmd_synth(g, synth); }; });

  RegisterArgs reg;
  auto* c_reg = app.add_subcommand("register", "Estimate the rigid transform of a pair");
  c_reg->add_option("--pair", reg.pair, "Pair directory")->required();
  c_reg->add_option("--allocator", reg.allocator, "mnn|mcf");
  c_reg->callback([&] { run = [&] { return cmd_register(g, reg); }; });

  DemoFitArgs fit;
  auto* c_fit = app.add_subcommand("demo-fit", "Fit free embeddings under InfoNCE");
  c_fit->add_option("--pair", fit.pair, "Pair directory supplying positives");
  c_fit->add_option("--nodes", fit.nodes, "Nodes per side without --pair");
  c_fit->add_option("--steps", fit.steps, "Gradient steps");
  c_fit->add_option("--lr", fit.lr, "Learning rate");
  c_fit->callback([&] { run = [&] { return cmd_demo_fit(g, fit); }; });

  ValidateArgs val;
  auto* c_val = app.add_subcommand("validate", "Check config, graphs, pairs and weights");
  c_val->add_option("--graph", val.graphs, "Scene graph JSON (repeatable)");
  c_val->add_option("--pair", val.pair, "Pair directory");
  c_val->add_flag("--check-weights", val.weights, "Also check the weights");
  c_val->callback([&] { run = [&] { return cmd_validate(g, val); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, std::cerr, std::cerr);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    return kExitUsage;
  }

  try {
    return run();
  } catch (const UsageError& e) {
    log::error(e.what());
    return kExitUsage;
  } catch (const LoadError& e) {
    log::error(e.what());
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    log::error(e.what());
    return kExitUsage;
  } catch (const Error& e) {
    log::error(e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    log::error(std::string("unexpected error: ") + e.what());
    return kExitUsage;
  }
}
