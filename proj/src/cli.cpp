#include "gallery_sync/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gallery_sync/collection.hpp"
#include "gallery_sync/error.hpp"
#include "gallery_sync/evaluation.hpp"
#include "gallery_sync/graph.hpp"
#include "gallery_sync/io.hpp"
#include "gallery_sync/kernels.hpp"
#include "gallery_sync/learning.hpp"
#include "gallery_sync/pipeline.hpp"
#include "gallery_sync/synth.hpp"
#include "gallery_sync/vlad.hpp"

namespace gsync::cli {

namespace {

constexpr const char* kDefaultLayer = "inception3a";

struct FeatureFlags {
  std::string manifest;
  std::string features;
  std::vector<std::string> layers;
  std::string encoding = "auto";
  std::size_t vocab_size = 256;
  std::string vocab;
  std::string reference;
  std::uint64_t seed = 0;
};

struct SyncFlags {
  std::string approach = "exact";
  double alpha = kDefaultAlpha;
  std::optional<double> gamma;
  std::optional<double> delta;
  std::string params;
  bool literal_time = false;
  std::string out;
  std::string dot;
  std::string links;
};

void add_feature_flags(CLI::App* cmd, FeatureFlags& f) {
  cmd->add_option("--manifest", f.manifest, "collection manifest (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--features", f.features, "directory of <photo-id>.gsft files")
      ->required()
      ->check(CLI::ExistingDirectory);
  cmd->add_option("--layer", f.layers,
                  "layer to compare (repeat to fuse several); default inception3a, or the layer the files hold");
  cmd->add_option("--encoding", f.encoding, "descriptor encoding")
      ->check(CLI::IsMember({"auto", "vlad", "raw"}));
  cmd->add_option("--vocab-size", f.vocab_size, "visual words per layer")->check(CLI::PositiveNumber);
  cmd->add_option("--vocab", f.vocab, "prebuilt vocabulary (.gsft) from `vocab`")->check(CLI::ExistingFile);
  cmd->add_option("--reference", f.reference, "reference gallery (default: manifest's)");
  cmd->add_option("--seed", f.seed, "k-means seed");
}

Collection load_with_reference(const FeatureFlags& f) {
  auto c = load_collection(f.manifest);
  if (!f.reference.empty()) {
    if (!c.find_gallery(f.reference)) throw Error("cli", "unknown reference gallery '" + f.reference + "'");
    c.reference_gallery_id = f.reference;
  }
  return c;
}

FeatureConfig feature_config(const FeatureFlags& f) {
  FeatureConfig cfg;
  cfg.layers = f.layers;
  cfg.encoding = f.encoding == "vlad"  ? DescriptorEncoding::vlad
                 : f.encoding == "raw" ? DescriptorEncoding::raw
                                       : DescriptorEncoding::automatic;
  cfg.vocabulary_size = f.vocab_size;
  cfg.seed = f.seed;
  if (!f.vocab.empty()) cfg.vocabulary_path = f.vocab;
  return cfg;
}

/// With no --layer, real extractor output is expected under inception3a; a
/// flat directory holding some other single layer (e.g. synthetic data) is
/// accepted as is.
FeatureConfig resolve_layers(const FeatureFlags& f, const Collection& c) {
  auto cfg = feature_config(f);
  if (!cfg.layers.empty()) return cfg;
  for (const auto& g : c.galleries) {
    if (g.photos.empty()) continue;
    const auto& id = g.photos.front().id;
    const auto path = feature_path(f.features, id, std::string_view(kDefaultLayer));
    if (std::filesystem::exists(path) &&
        canonical_layer_name(read_gsft(path, id).layer) == canonical_layer_name(kDefaultLayer))
      cfg.layers = {kDefaultLayer};
    break;
  }
  return cfg;
}

SyncConfig sync_config(const SyncFlags& s) {
  SyncConfig cfg;
  cfg.approach = s.approach == "coverage" ? LinkApproach::coverage : LinkApproach::exact;
  cfg.alpha = s.alpha;
  if (!s.params.empty()) cfg.params = load_params(s.params);
  if (s.gamma) cfg.params.gamma = *s.gamma;
  if (s.delta) cfg.params.delta = *s.delta;
  cfg.mrf.offset_adjusted_time = !s.literal_time;
  return cfg;
}

void apply_threads(std::optional<int> threads) {
  if (!threads) {
    if (const char* env = std::getenv("GALLERY_SYNC_THREADS")) {
      try {
        threads = std::stoi(env);
      } catch (const std::exception&) {
        throw Error("cli", std::string("GALLERY_SYNC_THREADS is not a number: '") + env + "'");
      }
    }
  }
  if (threads) {
    if (*threads < 1) throw Error("cli", "thread count must be at least 1");
    kernels::set_thread_count(*threads);
  }
}

int cmd_sync(const FeatureFlags& f, const SyncFlags& s, std::ostream& out) {
  const auto collection = load_with_reference(f);
  const auto result = synchronize(collection, f.features, resolve_layers(f, collection), sync_config(s));
  write_file_atomic(s.out, sync_result_to_json(result));
  if (!s.dot.empty()) write_file_atomic(s.dot, export_dot(result.graph, result.tree));
  if (!s.links.empty()) write_file_atomic(s.links, link_set_to_jsonl(result.links));
  std::size_t synced = 0;
  for (const auto& [id, g] : result.galleries) synced += g.status == SyncStatus::synchronized;
  out << "synchronized " << synced << " of " << result.galleries.size() << " galleries -> " << s.out << "\n";
  return kExitOk;
}

int cmd_graph(const FeatureFlags& f, const SyncFlags& s, std::ostream& out) {
  const auto collection = load_with_reference(f);
  const auto cfg = sync_config(s);
  const auto w = compute_similarity(collection, f.features, resolve_layers(f, collection));
  const auto links = discover_links(cfg.approach, w, collection, cfg.alpha);
  const auto graph = build_graph(collection, links);
  const auto tree = spanning_tree(graph, collection.reference_gallery_id);
  const auto dot = export_dot(graph, tree);
  if (s.dot.empty()) out << dot;
  else write_file_atomic(s.dot, dot);
  if (!s.links.empty()) write_file_atomic(s.links, link_set_to_jsonl(links));
  for (const auto& g : unreachable_galleries(graph, collection.reference_gallery_id))
    out << (s.dot.empty() ? "// unreachable: " : "unreachable: ") << g << "\n";
  return kExitOk;
}

int cmd_vocab(const FeatureFlags& f, const std::string& out_path, std::ostream& out) {
  const auto collection = load_collection(f.manifest);
  if (f.layers.size() > 1) throw Error("cli", "vocab builds one layer at a time");
  std::optional<std::string> layer;
  if (!f.layers.empty()) layer = f.layers.front();
  auto sets = load_layer(collection, f.features, layer);
  for (auto& s : sets) s = normalize_regions(std::move(s));
  KMeansOptions km;
  km.clusters = f.vocab_size;
  km.seed = f.seed;
  const auto vocab = build_vocabulary(sets, km);
  save_vocabulary(out_path, vocab);
  out << "vocabulary " << vocab.layer << ": " << vocab.size() << " words x " << vocab.dim() << " -> " << out_path
      << "\n";
  return kExitOk;
}

int cmd_learn(const FeatureFlags& f, const SyncFlags& s, const std::string& gt_path, double lr,
              std::size_t iterations, std::ostream& out) {
  const auto collection = load_with_reference(f);
  const auto truth = load_ground_truth(gt_path);
  const auto cfg = sync_config(s);
  const auto w = compute_similarity(collection, f.features, resolve_layers(f, collection));
  const auto graph = build_graph(collection, discover_links(cfg.approach, w, collection, cfg.alpha));
  const auto tree = spanning_tree(graph, collection.reference_gallery_id);
  // Truth is relative to the manifest's reference; edges only need differences.
  const auto manifest_reference = load_collection(f.manifest).reference_gallery_id;
  auto true_offset = [&](const std::string& id) -> std::optional<Seconds> {
    auto it = truth.offsets.find(id);
    if (it != truth.offsets.end()) return it->second;
    if (id == manifest_reference) return 0;
    return std::nullopt;
  };
  std::vector<TrainingEdge> edges;
  for (const auto& step : tree.traversal) {
    auto tp = true_offset(step.parent);
    auto tc = true_offset(step.child);
    if (!tp || !tc) continue;
    edges.push_back(make_training_edge(graph.edges.at(step.edge).links, collection.gallery(step.parent),
                                       collection.gallery(step.child), *tc - *tp, cfg.mrf));
  }
  LearningOptions lo;
  lo.learning_rate = lr;
  lo.max_iterations = iterations;
  const auto res = learn_parameters(edges, cfg.params, lo);
  write_file_atomic(s.out, params_to_json(res.params));
  out << "learned gamma=" << res.params.gamma << " delta=" << res.params.delta << " from " << edges.size()
      << " edges in " << res.iterations << " steps (nll " << res.nll.front() << " -> " << res.nll.back() << ")\n";
  return kExitOk;
}

int cmd_eval(const std::string& pred, const std::string& gt, Seconds max_error, const std::string& report_out,
             std::ostream& out) {
  const auto result = parse_sync_result(read_text_file(pred));
  const auto report = evaluate(result, load_ground_truth(gt), max_error);
  const auto json = report_json(report);
  if (!report_out.empty()) write_file_atomic(report_out, json);
  out << json << report_text(report);
  return kExitOk;
}

int cmd_gen(const synth::ScenarioConfig& cfg, const std::string& out_dir, std::ostream& out) {
  const auto scenario = synth::generate(cfg);
  synth::write_scenario(scenario, out_dir);
  out << "generated " << scenario.collection.gallery_count() << " galleries, " << scenario.collection.photo_count()
      << " photos -> " << out_dir << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Estimate clock offsets between photo galleries of one event", "gallery-sync"};
  app.require_subcommand(1);
  std::optional<int> threads;
  app.add_option("--threads", threads, "worker threads (default: $GALLERY_SYNC_THREADS or all cores)");

  FeatureFlags feat;
  SyncFlags sync;
  auto add_sync_flags = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--approach", sync.approach, "link selection")->check(CLI::IsMember({"exact", "coverage"}));
    cmd->add_option("--alpha", sync.alpha, "links per gallery pair as a share of all photos")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--gamma", sync.gamma, "geo potential weight");
    cmd->add_option("--delta", sync.delta, "temporal potential weight");
    cmd->add_option("--params", sync.params, "JSON {gamma, delta}")->check(CLI::ExistingFile);
    cmd->add_flag("--literal-time", sync.literal_time, "use unshifted timestamps in the temporal distance");
    cmd->add_option("--links", sync.links, "write the selected links as JSON lines");
    auto* o = cmd->add_option("--out", sync.out, "output file");
    if (needs_out) o->required();
  };

  auto* sync_cmd = app.add_subcommand("sync", "estimate per-gallery offsets");
  add_feature_flags(sync_cmd, feat);
  add_sync_flags(sync_cmd, true);
  sync_cmd->add_option("--dot", sync.dot, "write the gallery graph as Graphviz DOT");

  auto* graph_cmd = app.add_subcommand("graph", "build the gallery graph and its spanning tree");
  add_feature_flags(graph_cmd, feat);
  add_sync_flags(graph_cmd, false);
  graph_cmd->add_option("--dot", sync.dot, "DOT output file (default: stdout)");

  auto* learn_cmd = app.add_subcommand("learn", "fit gamma and delta on galleries with known offsets");
  add_feature_flags(learn_cmd, feat);
  add_sync_flags(learn_cmd, true);
  std::string learn_gt;
  double learn_rate = 1e-3;
  std::size_t learn_iterations = 1000;
  learn_cmd->add_option("--gt", learn_gt, "ground-truth offsets")->required()->check(CLI::ExistingFile);
  learn_cmd->add_option("--learning-rate", learn_rate)->check(CLI::PositiveNumber);
  learn_cmd->add_option("--iterations", learn_iterations);

  auto* vocab_cmd = app.add_subcommand("vocab", "build a visual vocabulary");
  add_feature_flags(vocab_cmd, feat);
  std::string vocab_out;
  vocab_cmd->add_option("--out", vocab_out, "vocabulary file (.gsft)")->required();

  auto* eval_cmd = app.add_subcommand("eval", "score offsets against ground truth");
  std::string pred, gt, report_out;
  Seconds max_error = kDefaultMaxError;
  eval_cmd->add_option("--pred", pred, "offsets JSON from sync")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--gt", gt, "ground-truth offsets JSON")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--max-error", max_error, "synchronization tolerance in seconds")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--out", report_out, "also write the report JSON here");

  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic collection with known offsets");
  synth::ScenarioConfig scfg;
  std::string gen_out, geo_mode = "none";
  gen_cmd->add_option("--galleries", scfg.galleries);
  gen_cmd->add_option("--photos", scfg.photos_per_gallery, "photos per gallery");
  gen_cmd->add_option("--duration", scfg.duration, "event length in seconds");
  gen_cmd->add_option("--offset-range", scfg.offset_range, "offsets drawn from [-range, range]");
  gen_cmd->add_option("--rate", scfg.planted_rate, "share of photos showing a shared scene");
  gen_cmd->add_option("--dim", scfg.descriptor_dim, "descriptor dimension");
  gen_cmd->add_option("--noise", scfg.noise, "descriptor noise sigma");
  gen_cmd->add_option("--jitter", scfg.jitter, "capture-time spread within a scene (s)");
  gen_cmd->add_option("--geo", geo_mode)->check(CLI::IsMember({"none", "venue", "track"}));
  gen_cmd->add_option("--seed", scfg.seed);
  gen_cmd->add_option("--out", gen_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    apply_threads(threads);
    if (sync_cmd->parsed()) return cmd_sync(feat, sync, out);
    if (graph_cmd->parsed()) return cmd_graph(feat, sync, out);
    if (learn_cmd->parsed()) return cmd_learn(feat, sync, learn_gt, learn_rate, learn_iterations, out);
    if (vocab_cmd->parsed()) return cmd_vocab(feat, vocab_out, out);
    if (eval_cmd->parsed()) return cmd_eval(pred, gt, max_error, report_out, out);
    if (gen_cmd->parsed()) {
      scfg.geo = geo_mode == "venue" ? synth::GeoMode::venue
                 : geo_mode == "track" ? synth::GeoMode::track
                                       : synth::GeoMode::none;
      return cmd_gen(scfg, gen_out, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace gsync::cli
