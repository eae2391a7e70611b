#include "gallery_sync/pipeline.hpp"

#include <exception>

#include <json.hpp>

#include "gallery_sync/error.hpp"
#include "gallery_sync/vlad.hpp"

namespace gsync {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("sync-pipeline", msg); }

SimilarityMatrix layer_similarity(const Collection& collection, const std::filesystem::path& features_dir,
                                  const std::optional<std::string>& layer, const FeatureConfig& config) {
  auto sets = load_layer(collection, features_dir, layer);
  const std::string actual = sets.empty() ? std::string() : canonical_layer_name(sets.front().layer);
  std::vector<VladDescriptor> descriptors;
  if (uses_vlad(actual, config.encoding)) {
    for (auto& s : sets) s = normalize_regions(std::move(s));
    Vocabulary vocab;
    if (config.vocabulary_path) {
      vocab = load_vocabulary(*config.vocabulary_path);
    } else {
      KMeansOptions km;
      km.clusters = config.vocabulary_size;
      km.seed = config.seed;
      km.backend = config.backend;
      vocab = build_vocabulary(sets, km);
    }
    descriptors = encode_vlad_all(sets, vocab, config.backend);
  } else {
    descriptors.reserve(sets.size());
    for (const auto& s : sets) descriptors.push_back(raw_descriptor(s));
  }
  return similarity_matrix(descriptors, config.backend);
}

}  // namespace

bool uses_vlad(const std::string& layer, DescriptorEncoding encoding) {
  switch (encoding) {
    case DescriptorEncoding::vlad: return true;
    case DescriptorEncoding::raw: return false;
    case DescriptorEncoding::automatic: break;
  }
  const auto name = canonical_layer_name(layer);
  return name != "loss3/classifier" && name != kSynthLayer;
}

std::vector<RegionFeatureSet> load_layer(const Collection& collection, const std::filesystem::path& features_dir,
                                         const std::optional<std::string>& layer) {
  std::vector<RegionFeatureSet> sets;
  sets.reserve(collection.photo_count());
  std::optional<std::string_view> wanted;
  if (layer) wanted = *layer;
  for (const auto& g : collection.galleries)
    for (const auto& p : g.photos) {
      sets.push_back(load_features(features_dir, p.id, wanted));
      if (!layer && canonical_layer_name(sets.back().layer) != canonical_layer_name(sets.front().layer))
        fail("photo '" + p.id + "' holds layer '" + sets.back().layer + "' but '" + sets.front().photo_id +
             "' holds '" + sets.front().layer + "'; pass the layer explicitly");
    }
  return sets;
}

SimilarityMatrix compute_similarity(const Collection& collection, const std::filesystem::path& features_dir,
                                    const FeatureConfig& config) {
  if (config.layers.size() > 1 && config.vocabulary_path)
    fail("a prebuilt vocabulary can only be used with a single layer");
  if (config.layers.empty()) return layer_similarity(collection, features_dir, std::nullopt, config);
  std::vector<SimilarityMatrix> per_layer;
  for (const auto& l : config.layers) per_layer.push_back(layer_similarity(collection, features_dir, l, config));
  if (per_layer.size() == 1) return std::move(per_layer.front());
  return fuse_similarities(per_layer);
}

SyncResult synchronize(const Collection& collection, const SimilarityMatrix& w, const SyncConfig& config) {
  if (collection.photo_count() == 0) fail("the collection holds no photos");
  SyncResult res;
  res.reference = collection.reference_gallery_id;
  res.links = discover_links(config.approach, w, collection, config.alpha);
  res.graph = build_graph(collection, res.links);
  res.tree = spanning_tree(res.graph, res.reference);

  const auto& steps = res.tree.traversal;
  res.edges.resize(steps.size());
  std::exception_ptr error;
  const auto n = static_cast<std::ptrdiff_t>(steps.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t si = 0; si < n; ++si) {
    const auto& step = steps[static_cast<std::size_t>(si)];
    auto& out = res.edges[static_cast<std::size_t>(si)];
    try {
      out.parent = step.parent;
      out.child = step.child;
      out.links = res.graph.edges.at(step.edge).links;
      out.result = estimate_offset(out.links, collection.gallery(step.parent), collection.gallery(step.child),
                                   config.params, config.mrf);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  for (const auto& g : collection.galleries) res.galleries[g.id] = {};
  res.galleries[res.reference] = {0, SyncStatus::synchronized};
  // Breadth-first order guarantees the parent is already placed.
  for (const auto& e : res.edges)
    res.galleries[e.child] = {*res.galleries.at(e.parent).offset + e.result.best_offset, SyncStatus::synchronized};
  return res;
}

SyncResult synchronize(const Collection& collection, const std::filesystem::path& features_dir,
                       const FeatureConfig& features, const SyncConfig& config) {
  return synchronize(collection, compute_similarity(collection, features_dir, features), config);
}

CorrectedCollection corrected_timestamps(const Collection& collection, const SyncResult& result) {
  CorrectedCollection out{collection, {}};
  for (auto& g : out.collection.galleries) {
    auto it = result.galleries.find(g.id);
    if (it == result.galleries.end()) fail("sync result has no entry for gallery '" + g.id + "'");
    if (it->second.status == SyncStatus::synchronized && it->second.offset) {
      g = apply_offset(g, *it->second.offset);
    } else {
      out.unsynchronized.push_back(g.id);
    }
  }
  return out;
}

std::string sync_result_to_json(const SyncResult& result) {
  nlohmann::json offsets = nlohmann::json::object();
  nlohmann::json status = nlohmann::json::object();
  for (const auto& [id, g] : result.galleries) {
    offsets[id] = g.offset ? nlohmann::json(*g.offset) : nlohmann::json(nullptr);
    status[id] = g.status == SyncStatus::synchronized ? "synchronized" : "unreachable";
  }
  nlohmann::json doc = {{"reference", result.reference}, {"offsets", offsets}, {"status", status}};
  return doc.dump(2) + "\n";
}

SyncResult parse_sync_result(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(std::string("offsets file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("reference") || !doc.contains("offsets") || !doc["offsets"].is_object())
    fail("offsets file needs 'reference' and 'offsets'");
  SyncResult r;
  r.reference = doc["reference"].get<std::string>();
  for (const auto& [id, v] : doc["offsets"].items()) {
    GalleryOffset g;
    if (v.is_number_integer()) {
      g = {v.get<Seconds>(), SyncStatus::synchronized};
    } else if (!v.is_null()) {
      fail("offset of '" + id + "' must be an integer or null");
    }
    if (doc.contains("status") && doc["status"].contains(id) && doc["status"][id] == "unreachable")
      g = {std::nullopt, SyncStatus::unreachable};
    r.galleries[id] = g;
  }
  if (!r.galleries.count(r.reference)) fail("reference gallery '" + r.reference + "' has no offset entry");
  return r;
}

}  // namespace gsync
