#include "doctest.h"

#include <algorithm>

#include "gallery_sync/error.hpp"
#include "gallery_sync/pipeline.hpp"
#include "gallery_sync/synth.hpp"
#include "helpers.hpp"

using namespace gsync;

namespace {

SimilarityMatrix sparse_matrix(const Collection& c, const std::vector<std::tuple<std::string, std::string, double>>& strong) {
  std::vector<std::string> ids;
  for (const auto& g : c.galleries)
    for (const auto& p : g.photos) ids.push_back(p.id);
  const std::size_t n = ids.size();
  std::vector<double> v(n * n, 0.01);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  SimilarityMatrix probe(ids, v);
  for (const auto& [a, b, s] : strong) {
    const auto i = probe.index_of(a), j = probe.index_of(b);
    v[i * n + j] = v[j * n + i] = s;
  }
  return {ids, v};
}

synth::Scenario noiseless(std::uint64_t seed, std::size_t galleries = 5) {
  synth::ScenarioConfig cfg;
  cfg.galleries = galleries;
  cfg.photos_per_gallery = 20;
  cfg.noise = 0.0;
  cfg.jitter = 0;
  cfg.seed = seed;
  return synth::generate(cfg);
}

}  // namespace

TEST_CASE("two galleries with one duplicated photo") {
  auto a = testing::gallery("a", {1000, 5000, 9000});
  auto b = testing::gallery("b", {1000 - 7200, 3000, 12000});
  auto c = testing::collection({a, b});
  auto w = sparse_matrix(c, {{"a_0", "b_0", 1.0}});
  auto r = synchronize(c, w, {.alpha = 1.0 / 6.0});
  CHECK(r.reference == "a");
  CHECK(r.galleries.at("a").offset == 0);
  CHECK(r.galleries.at("b").offset == 7200);
  CHECK(r.galleries.at("b").status == SyncStatus::synchronized);
}

TEST_CASE("offsets compose along the tree") {
  auto a = testing::gallery("A", {0, 500, 1000, 1500});
  auto b = testing::gallery("B", {100, 400, 900, 2000});
  auto cc = testing::gallery("C", {300, 700, 1200, 940});
  auto c = testing::collection({a, b, cc});
  // A_1 (500) ~ B_1 (400) gives +100; B_2 (900) ~ the C photo at 940 gives -40.
  const auto& c_photos = c.gallery("C").photos;
  auto c140 = std::find_if(c_photos.begin(), c_photos.end(), [](const Photo& p) { return p.timestamp == 940; });
  REQUIRE(c140 != c_photos.end());
  auto w = sparse_matrix(c, {{"A_1", "B_1", 0.9}, {"B_2", c140->id, 0.8}});
  auto r = synchronize(c, w, {.alpha = 0.1});
  CHECK(r.galleries.at("B").offset == 100);
  CHECK(r.galleries.at("C").offset == 60);
  REQUIRE(r.edges.size() == 2);
  CHECK(r.edges[0].parent == "A");
  CHECK(r.edges[1].parent == "B");
  CHECK(*r.galleries.at("C").offset == *r.galleries.at("B").offset + r.edges[1].result.best_offset);
}

TEST_CASE("galleries outside the reference component are unreachable") {
  auto c = testing::collection({testing::gallery("a", {0, 10}), testing::gallery("b", {5, 15}),
                                testing::gallery("x", {0, 10}), testing::gallery("y", {3, 13})});
  auto w = sparse_matrix(c, {{"a_0", "b_0", 0.9}, {"x_0", "y_0", 0.9}});
  // floor(alpha N) = 0: no links at all, only the reference is placed.
  auto r = synchronize(c, w, {.alpha = 0.1});
  CHECK(r.galleries.at("a").offset == 0);
  for (const char* id : {"b", "x", "y"}) {
    CHECK(r.galleries.at(id).status == SyncStatus::unreachable);
    CHECK_FALSE(r.galleries.at(id).offset);
  }

  // With no link at all towards x/y they cannot be placed.
  LinkSet links;
  links[{"a", "b"}] = {{"a", "a_0", "b", "b_0", 0.9, -5}};
  auto g = build_graph(c, links);
  auto t = spanning_tree(g, "a");
  CHECK(unreachable_galleries(g, "a") == std::vector<std::string>{"x", "y"});
  CHECK(t.traversal.size() == 1);
}

TEST_CASE("unreachable status survives JSON and correction") {
  SyncResult r;
  r.reference = "a";
  r.galleries["a"] = {0, SyncStatus::synchronized};
  r.galleries["b"] = {-30, SyncStatus::synchronized};
  r.galleries["c"] = {std::nullopt, SyncStatus::unreachable};
  const auto text = sync_result_to_json(r);
  CHECK(text.find("\"c\": null") != std::string::npos);
  CHECK(text.find("\"unreachable\"") != std::string::npos);
  auto back = parse_sync_result(text);
  CHECK(back.reference == "a");
  CHECK(back.galleries.at("b").offset == -30);
  CHECK_FALSE(back.galleries.at("c").offset);
  CHECK(back.galleries.at("c").status == SyncStatus::unreachable);
  CHECK(sync_result_to_json(back) == text);
  CHECK_THROWS_AS(parse_sync_result(R"({"reference": "z", "offsets": {"a": 0}})"), Error);

  auto c = testing::collection({testing::gallery("a", {0, 10}), testing::gallery("b", {40, 50}), testing::gallery("c", {7})});
  auto fixed = corrected_timestamps(c, r);
  CHECK(fixed.collection.gallery("a") == c.gallery("a"));
  CHECK(fixed.collection.gallery("b").photos[0].timestamp == 10);
  CHECK(fixed.collection.gallery("c") == c.gallery("c"));
  CHECK(fixed.unsynchronized == std::vector<std::string>{"c"});
}

TEST_CASE("shift then correct restores the original") {
  auto scenario = noiseless(3);
  const auto& orig = scenario.collection;
  SyncResult r;
  r.reference = orig.reference_gallery_id;
  Collection shifted = orig;
  for (std::size_t i = 0; i < orig.galleries.size(); ++i) {
    const Seconds s = static_cast<Seconds>(i) * 1111 - 2000;
    shifted.galleries[i] = apply_offset(orig.galleries[i], s);
    r.galleries[orig.galleries[i].id] = {-s, SyncStatus::synchronized};
  }
  CHECK(corrected_timestamps(shifted, r).collection == orig);
}

TEST_CASE("noiseless synthetic data: exact offsets and true global order") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto s = noiseless(seed);
    auto w = similarity_matrix(synth::raw_descriptors(s));
    auto r = synchronize(s.collection, w, {});
    for (const auto& [id, off] : s.truth.offsets) CHECK(r.galleries.at(id).offset == off);
    auto fixed = corrected_timestamps(s.collection, r);
    std::map<std::string, Seconds> true_time;
    std::size_t i = 0;
    for (const auto& g : s.collection.galleries)
      for (const auto& p : g.photos) true_time[p.id] = s.true_time[i++];
    const Seconds epoch = fixed.collection.galleries[0].photos[0].timestamp - true_time.at(fixed.collection.galleries[0].photos[0].id);
    for (const auto& g : fixed.collection.galleries)
      for (const auto& p : g.photos) CHECK(p.timestamp - epoch == true_time.at(p.id));
  }
}

TEST_CASE("changing the reference shifts every offset by one constant") {
  for (std::uint64_t seed : {4u, 5u}) {
    auto s = noiseless(seed, 6);
    auto w = similarity_matrix(synth::raw_descriptors(s));
    auto base = synchronize(s.collection, w, {});
    for (const auto& g : s.collection.galleries) {
      Collection other = s.collection;
      other.reference_gallery_id = g.id;
      auto moved = synchronize(other, w, {});
      CHECK(moved.galleries.at(g.id).offset == 0);
      const Seconds shift = *moved.galleries.at(s.collection.reference_gallery_id).offset;
      for (const auto& [id, off] : base.galleries) CHECK(*moved.galleries.at(id).offset == *off.offset + shift);
    }
  }
}

TEST_CASE("reversing an edge negates its offset on noiseless data") {
  auto s = noiseless(6);
  auto w = similarity_matrix(synth::raw_descriptors(s));
  auto r = synchronize(s.collection, w, {});
  for (const auto& e : r.edges) {
    auto back = estimate_offset(e.links, s.collection.gallery(e.child), s.collection.gallery(e.parent), {});
    CHECK(back.best_offset == -e.result.best_offset);
  }
}

TEST_CASE("similarity from feature files") {
  auto dir = testing::scratch_dir("pipeline_features");
  auto s = noiseless(7, 3);
  synth::write_scenario(s, dir);
  auto direct = similarity_matrix(synth::raw_descriptors(s));
  auto loaded = compute_similarity(s.collection, dir / "features", {});
  CHECK(loaded.photo_ids() == direct.photo_ids());
  CHECK(std::equal(loaded.values().begin(), loaded.values().end(), direct.values().begin()));

  auto via_layer = compute_similarity(s.collection, dir / "features", {.layers = {"synth/flat"}});
  CHECK(std::equal(via_layer.values().begin(), via_layer.values().end(), direct.values().begin()));

  // Two identical layers fuse to the same matrix.
  std::filesystem::create_directories(dir / "features" / "copy");
  for (const auto& fs : s.features) {
    RegionFeatureSet c = fs;
    c.layer = "copy";
    write_gsft(dir / "features" / "copy" / (fs.photo_id + ".gsft"), c);
  }
  auto fused = compute_similarity(s.collection, dir / "features", {.layers = {"synth/flat", "copy"}, .encoding = DescriptorEncoding::raw});
  for (std::size_t i = 0; i < fused.values().size(); ++i)
    CHECK(fused.values()[i] == doctest::Approx(direct.values()[i]).epsilon(1e-15));

  // Forcing VLAD on the copy layer runs the vocabulary path.
  auto vlad = compute_similarity(s.collection, dir / "features",
                                 {.layers = {"copy"}, .encoding = DescriptorEncoding::vlad, .vocabulary_size = 4});
  CHECK(vlad.size() == s.collection.photo_count());
  CHECK(vlad(0, 0) == 1.0);
  CHECK_THROWS_AS(compute_similarity(s.collection, dir / "features", {.layers = {"inception3a"}}), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("descriptor encoding selection") {
  CHECK(uses_vlad("inception3a", DescriptorEncoding::automatic));
  CHECK(uses_vlad("conv2/norm2", DescriptorEncoding::automatic));
  CHECK_FALSE(uses_vlad("loss3/classifier", DescriptorEncoding::automatic));
  CHECK_FALSE(uses_vlad("synth/flat", DescriptorEncoding::automatic));
  CHECK(uses_vlad("synth/flat", DescriptorEncoding::vlad));
  CHECK_FALSE(uses_vlad("inception3a", DescriptorEncoding::raw));
}
