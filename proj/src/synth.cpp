#include "gallery_sync/synth.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "gallery_sync/error.hpp"
#include "gallery_sync/io.hpp"
#include "gallery_sync/kernels.hpp"

namespace gsync::synth {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("synth-gen", msg); }

constexpr Seconds kEpoch = 1'400'000'000;
constexpr GeoPoint kVenue{49.2827, -123.1207};

void check(const ScenarioConfig& c) {
  if (c.galleries < 2) fail("need at least 2 galleries to plant cross-gallery pairs");
  if (c.photos_per_gallery == 0) fail("photos per gallery must be positive");
  if (c.duration <= 0) fail("event duration must be positive");
  if (c.offset_range < 0) fail("offset range must be non-negative");
  if (!(c.planted_rate >= 0.0 && c.planted_rate <= 1.0)) fail("planted-pair rate must lie in [0, 1]");
  if (c.descriptor_dim == 0) fail("descriptor dim must be positive");
  if (!(c.noise >= 0.0)) fail("noise sigma must be non-negative");
  if (c.jitter < 0) fail("jitter must be non-negative");
  if (!c.offsets.empty() && (c.offsets.size() != c.galleries || c.offsets.front() != 0))
    fail("explicit offsets need one entry per gallery and 0 for the reference");
}

std::string gallery_name(std::size_t i, std::size_t count) {
  const int width = count >= 100 ? 3 : 2;
  char buf[32];
  std::snprintf(buf, sizeof buf, "g%0*zu", width, i + 1);
  return buf;
}

class Generator {
 public:
  explicit Generator(const ScenarioConfig& c) : cfg_(c), rng_(c.seed) {
    // Planted pairs sit about sigma * sqrt(2 dim) apart; keep every base
    // descriptor further than that plus a 5 sigma margin (and at least 1) from
    // every other.
    min_separation_ =
        1.0 + cfg_.noise * (2.0 * std::sqrt(2.0 * double(cfg_.descriptor_dim)) + 5.0);
  }

  std::vector<float> distinct_base() {
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<float> v(cfg_.descriptor_dim);
    for (int attempt = 0; attempt < 100; ++attempt) {
      for (auto& x : v) x = static_cast<float>(unit(rng_));
      bool ok = true;
      for (const auto& b : bases_)
        if (std::sqrt(kernels::squared_distance(v, b)) < min_separation_) {
          ok = false;
          break;
        }
      if (ok) break;
    }
    bases_.push_back(v);
    return v;
  }

  std::vector<float> noisy(const std::vector<float>& base) {
    if (cfg_.noise == 0.0) return base;
    std::normal_distribution<double> n(0.0, cfg_.noise);
    auto v = base;
    for (auto& x : v) x = static_cast<float>(double(x) + n(rng_));
    return v;
  }

  GeoPoint scatter(const GeoPoint& around, double degrees) {
    std::uniform_real_distribution<double> u(-degrees, degrees);
    return {around.lat + u(rng_), around.lon + u(rng_)};
  }

  Seconds uniform(Seconds lo, Seconds hi) { return std::uniform_int_distribution<Seconds>(lo, hi)(rng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

 private:
  const ScenarioConfig& cfg_;
  std::mt19937_64 rng_;
  double min_separation_;
  std::vector<std::vector<float>> bases_;
};

}  // namespace

Scenario generate(const ScenarioConfig& config) {
  check(config);
  Generator gen(config);
  const std::size_t k = config.galleries;
  const std::size_t per = config.photos_per_gallery;
  const auto planted = static_cast<std::size_t>(std::lround(config.planted_rate * double(per)));
  const std::size_t scenes = planted;

  std::vector<Seconds> offsets = config.offsets;
  if (offsets.empty()) {
    offsets.push_back(0);
    for (std::size_t g = 1; g < k; ++g) offsets.push_back(gen.uniform(-config.offset_range, config.offset_range));
  }

  struct Scene {
    Seconds time;
    std::vector<float> base;
    GeoPoint where;
  };
  std::vector<Scene> scene_list;
  for (std::size_t s = 0; s < scenes; ++s) {
    Scene sc;
    sc.time = gen.uniform(0, config.duration);
    sc.base = gen.distinct_base();
    sc.where = gen.scatter(kVenue, config.geo == GeoMode::track ? 0.05 : 0.005);
    scene_list.push_back(std::move(sc));
  }

  Scenario out;
  for (std::size_t g = 0; g < k; ++g) {
    Gallery gal;
    gal.id = gallery_name(g, k);
    // Per-gallery track: a straight walk across the area over the event.
    const GeoPoint start = gen.scatter(kVenue, 0.05);
    const GeoPoint end = gen.scatter(kVenue, 0.05);
    for (std::size_t j = 0; j < per; ++j) {
      Photo p;
      char buf[32];
      std::snprintf(buf, sizeof buf, "_p%03zu", j);
      p.id = gal.id + buf;
      p.gallery_id = gal.id;
      RegionFeatureSet fs{p.id, std::string(kSynthLayer), RowMatrix(1, config.descriptor_dim)};
      Seconds t_true = 0;
      int scene = -1;
      if (j < planted) {
        scene = static_cast<int>(gen.index(scenes));
        const auto& sc = scene_list[static_cast<std::size_t>(scene)];
        t_true = sc.time + gen.uniform(0, config.jitter) - config.jitter / 2;
        fs.vectors.values = gen.noisy(sc.base);
        if (config.geo != GeoMode::none) p.geo = gen.scatter(sc.where, 0.0002);
      } else {
        t_true = gen.uniform(0, config.duration);
        fs.vectors.values = gen.distinct_base();
        if (config.geo == GeoMode::venue) p.geo = gen.scatter(kVenue, 0.005);
        if (config.geo == GeoMode::track) {
          const double f = double(t_true) / double(config.duration);
          p.geo = GeoPoint{start.lat + f * (end.lat - start.lat), start.lon + f * (end.lon - start.lon)};
        }
      }
      p.timestamp = kEpoch + t_true - offsets[g];
      gal.photos.push_back(std::move(p));
      out.features.push_back(std::move(fs));
      out.scene_of.push_back(scene);
      out.true_time.push_back(t_true);
    }
    if (g > 0) out.truth.offsets[gal.id] = offsets[g];
    out.collection.galleries.push_back(std::move(gal));
  }
  out.collection.reference_gallery_id = out.collection.galleries.front().id;

  // validate() sorts each gallery by time; keep the side tables aligned with it.
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < out.features.size(); ++i) slot[out.features[i].photo_id] = i;
  validate(out.collection);
  Scenario sorted{out.collection, out.truth, {}, {}, {}};
  for (const auto& g : out.collection.galleries)
    for (const auto& p : g.photos) {
      const std::size_t i = slot.at(p.id);
      sorted.features.push_back(std::move(out.features[i]));
      sorted.scene_of.push_back(out.scene_of[i]);
      sorted.true_time.push_back(out.true_time[i]);
    }
  return sorted;
}

void write_scenario(const Scenario& scenario, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir / "features");
  write_file_atomic(out_dir / "manifest.json", collection_to_json(scenario.collection));
  write_file_atomic(out_dir / "ground_truth.json", ground_truth_to_json(scenario.truth));
  for (const auto& fs : scenario.features) write_gsft(out_dir / "features" / (fs.photo_id + ".gsft"), fs);
}

std::vector<VladDescriptor> raw_descriptors(const Scenario& scenario) {
  std::vector<VladDescriptor> out;
  out.reserve(scenario.features.size());
  for (const auto& fs : scenario.features) out.push_back(raw_descriptor(fs));
  return out;
}

}  // namespace gsync::synth
