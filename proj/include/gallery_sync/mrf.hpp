#pragma once

// Offset estimation for one gallery pair. The gallery to synchronize is a chain
// of hidden nodes x_1..x_N (one per participating photo, in time order), each
// observing its own photo y_k. A candidate offset fixes every node's state: the
// reference photo closest to t_y + offset. Geo distance drives the unary
// factors, temporal misalignment of consecutive correspondences the pairwise
// ones. The MAP offset comes from max-sum over that chain.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gallery_sync/collection.hpp"
#include "gallery_sync/links.hpp"

namespace gsync {

/// Weights of the geo (gamma) and temporal (delta) terms. Both > 0.
struct PotentialParams {
  double gamma = 1.0;
  double delta = 1.0;

  friend bool operator==(const PotentialParams&, const PotentialParams&) = default;
};

PotentialParams parse_params(std::string_view json_text);
PotentialParams load_params(const std::filesystem::path& path);
std::string params_to_json(const PotentialParams& params);

struct MrfOptions {
  /// Compare t_y + offset against t_x inside the temporal distance. When false
  /// the raw t_y is used, which makes the offset itself dominate D_T.
  bool offset_adjusted_time = true;
};

struct EdgePhoto {
  std::string id;
  Seconds timestamp = 0;
  std::optional<GeoPoint> geo;
};

/// One candidate's assignment: assigned[k] indexes the reference photo matched to sync photo k.
struct CorrespondenceSequence {
  Seconds offset = 0;
  std::vector<std::size_t> assigned;
};

/// Sufficient statistics (h1 geo, h2 time) of one candidate sequence.
using Statistics = std::array<double, 2>;

/// Precomputed state for one directed edge (reference <- sync).
struct EdgeModel {
  std::vector<EdgePhoto> reference;  // time order
  std::vector<EdgePhoto> sync;       // time order
  std::vector<CorrespondenceSequence> sequences;  // one per candidate offset
  std::vector<double> geo_max;   // D_G max over candidates, per sync photo k
  std::vector<double> time_max;  // D_T max over candidates, per chain link i
  std::vector<std::vector<double>> geo_ratio;   // [m][k] D_G / D_G max (0 when max is 0)
  std::vector<std::vector<double>> time_ratio;  // [m][i] D_T / D_T max (0 when max is 0)
  MrfOptions options;

  std::size_t candidate_count() const { return sequences.size(); }
  std::size_t chain_length() const { return sync.size(); }
  Seconds offset(std::size_t m) const { return sequences[m].offset; }
};

/// Timestamp pair of one correspondence.
struct TimedPair {
  Seconds sync_time = 0;
  Seconds ref_time = 0;
};

/// L1 misalignment of two consecutive correspondences under `offset`.
double temporal_distance(const TimedPair& first, const TimedPair& second, Seconds offset);

/// exp(-gamma * d / d_max), with 0/0 read as ratio 0.
double unary_potential(double geo_distance, const PotentialParams& params, double geo_max);
double pairwise_potential(double time_distance, const PotentialParams& params, double time_max);

/// Reference photo whose timestamp is closest to `target` (ties -> earlier).
std::size_t nearest_reference(const std::vector<EdgePhoto>& reference, Seconds target);

/// Builds the model from the links of one edge. Links may be oriented either
/// way; offsets are taken as converting the sync clock into the reference
/// clock. `extra_candidates` are appended after the link-derived offsets.
EdgeModel build_edge_model(const std::vector<Link>& links, const Gallery& reference, const Gallery& sync,
                           const MrfOptions& options = {}, std::span<const Seconds> extra_candidates = {});

Statistics sufficient_statistics(const EdgeModel& model, std::size_t candidate);

/// Unnormalized log-score -gamma h1 - delta h2 of one candidate.
double score_sequence(const EdgeModel& model, std::size_t candidate, const PotentialParams& params);

/// Tie rule shared by every argmax: higher score, then smaller |offset|, then
/// smaller offset. Scores within 1e-9 relative count as equal.
bool preferred(double score, Seconds offset, double other_score, Seconds other_offset);

struct MaxSumResult {
  std::vector<double> root_scores;  // per candidate state at the root x_N
  std::size_t best = 0;
};

/// Leaves-to-root max-sum messages along the chain, maximized at x_N.
MaxSumResult max_sum(const EdgeModel& model, const PotentialParams& params);

/// Reference answer: score every candidate sequence and take the best.
std::size_t exhaustive_argmax(const EdgeModel& model, const PotentialParams& params);

struct EdgeSyncResult {
  Seconds best_offset = 0;
  std::map<Seconds, double> scores;
  std::size_t candidate_count = 0;
};

/// MAP offset converting `sync` timestamps into `reference` time.
EdgeSyncResult estimate_offset(const std::vector<Link>& links, const Gallery& reference, const Gallery& sync,
                               const PotentialParams& params, const MrfOptions& options = {});
EdgeSyncResult estimate_offset(const EdgeModel& model, const PotentialParams& params);

}  // namespace gsync
