#include "gallery_sync/mrf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include <json.hpp>

#include "gallery_sync/error.hpp"
#include "gallery_sync/geo.hpp"
#include "gallery_sync/io.hpp"

namespace gsync {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("offset-mrf", msg); }

void check_params(const PotentialParams& p) {
  if (!(p.gamma > 0.0) || !(p.delta > 0.0) || !std::isfinite(p.gamma) || !std::isfinite(p.delta))
    fail("gamma and delta must be finite and positive");
}

double ratio(double value, double max) { return max > 0.0 ? value / max : 0.0; }

std::vector<EdgePhoto> participating(const Gallery& gallery, const std::set<std::string>& ids) {
  std::vector<EdgePhoto> out;
  for (const auto& p : gallery.photos)
    if (ids.count(p.id)) out.push_back({p.id, p.timestamp, p.geo});
  if (out.size() != ids.size()) fail("a link names a photo missing from gallery '" + gallery.id + "'");
  return out;
}

}  // namespace

PotentialParams parse_params(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(std::string("params file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("gamma") || !doc.contains("delta") || !doc["gamma"].is_number() ||
      !doc["delta"].is_number())
    fail("params file must look like {\"gamma\": <real>, \"delta\": <real>}");
  PotentialParams p{doc["gamma"].get<double>(), doc["delta"].get<double>()};
  check_params(p);
  return p;
}

PotentialParams load_params(const std::filesystem::path& path) { return parse_params(read_text_file(path)); }

std::string params_to_json(const PotentialParams& params) {
  nlohmann::json doc = {{"gamma", params.gamma}, {"delta", params.delta}};
  return doc.dump(2) + "\n";
}

double temporal_distance(const TimedPair& first, const TimedPair& second, Seconds offset) {
  const Seconds r1 = first.sync_time + offset - first.ref_time;
  const Seconds r2 = second.sync_time + offset - second.ref_time;
  return static_cast<double>(std::llabs(r1)) + static_cast<double>(std::llabs(r2));
}

double unary_potential(double geo_distance, const PotentialParams& params, double geo_max) {
  return std::exp(-params.gamma * ratio(geo_distance, geo_max));
}

double pairwise_potential(double time_distance, const PotentialParams& params, double time_max) {
  return std::exp(-params.delta * ratio(time_distance, time_max));
}

std::size_t nearest_reference(const std::vector<EdgePhoto>& reference, Seconds target) {
  if (reference.empty()) fail("no reference photos to match against");
  auto it = std::lower_bound(reference.begin(), reference.end(), target,
                             [](const EdgePhoto& p, Seconds t) { return p.timestamp < t; });
  if (it == reference.begin()) return 0;
  // lower_bound lands on the first photo of a run of equal timestamps; the
  // run before it has to be rewound by hand. The earlier photo wins a tie.
  const std::size_t before = static_cast<std::size_t>(it - reference.begin()) - 1;
  std::size_t first_before = before;
  while (first_before > 0 && reference[first_before - 1].timestamp == reference[before].timestamp) --first_before;
  if (it == reference.end()) return first_before;
  const auto after = before + 1;
  return (target - reference[before].timestamp) <= (reference[after].timestamp - target) ? first_before : after;
}

EdgeModel build_edge_model(const std::vector<Link>& links, const Gallery& reference, const Gallery& sync,
                           const MrfOptions& options, std::span<const Seconds> extra_candidates) {
  if (links.empty()) fail("no links between '" + reference.id + "' and '" + sync.id + "'");
  std::vector<Link> oriented;
  oriented.reserve(links.size());
  for (const auto& l : links) {
    if (l.gallery_a == reference.id && l.gallery_b == sync.id) oriented.push_back(l);
    else if (l.gallery_a == sync.id && l.gallery_b == reference.id) oriented.push_back(reversed(l));
    else fail("link " + l.photo_a + "-" + l.photo_b + " does not join '" + reference.id + "' and '" + sync.id + "'");
  }

  std::set<std::string> ref_ids, sync_ids;
  for (const auto& l : oriented) {
    ref_ids.insert(l.photo_a);
    sync_ids.insert(l.photo_b);
  }

  EdgeModel m;
  m.options = options;
  m.reference = participating(reference, ref_ids);
  m.sync = participating(sync, sync_ids);

  auto offsets = candidate_offsets(oriented);
  for (Seconds extra : extra_candidates)
    if (std::find(offsets.begin(), offsets.end(), extra) == offsets.end()) offsets.push_back(extra);

  const std::size_t n = m.sync.size();
  const std::size_t q = offsets.size();
  for (Seconds off : offsets) {
    CorrespondenceSequence seq{off, {}};
    seq.assigned.reserve(n);
    for (const auto& y : m.sync) seq.assigned.push_back(nearest_reference(m.reference, y.timestamp + off));
    m.sequences.push_back(std::move(seq));
  }

  std::vector<std::vector<double>> geo(q, std::vector<double>(n));
  std::vector<std::vector<double>> time(q, std::vector<double>(n ? n - 1 : 0));
  m.geo_max.assign(n, 0.0);
  m.time_max.assign(n ? n - 1 : 0, 0.0);
  for (std::size_t c = 0; c < q; ++c) {
    const auto& seq = m.sequences[c];
    const Seconds shift = options.offset_adjusted_time ? seq.offset : 0;
    for (std::size_t k = 0; k < n; ++k) {
      geo[c][k] = geo::orthodromic_distance(m.reference[seq.assigned[k]].geo, m.sync[k].geo);
      m.geo_max[k] = std::max(m.geo_max[k], geo[c][k]);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const TimedPair a{m.sync[i].timestamp, m.reference[seq.assigned[i]].timestamp};
      const TimedPair b{m.sync[i + 1].timestamp, m.reference[seq.assigned[i + 1]].timestamp};
      time[c][i] = temporal_distance(a, b, shift);
      m.time_max[i] = std::max(m.time_max[i], time[c][i]);
    }
  }
  m.geo_ratio.assign(q, std::vector<double>(n));
  m.time_ratio.assign(q, std::vector<double>(n ? n - 1 : 0));
  for (std::size_t c = 0; c < q; ++c) {
    for (std::size_t k = 0; k < n; ++k) m.geo_ratio[c][k] = ratio(geo[c][k], m.geo_max[k]);
    for (std::size_t i = 0; i + 1 < n; ++i) m.time_ratio[c][i] = ratio(time[c][i], m.time_max[i]);
  }
  return m;
}

Statistics sufficient_statistics(const EdgeModel& model, std::size_t candidate) {
  Statistics h{0.0, 0.0};
  for (double r : model.geo_ratio[candidate]) h[0] += r;
  for (double r : model.time_ratio[candidate]) h[1] += r;
  return h;
}

double score_sequence(const EdgeModel& model, std::size_t candidate, const PotentialParams& params) {
  const auto h = sufficient_statistics(model, candidate);
  return -params.gamma * h[0] - params.delta * h[1];
}

bool preferred(double score, Seconds offset, double other_score, Seconds other_offset) {
  const double scale = std::max({1.0, std::abs(score), std::abs(other_score)});
  if (std::abs(score - other_score) > 1e-9 * scale) return score > other_score;
  if (std::llabs(offset) != std::llabs(other_offset)) return std::llabs(offset) < std::llabs(other_offset);
  return offset < other_offset;
}

MaxSumResult max_sum(const EdgeModel& model, const PotentialParams& params) {
  check_params(params);
  const std::size_t q = model.candidate_count();
  const std::size_t n = model.chain_length();
  if (q == 0 || n == 0) fail("max-sum needs at least one candidate and one photo");

  // State s of node x_k is "photo k matched under candidate offset s". Every
  // node of one sequence shares the same candidate, so ln psi(x_i = s', x_{i+1} = s)
  // is -inf unless s' == s and the max over predecessors has a single term.
  auto log_phi = [&](std::size_t s, std::size_t k) { return -params.gamma * model.geo_ratio[s][k]; };
  auto log_psi = [&](std::size_t s, std::size_t i) { return -params.delta * model.time_ratio[s][i]; };

  // mu_{x_1 -> psi_1}(s) = ln phi(x_1, y_1): the observed leaf sends 0.
  std::vector<double> to_factor(q);
  for (std::size_t s = 0; s < q; ++s) to_factor[s] = log_phi(s, 0);

  std::vector<double> to_node(q, 0.0);  // mu_{psi_{i} -> x_{i+1}}
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t s = 0; s < q; ++s) to_node[s] = log_psi(s, i) + to_factor[s];
    if (i + 2 < n)
      for (std::size_t s = 0; s < q; ++s) to_factor[s] = to_node[s] + log_phi(s, i + 1);
  }

  MaxSumResult res;
  res.root_scores.resize(q);
  for (std::size_t s = 0; s < q; ++s)
    res.root_scores[s] = n == 1 ? to_factor[s] : log_phi(s, n - 1) + to_node[s];
  for (std::size_t s = 1; s < q; ++s)
    if (preferred(res.root_scores[s], model.offset(s), res.root_scores[res.best], model.offset(res.best)))
      res.best = s;
  return res;
}

std::size_t exhaustive_argmax(const EdgeModel& model, const PotentialParams& params) {
  if (model.candidate_count() == 0) fail("no candidates to score");
  std::size_t best = 0;
  double best_score = score_sequence(model, 0, params);
  for (std::size_t s = 1; s < model.candidate_count(); ++s) {
    const double sc = score_sequence(model, s, params);
    if (preferred(sc, model.offset(s), best_score, model.offset(best))) {
      best = s;
      best_score = sc;
    }
  }
  return best;
}

EdgeSyncResult estimate_offset(const EdgeModel& model, const PotentialParams& params) {
  const auto ms = max_sum(model, params);
  EdgeSyncResult r;
  r.best_offset = model.offset(ms.best);
  r.candidate_count = model.candidate_count();
  for (std::size_t s = 0; s < model.candidate_count(); ++s) r.scores[model.offset(s)] = ms.root_scores[s];
  return r;
}

EdgeSyncResult estimate_offset(const std::vector<Link>& links, const Gallery& reference, const Gallery& sync,
                               const PotentialParams& params, const MrfOptions& options) {
  return estimate_offset(build_edge_model(links, reference, sync, options), params);
}

}  // namespace gsync
