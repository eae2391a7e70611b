#include "gallery_sync/links.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "gallery_sync/error.hpp"

namespace gsync {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("links", msg); }

struct Candidate {
  double similarity;
  const Photo* a;
  const Photo* b;
};

bool stronger(const Candidate& x, const Candidate& y) {
  if (x.similarity != y.similarity) return x.similarity > y.similarity;
  if (x.a->id != y.a->id) return x.a->id < y.a->id;
  return x.b->id < y.b->id;
}

Link make_link(const Candidate& c) {
  return {c.a->gallery_id, c.a->id, c.b->gallery_id, c.b->id, c.similarity, c.a->timestamp - c.b->timestamp};
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail("alpha must lie in (0, 1], got " + std::to_string(alpha));
}

/// Per-gallery similarity-matrix indices of each photo.
std::vector<std::vector<std::size_t>> matrix_indices(const SimilarityMatrix& w, const Collection& c) {
  std::vector<std::vector<std::size_t>> idx(c.galleries.size());
  for (std::size_t g = 0; g < c.galleries.size(); ++g)
    for (const auto& p : c.galleries[g].photos) idx[g].push_back(w.index_of(p.id));
  return idx;
}

std::vector<Candidate> cross_pairs(const SimilarityMatrix& w, const Collection& c,
                                   const std::vector<std::vector<std::size_t>>& idx, std::size_t ga,
                                   std::size_t gb) {
  const auto& A = c.galleries[ga].photos;
  const auto& B = c.galleries[gb].photos;
  std::vector<Candidate> out;
  out.reserve(A.size() * B.size());
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < B.size(); ++j) out.push_back({w(idx[ga][i], idx[gb][j]), &A[i], &B[j]});
  return out;
}

}  // namespace

Link reversed(const Link& l) {
  return {l.gallery_b, l.photo_b, l.gallery_a, l.photo_a, l.similarity, -l.implied_offset};
}

std::size_t links_per_pair(const Collection& collection, double alpha) {
  return static_cast<std::size_t>(std::floor(alpha * static_cast<double>(collection.photo_count())));
}

LinkSet discover_links_exact(const SimilarityMatrix& w, const Collection& collection, double alpha) {
  check_alpha(alpha);
  const std::size_t cap = links_per_pair(collection, alpha);
  const auto idx = matrix_indices(w, collection);
  const std::size_t k = collection.galleries.size();

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) pairs.emplace_back(a, b);

  std::vector<std::vector<Link>> per_pair(pairs.size());
  const auto np = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t pi = 0; pi < np; ++pi) {
    const auto [ga, gb] = pairs[static_cast<std::size_t>(pi)];
    auto cands = cross_pairs(w, collection, idx, ga, gb);
    const std::size_t keep = std::min(cap, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep), cands.end(), stronger);
    auto& out = per_pair[static_cast<std::size_t>(pi)];
    for (std::size_t i = 0; i < keep; ++i) out.push_back(make_link(cands[i]));
  }

  LinkSet result;
  for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
    if (per_pair[pi].empty()) continue;
    result[{collection.galleries[pairs[pi].first].id, collection.galleries[pairs[pi].second].id}] =
        std::move(per_pair[pi]);
  }
  return result;
}

LinkSet discover_links_coverage(const SimilarityMatrix& w, const Collection& collection, double alpha) {
  check_alpha(alpha);
  const std::size_t cap = links_per_pair(collection, alpha);
  const auto idx = matrix_indices(w, collection);
  const std::size_t k = collection.galleries.size();
  const std::size_t total_pairs = k * (k - 1) / 2;

  struct Tagged {
    Candidate cand;
    std::size_t pair;
  };
  std::vector<Tagged> all;
  std::vector<GalleryPair> pair_ids;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) {
      for (const auto& c : cross_pairs(w, collection, idx, a, b)) all.push_back({c, pair_ids.size()});
      pair_ids.emplace_back(collection.galleries[a].id, collection.galleries[b].id);
    }
  std::sort(all.begin(), all.end(), [](const Tagged& x, const Tagged& y) { return stronger(x.cand, y.cand); });

  std::vector<std::vector<Link>> per_pair(total_pairs);
  std::vector<bool> frozen(total_pairs, false);
  std::size_t frozen_count = 0;
  std::size_t connected = 0;
  std::size_t milestones_reached = 0;  // milestone m (1..10) means coverage >= m/10

  auto freeze_full_pairs = [&] {
    for (std::size_t p = 0; p < total_pairs; ++p)
      if (!frozen[p] && per_pair[p].size() >= cap) {
        frozen[p] = true;
        ++frozen_count;
      }
  };

  for (const auto& t : all) {
    if (frozen_count == total_pairs) break;
    if (frozen[t.pair]) continue;
    per_pair[t.pair].push_back(make_link(t.cand));
    if (per_pair[t.pair].size() == 1) ++connected;
    // Integer form of connected / total >= m / 10; every milestone crossed by
    // this link is applied in order.
    while (milestones_reached < 10 && connected * 10 >= (milestones_reached + 1) * total_pairs) {
      ++milestones_reached;
      freeze_full_pairs();
    }
    if (milestones_reached == 10 && !frozen[t.pair] && per_pair[t.pair].size() >= cap) {
      frozen[t.pair] = true;
      ++frozen_count;
    }
  }

  LinkSet result;
  for (std::size_t p = 0; p < total_pairs; ++p)
    if (!per_pair[p].empty()) result[pair_ids[p]] = std::move(per_pair[p]);
  return result;
}

LinkSet discover_links(LinkApproach approach, const SimilarityMatrix& w, const Collection& collection,
                       double alpha) {
  return approach == LinkApproach::exact ? discover_links_exact(w, collection, alpha)
                                         : discover_links_coverage(w, collection, alpha);
}

std::vector<Seconds> candidate_offsets(const std::vector<Link>& links) {
  std::map<Seconds, double> best;
  for (const auto& l : links) {
    auto [it, inserted] = best.emplace(l.implied_offset, l.similarity);
    if (!inserted) it->second = std::max(it->second, l.similarity);
  }
  std::vector<std::pair<Seconds, double>> ordered(best.begin(), best.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
  std::vector<Seconds> out;
  out.reserve(ordered.size());
  for (const auto& [off, sim] : ordered) out.push_back(off);
  return out;
}

std::string link_set_to_jsonl(const LinkSet& links) {
  std::ostringstream out;
  for (const auto& [pair, list] : links)
    for (const auto& l : list) {
      nlohmann::json j = {{"a", l.photo_a}, {"b", l.photo_b}, {"sim", l.similarity}, {"offset", l.implied_offset}};
      out << j.dump() << '\n';
    }
  return out.str();
}

}  // namespace gsync
