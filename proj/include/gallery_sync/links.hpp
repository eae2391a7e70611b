#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gallery_sync/collection.hpp"
#include "gallery_sync/similarity.hpp"

namespace gsync {

/// A cross-gallery pair of similar photos. `implied_offset` converts gallery
/// B's clock into gallery A's: t_b + implied_offset == t_a.
struct Link {
  std::string gallery_a;
  std::string photo_a;
  std::string gallery_b;
  std::string photo_b;
  double similarity = 0.0;
  Seconds implied_offset = 0;

  friend bool operator==(const Link&, const Link&) = default;
};

/// Same link seen from the other gallery.
Link reversed(const Link& link);

/// Unordered gallery pair, stored with `first` the gallery listed earlier in the manifest.
using GalleryPair = std::pair<std::string, std::string>;

/// Per gallery pair, links sorted by descending similarity.
using LinkSet = std::map<GalleryPair, std::vector<Link>>;

enum class LinkApproach { exact, coverage };

inline constexpr double kDefaultAlpha = 0.1;

/// floor(alpha * N) with N the total photo count.
std::size_t links_per_pair(const Collection& collection, double alpha);

/// Top floor(alpha N) links for every gallery pair.
LinkSet discover_links_exact(const SimilarityMatrix& w, const Collection& collection, double alpha);

/// Single global scan in descending similarity. Whenever coverage (pairs with a
/// link over all pairs) first reaches 10%, 20%, ... 100%, pairs already holding
/// floor(alpha N) links stop collecting. After the 100% milestone a pair stops
/// as soon as it reaches floor(alpha N).
LinkSet discover_links_coverage(const SimilarityMatrix& w, const Collection& collection, double alpha);

LinkSet discover_links(LinkApproach approach, const SimilarityMatrix& w, const Collection& collection, double alpha);

/// Distinct implied offsets, strongest first (by the best link implying each).
std::vector<Seconds> candidate_offsets(const std::vector<Link>& links);

/// One JSON object per line: {"a","b","offset","sim"}.
std::string link_set_to_jsonl(const LinkSet& links);

}  // namespace gsync
