#pragma once

#include <map>
#include <optional>
#include <string>

#include "gallery_sync/collection.hpp"
#include "gallery_sync/pipeline.hpp"

namespace gsync {

inline constexpr Seconds kDefaultMaxError = 1800;

struct GalleryScore {
  std::optional<Seconds> error;  // |estimated - true|; empty when no estimate
  bool synchronized = false;     // estimate present and error < max_error
};

struct EvalReport {
  std::size_t galleries = 0;     // M, reference included
  std::size_t synchronized = 0;  // M_syn
  double precision = 0.0;        // M_syn / (M - 1)
  double accuracy = 0.0;         // 1 - sum(err) / (M_syn * max_error); 0 when M_syn == 0
  double harmonic_mean = 0.0;    // 2PA / (P + A); 0 when P + A == 0
  Seconds max_error = kDefaultMaxError;
  std::map<std::string, GalleryScore> per_gallery;  // non-reference galleries
};

/// Scores offsets against ground truth. Truth given relative to a different
/// reference is re-based onto the result's reference when it lists that gallery.
EvalReport evaluate(const SyncResult& result, const GroundTruth& truth, Seconds max_error = kDefaultMaxError);

/// Aligned text table; percentages with one decimal.
std::string report_text(const EvalReport& report);
std::string report_json(const EvalReport& report);
EvalReport parse_report_json(std::string_view json_text);

}  // namespace gsync
