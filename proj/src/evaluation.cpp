#include "gallery_sync/evaluation.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "gallery_sync/error.hpp"

namespace gsync {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("evaluation", msg); }

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
  return buf;
}

}  // namespace

EvalReport evaluate(const SyncResult& result, const GroundTruth& truth, Seconds max_error) {
  if (max_error <= 0) fail("max error must be positive");
  Seconds base = 0;
  if (auto it = truth.offsets.find(result.reference); it != truth.offsets.end()) base = it->second;
  for (const auto& [id, off] : truth.offsets)
    if (!result.galleries.count(id)) fail("ground truth lists gallery '" + id + "' which the result does not");

  EvalReport rep;
  rep.max_error = max_error;
  rep.galleries = result.galleries.size();
  Seconds error_sum = 0;
  for (const auto& [id, g] : result.galleries) {
    if (id == result.reference) continue;
    auto it = truth.offsets.find(id);
    if (it == truth.offsets.end()) fail("missing ground truth for gallery '" + id + "'");
    GalleryScore s;
    if (g.status == SyncStatus::synchronized && g.offset) {
      s.error = std::llabs(*g.offset - (it->second - base));
      s.synchronized = *s.error < max_error;
    }
    if (s.synchronized) {
      ++rep.synchronized;
      error_sum += *s.error;
    }
    rep.per_gallery[id] = s;
  }
  if (rep.galleries < 2) fail("evaluation needs at least two galleries");
  rep.precision = double(rep.synchronized) / double(rep.galleries - 1);
  if (rep.synchronized > 0)
    rep.accuracy = 1.0 - double(error_sum) / (double(rep.synchronized) * double(max_error));
  const double pa = rep.precision + rep.accuracy;
  rep.harmonic_mean = pa > 0.0 ? 2.0 * rep.precision * rep.accuracy / pa : 0.0;
  return rep;
}

std::string report_text(const EvalReport& r) {
  std::ostringstream out;
  out << "galleries      " << r.galleries << "\n"
      << "synchronized   " << r.synchronized << " / " << (r.galleries ? r.galleries - 1 : 0) << "\n"
      << "max error (s)  " << r.max_error << "\n"
      << "P (%)          " << percent(r.precision) << "\n"
      << "A (%)          " << percent(r.accuracy) << "\n"
      << "H (%)          " << percent(r.harmonic_mean) << "\n";
  for (const auto& [id, s] : r.per_gallery) {
    out << "  " << id << "  ";
    if (s.error) out << "error " << *s.error << " s";
    else out << "no estimate";
    out << (s.synchronized ? "" : "  (not synchronized)") << "\n";
  }
  return out.str();
}

std::string report_json(const EvalReport& r) {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [id, s] : r.per_gallery)
    per[id] = {{"error", s.error ? nlohmann::json(*s.error) : nlohmann::json(nullptr)},
               {"synchronized", s.synchronized}};
  nlohmann::json doc = {{"M", r.galleries},        {"M_syn", r.synchronized},
                        {"precision", r.precision}, {"accuracy", r.accuracy},
                        {"harmonic_mean", r.harmonic_mean}, {"max_error", r.max_error},
                        {"galleries", per}};
  return doc.dump(2) + "\n";
}

EvalReport parse_report_json(std::string_view json_text) {
  EvalReport r;
  try {
    const auto doc = nlohmann::json::parse(json_text);
    r.galleries = doc.at("M").get<std::size_t>();
    r.synchronized = doc.at("M_syn").get<std::size_t>();
    r.precision = doc.at("precision").get<double>();
    r.accuracy = doc.at("accuracy").get<double>();
    r.harmonic_mean = doc.at("harmonic_mean").get<double>();
    r.max_error = doc.at("max_error").get<Seconds>();
    for (const auto& [id, g] : doc.at("galleries").items()) {
      GalleryScore s;
      if (!g.at("error").is_null()) s.error = g.at("error").get<Seconds>();
      s.synchronized = g.at("synchronized").get<bool>();
      r.per_gallery[id] = s;
    }
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("malformed report: ") + e.what());
  }
  return r;
}

}  // namespace gsync
