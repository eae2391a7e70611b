#include "gallery_sync/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gallery_sync/error.hpp"

namespace gsync {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("offset-mrf", msg); }

double energy(const Statistics& h, const PotentialParams& p) { return p.gamma * h[0] + p.delta * h[1]; }

void check(std::span<const TrainingEdge> edges) {
  if (edges.empty()) fail("parameter learning needs at least one training edge");
  for (const auto& e : edges)
    if (e.stats.empty() || e.truth >= e.stats.size()) fail("malformed training edge");
}

/// log sum_x exp(-E(x)) and the matching Gibbs weights, computed stably.
double log_partition(const TrainingEdge& e, const PotentialParams& p, std::vector<double>* weights) {
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& h : e.stats) top = std::max(top, -energy(h, p));
  double sum = 0.0;
  if (weights) weights->resize(e.stats.size());
  for (std::size_t i = 0; i < e.stats.size(); ++i) {
    const double w = std::exp(-energy(e.stats[i], p) - top);
    sum += w;
    if (weights) (*weights)[i] = w;
  }
  if (weights)
    for (double& w : *weights) w /= sum;
  return top + std::log(sum);
}

}  // namespace

TrainingEdge make_training_edge(const std::vector<Link>& links, const Gallery& reference, const Gallery& sync,
                                Seconds true_offset, const MrfOptions& options) {
  const Seconds extra[] = {true_offset};
  const auto model = build_edge_model(links, reference, sync, options, extra);
  TrainingEdge e;
  for (std::size_t m = 0; m < model.candidate_count(); ++m) {
    e.stats.push_back(sufficient_statistics(model, m));
    if (model.offset(m) == true_offset) e.truth = m;
  }
  return e;
}

double negative_log_likelihood(std::span<const TrainingEdge> edges, const PotentialParams& params) {
  check(edges);
  double nll = 0.0;
  for (const auto& e : edges) nll += energy(e.stats[e.truth], params) + log_partition(e, params, nullptr);
  return nll;
}

Statistics nll_gradient(std::span<const TrainingEdge> edges, const PotentialParams& params) {
  check(edges);
  Statistics g{0.0, 0.0};
  std::vector<double> p;
  for (const auto& e : edges) {
    log_partition(e, params, &p);
    for (std::size_t j = 0; j < 2; ++j) {
      double expected = 0.0;
      for (std::size_t i = 0; i < e.stats.size(); ++i) expected += p[i] * e.stats[i][j];
      g[j] += e.stats[e.truth][j] - expected;
    }
  }
  return g;
}

LearningResult learn_parameters(std::span<const TrainingEdge> edges, const PotentialParams& initial,
                                const LearningOptions& options) {
  check(edges);
  LearningResult res;
  res.params = {std::max(initial.gamma, options.floor), std::max(initial.delta, options.floor)};
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    res.nll.push_back(negative_log_likelihood(edges, res.params));
    const auto g = nll_gradient(edges, res.params);
    if (std::hypot(g[0], g[1]) < options.gradient_tolerance) {
      res.converged = true;
      return res;
    }
    res.params.gamma = std::max(options.floor, res.params.gamma - options.learning_rate * g[0]);
    res.params.delta = std::max(options.floor, res.params.delta - options.learning_rate * g[1]);
    res.iterations = it + 1;
  }
  res.nll.push_back(negative_log_likelihood(edges, res.params));
  return res;
}

}  // namespace gsync
