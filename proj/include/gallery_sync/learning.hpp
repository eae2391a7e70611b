#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gallery_sync/mrf.hpp"

namespace gsync {

/// Statistics of every candidate sequence on one training edge, and which
/// candidate is the true-offset sequence.
struct TrainingEdge {
  std::vector<Statistics> stats;
  std::size_t truth = 0;
};

/// Builds the candidate set from the links plus the true offset, so the true
/// sequence is always part of the normalizing set.
TrainingEdge make_training_edge(const std::vector<Link>& links, const Gallery& reference, const Gallery& sync,
                                Seconds true_offset, const MrfOptions& options = {});

/// -log p(x* | y; theta) summed over edges: theta.h(x*) + log sum_x exp(-theta.h(x)).
double negative_log_likelihood(std::span<const TrainingEdge> edges, const PotentialParams& params);

/// d NLL / d theta = sum over edges of h(x*) - E_theta[h].
Statistics nll_gradient(std::span<const TrainingEdge> edges, const PotentialParams& params);

struct LearningOptions {
  double learning_rate = 1e-3;
  std::size_t max_iterations = 1000;
  double gradient_tolerance = 1e-6;
  double floor = 1e-6;  // projection bound keeping gamma, delta positive
};

struct LearningResult {
  PotentialParams params;
  std::vector<double> nll;  // objective before each step, plus the final value
  std::size_t iterations = 0;
  bool converged = false;
};

/// Projected gradient descent on the (convex) negative log-likelihood.
LearningResult learn_parameters(std::span<const TrainingEdge> edges, const PotentialParams& initial,
                                const LearningOptions& options = {});

}  // namespace gsync
