#include "doctest.h"

#include <cmath>
#include <random>

#include "gallery_sync/error.hpp"
#include "gallery_sync/learning.hpp"
#include "helpers.hpp"

using namespace gsync;

namespace {

std::vector<TrainingEdge> random_edges(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 4), cands(2, 8);
  std::uniform_real_distribution<double> h(0.0, 6.0);
  std::vector<TrainingEdge> edges(static_cast<std::size_t>(count(rng)));
  for (auto& e : edges) {
    e.stats.resize(static_cast<std::size_t>(cands(rng)));
    for (auto& s : e.stats) s = {h(rng), h(rng)};
    e.truth = rng() % e.stats.size();
  }
  return edges;
}

double relative_error(double a, double b) { return std::abs(a - b) / std::max({1e-8, std::abs(a), std::abs(b)}); }

}  // namespace

TEST_CASE("NLL and gradient on a hand-sized edge") {
  std::vector<TrainingEdge> e{{{{0.2, 1.0}, {0.6, 0.5}}, 0}};
  const PotentialParams p{2.0, 1.0};
  // E0 = 0.4 + 1.0 = 1.4, E1 = 1.2 + 0.5 = 1.7
  const double z = std::exp(-1.4) + std::exp(-1.7);
  CHECK(negative_log_likelihood(e, p) == doctest::Approx(1.4 + std::log(z)).epsilon(1e-14));
  const double p0 = std::exp(-1.4) / z, p1 = std::exp(-1.7) / z;
  const auto g = nll_gradient(e, p);
  CHECK(g[0] == doctest::Approx(0.2 - (p0 * 0.2 + p1 * 0.6)).epsilon(1e-14));
  CHECK(g[1] == doctest::Approx(1.0 - (p0 * 1.0 + p1 * 0.5)).epsilon(1e-14));
}

TEST_CASE("uninformative data leaves the parameters alone") {
  std::vector<TrainingEdge> e{{{{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}}, 1}};
  const auto g = nll_gradient(e, {});
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.0);
  auto res = learn_parameters(e, {1.0, 1.0});
  CHECK(res.params == PotentialParams{1.0, 1.0});
  CHECK(res.converged);
  CHECK(res.iterations == 0);
}

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> theta(0.1, 3.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    auto edges = random_edges(rng);
    const PotentialParams p{theta(rng), theta(rng)};
    const auto g = nll_gradient(edges, p);
    const double fd_gamma = (negative_log_likelihood(edges, {p.gamma + h, p.delta}) -
                             negative_log_likelihood(edges, {p.gamma - h, p.delta})) / (2 * h);
    const double fd_delta = (negative_log_likelihood(edges, {p.gamma, p.delta + h}) -
                             negative_log_likelihood(edges, {p.gamma, p.delta - h})) / (2 * h);
    CHECK(relative_error(g[0], fd_gamma) < 1e-4);
    CHECK(relative_error(g[1], fd_delta) < 1e-4);
  }
}

TEST_CASE("descent with step 1e-3 never increases the NLL") {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 10; ++trial) {
    auto edges = random_edges(rng);
    auto res = learn_parameters(edges, {1.0, 1.0}, {.learning_rate = 1e-3, .max_iterations = 100});
    for (std::size_t i = 1; i < res.nll.size(); ++i) CHECK(res.nll[i] <= res.nll[i - 1]);
    CHECK(res.params.gamma >= 1e-6);
    CHECK(res.params.delta >= 1e-6);
  }
}

TEST_CASE("learned gamma matches a grid search") {
  // Two edges pull gamma in opposite directions; delta statistics are flat.
  std::vector<TrainingEdge> e{{{{0.2, 1.0}, {0.6, 1.0}}, 0}, {{{0.5, 1.0}, {0.2, 1.0}}, 0}};
  double best_gamma = 0, best_nll = INFINITY;
  for (double g = 1e-6; g < 20.0; g += 1e-4) {
    const double v = negative_log_likelihood(e, {g, 1.0});
    if (v < best_nll) {
      best_nll = v;
      best_gamma = g;
    }
  }
  auto res = learn_parameters(e, {1.0, 1.0}, {.learning_rate = 2.0, .max_iterations = 100000, .gradient_tolerance = 1e-12});
  CHECK(res.converged);
  CHECK(res.params.gamma == doctest::Approx(best_gamma).epsilon(1e-3));
  CHECK(res.params.delta == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("projection keeps parameters positive") {
  // Truth has the larger geo statistic, so the objective wants gamma below zero.
  std::vector<TrainingEdge> e{{{{2.0, 0.0}, {0.0, 0.0}}, 0}};
  auto res = learn_parameters(e, {1.0, 1.0}, {.learning_rate = 1.0, .max_iterations = 50});
  CHECK(res.params.gamma == 1e-6);
}

TEST_CASE("training edges carry the true offset") {
  auto ref = testing::gallery("r", {100, 400, 900});
  auto sync = testing::gallery("s", {0, 300, 800});
  std::vector<Link> links{{"r", "r_0", "s", "s_2", 0.9, 100 - 800}};
  auto e = make_training_edge(links, ref, sync, 100);
  REQUIRE(e.stats.size() == 2);
  CHECK(e.truth == 1);
  auto again = make_training_edge({{"r", "r_0", "s", "s_0", 0.9, 100}}, ref, sync, 100);
  CHECK(again.stats.size() == 1);
  CHECK(again.truth == 0);
}

TEST_CASE("learning rejects empty or malformed input") {
  CHECK_THROWS_AS(learn_parameters({}, {}), Error);
  std::vector<TrainingEdge> bad{{{{0.0, 0.0}}, 3}};
  CHECK_THROWS_AS(negative_log_likelihood(bad, {}), Error);
}
