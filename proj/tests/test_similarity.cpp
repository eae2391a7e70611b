#include "doctest.h"

#include <cmath>
#include <random>

#include "gallery_sync/error.hpp"
#include "gallery_sync/similarity.hpp"

using namespace gsync;

TEST_CASE("similarity basics") {
  std::vector<VladDescriptor> d{{"a", {0.0f, 0.0f}}, {"b", {0.0f, 0.0f}}, {"c", {static_cast<float>(std::log(2.0)), 0.0f}}};
  auto w = similarity_matrix(d);
  CHECK(w(0, 1) == 1.0);
  CHECK(w.at("a", "c") == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(w.index_of("c") == 2);
  CHECK_FALSE(w.contains("z"));
  CHECK_THROWS_AS(w.index_of("z"), Error);
}

TEST_CASE("similarity matches a naive double loop") {
  std::mt19937 rng(21);
  std::normal_distribution<float> n;
  std::vector<VladDescriptor> d;
  for (int i = 0; i < 5; ++i) {
    VladDescriptor v{"p" + std::to_string(i), std::vector<float>(8)};
    for (auto& x : v.values) x = n(rng);
    d.push_back(v);
  }
  for (auto b : {kernels::Backend::serial, kernels::Backend::parallel}) {
    auto w = similarity_matrix(d, b);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) {
        double s = 0;
        for (std::size_t k = 0; k < 8; ++k) s += std::pow(double(d[i].values[k]) - double(d[j].values[k]), 2);
        CHECK(w(i, j) == doctest::Approx(std::exp(-std::sqrt(s))).epsilon(1e-12));
      }
  }
}

TEST_CASE("similarity invariants") {
  std::mt19937 rng(22);
  std::normal_distribution<float> n(0.0f, 0.1f);
  std::vector<VladDescriptor> d;
  for (int i = 0; i < 30; ++i) {
    VladDescriptor v{"p" + std::to_string(i), std::vector<float>(16)};
    for (auto& x : v.values) x = n(rng);
    d.push_back(v);
  }
  auto w = similarity_matrix(d);
  for (std::size_t i = 0; i < 30; ++i) {
    CHECK(w(i, i) == 1.0);
    for (std::size_t j = 0; j < 30; ++j) {
      CHECK(w(i, j) == w(j, i));
      CHECK(w(i, j) > 0.0);
      CHECK(w(i, j) <= 1.0);
    }
  }
  d[3].values.push_back(0.0f);
  CHECK_THROWS_AS(similarity_matrix(d), Error);
}

TEST_CASE("fusion averages element-wise") {
  std::vector<std::string> ids{"a", "b"};
  SimilarityMatrix lo(ids, {1.0, 0.2, 0.2, 1.0});
  SimilarityMatrix hi(ids, {1.0, 0.4, 0.4, 1.0});
  std::vector<SimilarityMatrix> both{lo, hi};
  auto f = fuse_similarities(both);
  CHECK(f(0, 1) == doctest::Approx(0.3));
  CHECK(f(1, 0) == f(0, 1));
  CHECK(f(0, 0) == 1.0);
  CHECK(f(1, 1) == 1.0);

  std::vector<SimilarityMatrix> one{lo};
  auto same = fuse_similarities(one);
  CHECK(std::vector<double>(same.values().begin(), same.values().end()) ==
        std::vector<double>(lo.values().begin(), lo.values().end()));

  std::vector<SimilarityMatrix> mismatched{lo, SimilarityMatrix({"b", "a"}, {1.0, 0.4, 0.4, 1.0})};
  CHECK_THROWS_AS(fuse_similarities(mismatched), Error);
  CHECK_THROWS_AS(fuse_similarities(std::span<const SimilarityMatrix>{}), Error);
}
