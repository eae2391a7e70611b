#include "doctest.h"

#include <sstream>

#include "gallery_sync/cli.hpp"
#include "gallery_sync/io.hpp"
#include "gallery_sync/mrf.hpp"
#include "helpers.hpp"

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "gallery-sync");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = gsync::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("gen, sync, eval on a noiseless scenario") {
  auto dir = testing::scratch_dir("cli_e2e");
  const auto d = dir.string();
  auto gen = run({"gen", "--galleries", "5", "--photos", "20", "--noise", "0", "--jitter", "0", "--seed", "11", "--out", d});
  REQUIRE(gen.code == 0);
  auto sync = run({"sync", "--manifest", d + "/manifest.json", "--features", d + "/features", "--approach", "exact",
                   "--alpha", "0.1", "--out", d + "/offsets.json", "--dot", d + "/graph.dot", "--links", d + "/links.jsonl"});
  REQUIRE(sync.code == 0);
  CHECK(std::filesystem::exists(d + "/graph.dot"));
  CHECK(std::filesystem::exists(d + "/links.jsonl"));
  auto eval = run({"eval", "--pred", d + "/offsets.json", "--gt", d + "/ground_truth.json", "--max-error", "1800"});
  REQUIRE(eval.code == 0);
  CHECK(eval.out.find("\"precision\": 1.0") != std::string::npos);
  CHECK(eval.out.find("P (%)          100.0") != std::string::npos);

  // Same inputs, same bytes.
  const auto first = gsync::read_text_file(d + "/offsets.json");
  REQUIRE(run({"--threads", "3", "sync", "--manifest", d + "/manifest.json", "--features", d + "/features", "--out",
               d + "/again.json"}).code == 0);
  CHECK(gsync::read_text_file(d + "/again.json") == first);
  CHECK_FALSE(std::filesystem::exists(d + "/again.json.tmp"));

  auto coverage = run({"sync", "--manifest", d + "/manifest.json", "--features", d + "/features", "--approach",
                       "coverage", "--out", d + "/coverage.json"});
  CHECK(coverage.code == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("eval names the missing gallery") {
  auto dir = testing::scratch_dir("cli_eval");
  const auto d = dir.string();
  gsync::write_file_atomic(d + "/pred.json", R"({"reference": "a", "offsets": {"a": 0, "b": 5, "c": 7}})");
  gsync::write_file_atomic(d + "/gt.json", R"({"b": 5})");
  auto r = run({"eval", "--pred", d + "/pred.json", "--gt", d + "/gt.json"});
  CHECK(r.code == 2);
  CHECK(r.err.find("'c'") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("bad invocations exit with 2") {
  CHECK(run({"sync", "--bogus"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"eval", "--pred", "/nonexistent/p.json", "--gt", "/nonexistent/g.json"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("graph, vocab and learn subcommands") {
  auto dir = testing::scratch_dir("cli_misc");
  const auto d = dir.string();
  REQUIRE(run({"gen", "--galleries", "4", "--photos", "15", "--jitter", "10", "--seed", "3", "--out", d}).code == 0);
  const std::vector<std::string> in{"--manifest", d + "/manifest.json", "--features", d + "/features"};
  auto with = [&](std::vector<std::string> head, std::vector<std::string> tail) {
    head.insert(head.end(), in.begin(), in.end());
    head.insert(head.end(), tail.begin(), tail.end());
    return run(head);
  };

  auto graph = with({"graph"}, {});
  REQUIRE(graph.code == 0);
  CHECK(graph.out.starts_with("graph galleries {"));

  auto vocab = with({"vocab"}, {"--vocab-size", "4", "--out", d + "/vocab.gsft"});
  REQUIRE(vocab.code == 0);
  auto vlad = with({"sync"}, {"--encoding", "vlad", "--vocab", d + "/vocab.gsft", "--out", d + "/vlad.json"});
  CHECK(vlad.code == 0);

  auto learn = with({"learn"}, {"--gt", d + "/ground_truth.json", "--iterations", "20", "--out", d + "/params.json"});
  REQUIRE(learn.code == 0);
  auto params = gsync::load_params(d + "/params.json");
  CHECK(params.gamma > 0);
  CHECK(params.delta > 0);
  CHECK(with({"sync"}, {"--params", d + "/params.json", "--out", d + "/learned.json"}).code == 0);

  CHECK(with({"sync"}, {"--gamma", "0", "--out", d + "/x.json"}).code == 2);
  CHECK(with({"sync"}, {"--reference", "nope", "--out", d + "/x.json"}).code == 2);
  CHECK(with({"sync"}, {"--layer", "inception3a", "--out", d + "/x.json"}).code == 2);
  std::filesystem::remove_all(dir);
}
