#include <doctest.h>

#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "experiment.hpp"
#include "test_helpers.hpp"
#include "xalign/error.hpp"
#include "xalign/hash.hpp"
#include "xalign/manifest.hpp"
#include "xalign/parallel.hpp"
#include "xalign/pipeline.hpp"

using namespace xalign;
using namespace xalign::testing;
using nlohmann::json;

namespace {

struct Experiment {
  TempDir dir{"pipeline"};
  ExperimentConfig config;
  std::ostringstream log;
  CommandOptions options;

  explicit Experiment(json j = small_experiment(), DataSizes sizes = {}) {
    write_synthetic_dirs(dir.path() / "data", TaskKind::kEmotion, {"en", "zh", "de", "sw"}, sizes);
    config = load_config(write_config(dir.path(), j));
    options.log = &log;
  }
};

ExperimentConfig parse_in(const TempDir& dir, const json& j) { return parse_config(j, dir.path()); }

}  // namespace

TEST_CASE("config rejects inconsistent language choices") {
  TempDir dir("cfg");
  write_synthetic_dirs(dir.path() / "data", TaskKind::kEmotion, {"en", "zh"}, {4, 4, 4});
  CHECK_NOTHROW(parse_in(dir, small_experiment()));

  auto j = small_experiment();
  j["source_languages"] = {"zh", "en"};
  CHECK_THROWS_WITH_AS(parse_in(dir, j), doctest::Contains("'en'"), ConfigError);
  j["source_languages"] = json::array();
  CHECK_THROWS_AS(parse_in(dir, j), ConfigError);
  j["source_languages"] = {"zz"};
  CHECK_THROWS_WITH_AS(parse_in(dir, j), doctest::Contains("zz"), ConfigError);
  j = small_experiment();
  j["lens"]["languages"] = {"fr"};  // registered, but not in this config's universe
  CHECK_THROWS_AS(parse_in(dir, j), ConfigError);
  j = small_experiment();
  j["data"]["train_dir"] = "missing";
  CHECK_THROWS_WITH_AS(parse_in(dir, j), doctest::Contains("missing"), ConfigError);
}

TEST_CASE("config rejects unknown keys and stray seeds") {
  TempDir dir("cfg");
  write_synthetic_dirs(dir.path() / "data", TaskKind::kEmotion, {"en"}, {4, 4, 4});
  auto j = small_experiment();
  j["colour"] = "blue";
  CHECK_THROWS_WITH_AS(parse_in(dir, j), doctest::Contains("colour"), ConfigError);
  j = small_experiment();
  j["tuning"]["lr"] = 0.1;
  CHECK_THROWS_AS(parse_in(dir, j), ConfigError);
  j = small_experiment();
  j["tuning"]["seed"] = 9;
  CHECK_THROWS_AS(parse_in(dir, j), ConfigError);
  j = small_experiment();
  j["tuning"]["learning_rate"] = -1.0;
  CHECK_THROWS_AS(parse_in(dir, j), ConfigError);
  j = small_experiment();
  j["task"] = "sarcasm";
  CHECK_THROWS_AS(parse_in(dir, j), ConfigError);
}

TEST_CASE("config defaults and derived values") {
  TempDir dir("cfg");
  write_synthetic_dirs(dir.path() / "data", TaskKind::kEmotion, {"en"}, {4, 4, 4});
  auto j = small_experiment();
  j.erase("lens");
  j.erase("geometry");
  j["seeds"] = {{"training", 77}};
  const auto c = parse_in(dir, j);
  CHECK(c.tuning.seed == 77);
  CHECK(c.tuning.epochs == 1);
  CHECK(c.tuning.batch_size == 8);
  CHECK(c.few_shot_k == 2);
  CHECK(c.template_id == default_task_template(TaskKind::kEmotion));
  CHECK(c.lens.languages.size() == 3);  // universe minus English
  CHECK(c.geometry.languages.size() == 4);
  CHECK(c.data.train_dir == dir.path() / "data/train");
  CHECK(c.run_dir() == dir.path() / "runs" / c.hash.substr(0, 16));
}

TEST_CASE("config hash ignores key order and tracks content") {
  const auto a = json::parse(R"({"task": "nli", "data": {"x": 1, "y": [1, 2]}, "seeds": {"data": 4}})");
  const auto b = json::parse(R"({"seeds": {"data": 4}, "data": {"y": [1, 2], "x": 1}, "task": "nli"})");
  const auto c = json::parse(R"({"seeds": {"data": 5}, "data": {"y": [1, 2], "x": 1}, "task": "nli"})");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(c));
  CHECK(config_hash(a).size() == 64);
}

TEST_CASE("sha256 known answers") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("manifest round-trip and staleness") {
  TempDir dir("manifest");
  std::ofstream(dir.path() / "a.txt") << "alpha";
  RunManifest m;
  m.config_hash = "abc";
  m.seeds = {{"data", 1}};
  m.record(dir.path(), "a", dir.path() / "a.txt");
  m.stamp("build-data", 1.5);
  m.save(dir.path());
  const auto back = RunManifest::load(dir.path());
  CHECK(back.config_hash == "abc");
  CHECK(back.artifacts.at("a").path == "a.txt");
  CHECK(back.artifacts.at("a").sha256 == sha256_hex("alpha"));
  CHECK(back.timings.at("build-data") == 1.5);
  CHECK(back.stale(dir.path()).empty());
  std::ofstream(dir.path() / "a.txt") << "beta";
  CHECK(back.stale(dir.path()) == std::vector<std::string>{"a"});
  std::filesystem::remove(dir.path() / "a.txt");
  CHECK(back.stale(dir.path()).size() == 1);
}

TEST_CASE("parallel_map keeps index order and reports the first failure") {
  for (std::size_t workers : {1, 3, 8}) {
    const auto out = parallel_map(50, workers, [](std::size_t i) { return i * i; });
    REQUIRE(out.size() == 50);
    for (std::size_t i = 0; i < 50; ++i) CHECK(out[i] == i * i);
  }
  std::atomic<int> calls{0};
  auto failing = [&](std::size_t i) -> int {
    ++calls;
    if (i == 7 || i == 30) throw std::runtime_error("item " + std::to_string(i));
    return 0;
  };
  CHECK_THROWS_WITH(parallel_map(40, 4, failing), "item 7");
  CHECK(calls == 40);
}

TEST_CASE("build-data is reproducible and keeps test ids out of training") {
  Experiment e;
  cmd_build_data(e.config, e.options);
  const auto run = e.config.run_dir();
  const auto first = RunManifest::load(run).artifacts;
  const auto corpus = read_pairs(run / "data/corpus.jsonl");
  CHECK(corpus.size() == 60);  // two directions of train_size 30
  const auto test = load_task_dataset(run / "data/test/sw.jsonl", TaskKind::kEmotion, LanguageCode("sw"));
  CHECK(test.size() == 8);
  for (const auto& id : instance_ids(test)) CHECK_FALSE(instance_ids(corpus).contains(id));
  const auto summary = json::parse(slurp(run / "data/summary.json"));
  CHECK(summary["corpus_pairs"] == 60);
  CHECK(summary["few_shot_ids"].size() == 2);

  std::filesystem::remove_all(run);
  cmd_build_data(e.config, e.options);
  const auto second = RunManifest::load(run).artifacts;
  REQUIRE(first.size() == second.size());
  for (const auto& [key, record] : first) CHECK(second.at(key).sha256 == record.sha256);
}

TEST_CASE("build-data refuses a test split that overlaps training") {
  Experiment e;
  auto j = small_experiment();
  j["data"]["test_dir"] = "data/train";
  j["data"]["train_size"] = 55;
  j["data"]["test_size"] = 40;
  const auto config = load_config(write_config(e.dir.path(), j));
  CHECK_THROWS_WITH_AS(cmd_build_data(config, e.options), doctest::Contains("also appear"), DataError);
}

TEST_CASE("build-data rejects oversize samples") {
  auto j = small_experiment();
  j["data"]["train_size"] = 1000;
  Experiment e(j);
  CHECK_THROWS_AS(cmd_build_data(e.config, e.options), DataError);
}

TEST_CASE("later stages need their inputs") {
  Experiment e;
  CHECK_THROWS_WITH_AS(cmd_tune(e.config, e.options), doctest::Contains("corpus"), DataError);
  CHECK_THROWS_WITH_AS(cmd_eval(e.config, e.options), doctest::Contains("build-data"), DataError);
  CHECK_THROWS_AS(cmd_report(e.config, e.options), DataError);
  cmd_build_data(e.config, e.options);
  e.options.adapter = e.dir.path() / "nope.bin";
  CHECK_THROWS_AS(cmd_eval(e.config, e.options), ConfigError);
}

TEST_CASE("report names every missing section") {
  Experiment e;
  cmd_build_data(e.config, e.options);
  cmd_eval(e.config, e.options);
  try {
    cmd_report(e.config, e.options);
    FAIL("report should fail");
  } catch (const DataError& err) {
    const std::string what = err.what();
    CHECK(what.find("lens") != std::string::npos);
    CHECK(what.find("correlation") != std::string::npos);
    CHECK(what.find("accuracy") == std::string::npos);
  }
  std::ofstream(e.config.run_dir() / "eval/base/accuracy.csv", std::ios::app) << "tampered\n";
  CHECK_THROWS_WITH_AS(cmd_report(e.config, e.options), doctest::Contains("modified"), DataError);
}

TEST_CASE("lens refuses overlapping answer sets unless allowed") {
  auto j = small_experiment();
  j["lens"]["languages"] = {"zh", "de"};
  Experiment e(j);
  cmd_build_data(e.config, e.options);
  CHECK_THROWS_WITH_AS(cmd_lens(e.config, e.options), doctest::Contains("'de'"), ConfigError);
  CHECK_FALSE(std::filesystem::exists(e.config.run_dir() / "lens"));
  e.options.allow_overlap = true;
  const auto result = cmd_lens(e.config, e.options);
  CHECK(result.outputs.size() == 2);
  const auto trace = json::parse(slurp(e.config.run_dir() / "lens/base/de.json"));
  CHECK(trace["prefix_overlap"] == true);
  CHECK(trace["layers"] == 3);
}

TEST_CASE("geometry needs two languages and some layers") {
  auto j = small_experiment();
  j["geometry"]["languages"] = {"zh"};
  Experiment e(j);
  cmd_build_data(e.config, e.options);
  CHECK_THROWS_AS(cmd_geometry(e.config, e.options), ConfigError);
  j["geometry"] = {{"languages", {"zh", "en"}}};
  const auto config = load_config(write_config(e.dir.path(), j));
  cmd_build_data(config, e.options);
  CHECK_THROWS_AS(cmd_geometry(config, e.options), ConfigError);
}

TEST_CASE("a full run is reproducible across directories") {
  Experiment a;
  Experiment b;
  REQUIRE(a.config.hash == b.config.hash);
  for (auto* e : {&a, &b}) {
    cmd_build_data(e->config, e->options);
    const auto tuned = cmd_tune(e->config, e->options);
    cmd_eval(e->config, e->options);
    cmd_lens(e->config, e->options);
    e->options.adapter = tuned.outputs.front();
    cmd_eval(e->config, e->options);
    cmd_geometry(e->config, e->options);
    e->options.adapter.reset();
    cmd_report(e->config, e->options);
  }
  const auto ma = RunManifest::load(a.config.run_dir());
  const auto mb = RunManifest::load(b.config.run_dir());
  CHECK(ma.artifacts.size() == mb.artifacts.size());
  for (const auto& [key, record] : ma.artifacts) CHECK(mb.artifacts.at(key).sha256 == record.sha256);
  const auto report = slurp(a.config.run_dir() / "report.md");
  CHECK(report == slurp(b.config.run_dir() / "report.md"));
  CHECK(report.find("| tuned |") != std::string::npos);
  CHECK(report.find("### Layer 2") != std::string::npos);
  const auto corr = slurp(a.config.run_dir() / "geometry/correlation_L1.csv");
  CHECK(corr.rfind("pair,base,trained\nen-en,1,1\n", 0) == 0);
}
