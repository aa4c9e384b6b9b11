#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "test_helpers.hpp"
#include "xalign/corpus.hpp"
#include "xalign/error.hpp"
#include "xalign/prompting.hpp"
#include "xalign/synthetic.hpp"

using namespace xalign;

namespace {

std::string instance_line(const std::string& id, const std::string& lang, const std::string& text,
                          const std::string& gold, const char* task = "emotion") {
  nlohmann::json j{{"id", id}, {"task", task}, {"lang", lang}, {"text_a", text}, {"text_b", nullptr}, {"gold", gold}};
  return j.dump();
}

std::vector<TaskInstance> parse(const std::string& text, TaskKind task = TaskKind::kEmotion,
                                const char* lang = "en") {
  std::istringstream in(text);
  return parse_task_dataset(in, "fixture", task, LanguageCode(lang));
}

TaskInstance inst(const std::string& id, const char* lang, const std::string& text, const char* gold = "positive") {
  return TaskInstance{id, TaskKind::kEmotion, LanguageCode(lang), text, std::nullopt, gold};
}

std::vector<ParallelPair> make_pairs(const char* src, std::size_t n, const std::string& prefix) {
  std::vector<ParallelPair> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({LanguageCode(src), LanguageCode("en"), std::string(src) + " q" + std::to_string(i),
                   "q" + std::to_string(i), prefix + std::to_string(i)});
  return out;
}

std::vector<std::string> sorted_keys(const std::vector<ParallelPair>& pairs) {
  std::vector<std::string> keys;
  for (const auto& p : pairs)
    keys.push_back(p.source_lang.str() + "|" + p.target_lang.str() + "|" + p.instance_id + "|" + p.source_text + "|" +
                   p.target_text);
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace

TEST_CASE("language codes and sets") {
  CHECK_THROWS_AS(LanguageCode("EN"), ConfigError);
  CHECK_THROWS_AS(LanguageCode("eng"), ConfigError);
  const auto& reg = LanguageSet::default_registry();
  CHECK(reg.members().size() == 20);
  CHECK(reg.english() == LanguageCode("en"));
  CHECK_THROWS_AS(LanguageSet({LanguageCode("en")}, LanguageCode("en")), ConfigError);
  CHECK_THROWS_AS(LanguageSet({LanguageCode("en"), LanguageCode("en")}, LanguageCode("en")), ConfigError);
  CHECK_THROWS_AS(LanguageSet({LanguageCode("de"), LanguageCode("fr")}, LanguageCode("en")), ConfigError);
  CHECK(language_name(LanguageCode("sw")) == "Swahili");
}

TEST_CASE("loading a 500-line emotion file yields 500 instances in order") {
  xalign::testing::TempDir dir("load");
  const auto path = dir.path() / "en.jsonl";
  {
    std::ofstream out(path);
    for (int i = 0; i < 500; ++i)
      out << instance_line("e" + std::to_string(i), "en", "review " + std::to_string(i),
                           i % 2 ? "negative" : "positive")
          << "\n";
  }
  const auto rows = load_task_dataset(path, TaskKind::kEmotion, LanguageCode("en"));
  REQUIRE(rows.size() == 500);
  CHECK(rows.front().id == "e0");
  CHECK(rows.back().id == "e499");
  CHECK(rows[1].gold == "negative");
  CHECK_FALSE(rows[3].text_b.has_value());
}

TEST_CASE("empty dataset file yields no instances") {
  CHECK(parse("").empty());
  CHECK(parse("\n\n").empty());
}

TEST_CASE("dataset loader errors") {
  SUBCASE("duplicate id") {
    const auto text = instance_line("x", "en", "a", "positive") + "\n" + instance_line("x", "en", "b", "negative");
    CHECK_THROWS_AS(parse(text), DataError);
  }
  SUBCASE("malformed line names its line number") {
    const auto text = instance_line("x", "en", "a", "positive") + "\n{not json";
    try {
      parse(text);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
  }
  SUBCASE("unknown label") {
    CHECK_THROWS_AS(parse(instance_line("x", "en", "a", "happy")), LabelError);
  }
  SUBCASE("language and task must match the request") {
    CHECK_THROWS_AS(parse(instance_line("x", "de", "a", "positive")), DataError);
    CHECK_THROWS_AS(parse(instance_line("x", "en", "a", "positive"), TaskKind::kNli), DataError);
  }
  SUBCASE("two-text tasks need text_b") {
    CHECK_THROWS_AS(parse(instance_line("x", "en", "a", "neutral", "nli"), TaskKind::kNli), DataError);
  }
}

TEST_CASE("dataset files round-trip through the writer") {
  xalign::testing::TempDir dir("roundtrip");
  const auto data = generate_synthetic_dataset(TaskKind::kNli, {LanguageCode("de")}, 30, 4, "n");
  const auto& rows = data.at(LanguageCode("de"));
  write_task_dataset(dir.path() / "de.jsonl", rows);
  const auto back = load_task_dataset(dir.path() / "de.jsonl", TaskKind::kNli, LanguageCode("de"));
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].id == rows[i].id);
    CHECK(back[i].text_b == rows[i].text_b);
    CHECK(back[i].gold == rows[i].gold);
  }
}

TEST_CASE("10,000 matched instances give 10,000 pairs") {
  const auto data = generate_synthetic_dataset(TaskKind::kEmotion, {LanguageCode("zh"), LanguageCode("en")}, 10000,
                                               3, "t");
  const auto pairs = build_translation_pairs(data.at(LanguageCode("zh")), data.at(LanguageCode("en")));
  CHECK(pairs.size() == 10000);
  CHECK(instance_ids(pairs) == instance_ids(data.at(LanguageCode("zh"))));
  CHECK(pairs[5].source_lang == LanguageCode("zh"));
  CHECK(pairs[5].target_text == data.at(LanguageCode("en"))[5].text_a);
}

TEST_CASE("pair text is the rendered question and never carries the label") {
  for (auto task : {TaskKind::kEmotion, TaskKind::kNli, TaskKind::kParaphrase}) {
    const auto data = generate_synthetic_dataset(task, {LanguageCode("ru"), LanguageCode("en")}, 200, 9, "p");
    const auto& en = data.at(LanguageCode("en"));
    const auto pairs = build_translation_pairs(data.at(LanguageCode("ru")), en);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const std::string expected = en[i].text_b ? en[i].text_a + "\n" + *en[i].text_b : en[i].text_a;
      CHECK(pairs[i].target_text == expected);
      for (const auto* lang : {"en", "ru"}) {
        const auto answers = answer_surfaces(task, LanguageCode(lang), OutputType::kSameLanguage);
        const auto& gold_surface = answers.surface_for(en[i].gold);
        CHECK(pairs[i].source_text.find(gold_surface) == std::string::npos);
        CHECK(pairs[i].target_text.find(gold_surface) == std::string::npos);
      }
    }
  }
}

TEST_CASE("same-language pairing is rejected") {
  const std::vector<TaskInstance> side{inst("a", "en", "x")};
  CHECK_THROWS_AS(build_translation_pairs(side, side), DataError);
}

TEST_CASE("orphan ids raise an alignment error naming them") {
  const std::vector<TaskInstance> src{inst("a", "de", "x"), inst("b", "de", "y"), inst("c", "de", "z")};
  const std::vector<TaskInstance> tgt{inst("a", "en", "x"), inst("b", "en", "y")};
  try {
    build_translation_pairs(src, tgt);
    FAIL("expected alignment error");
  } catch (const AlignmentError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("(1)") != std::string::npos);
    CHECK(msg.find("c") != std::string::npos);
  }
}

TEST_CASE("mixing two 10k directions gives 20k pairs with provenance") {
  const auto corpus = mix_corpora({make_pairs("zh", 10000, "z"), make_pairs("de", 10000, "d")}, 5);
  CHECK(corpus.pairs.size() == 20000);
  REQUIRE(corpus.provenance.size() == 2);
  std::size_t total = 0;
  for (const auto& p : corpus.provenance) {
    total += p.count;
    const auto n = std::count_if(corpus.pairs.begin(), corpus.pairs.end(),
                                 [&](const ParallelPair& x) { return x.source_lang == p.source_lang; });
    CHECK(static_cast<std::size_t>(n) == p.count);
  }
  CHECK(total == corpus.pairs.size());
  CHECK(corpus.shuffle_seed == 5);
}

TEST_CASE("mixing is a seeded permutation") {
  const auto base = make_pairs("zh", 100, "z");
  const auto a = mix_corpora({base}, 1);
  const auto b = mix_corpora({base}, 2);
  CHECK(a.pairs != b.pairs);
  CHECK(sorted_keys(a.pairs) == sorted_keys(base));
  CHECK(sorted_keys(b.pairs) == sorted_keys(base));
  CHECK(mix_corpora({base}, 1).pairs == a.pairs);
  CHECK_THROWS_AS(mix_corpora({}, 1), DataError);
  auto mixed = base;
  mixed.push_back(make_pairs("de", 1, "d")[0]);
  CHECK_THROWS_AS(mix_corpora({mixed}, 1), DataError);
}

TEST_CASE("seeded subset sampling") {
  const auto data = generate_synthetic_dataset(TaskKind::kEmotion, {LanguageCode("en")}, 2000, 1, "s");
  const auto& pool = data.at(LanguageCode("en"));
  const auto s = sample_subsets(pool, 500, 8);
  CHECK(instance_ids(s).size() == 500);
  CHECK(sample_subsets(pool, 500, 8).size() == 500);
  CHECK(instance_ids(sample_subsets(pool, 500, 8)) == instance_ids(s));
  CHECK(instance_ids(sample_subsets(pool, pool.size(), 3)) == instance_ids(pool));
  CHECK_THROWS_AS(sample_subsets(pool, 2001, 1), DataError);

  const std::vector<TaskInstance> train_pool(pool.begin(), pool.begin() + 1000);
  const std::vector<TaskInstance> test_pool(pool.begin() + 1000, pool.end());
  const auto train = instance_ids(sample_subsets(train_pool, 300, 1));
  const auto test = instance_ids(sample_subsets(test_pool, 300, 1));
  std::vector<std::string> both;
  std::set_intersection(train.begin(), train.end(), test.begin(), test.end(), std::back_inserter(both));
  CHECK(both.empty());
}

TEST_CASE("pairs round-trip through JSONL") {
  xalign::testing::TempDir dir("pairs");
  auto pairs = make_pairs("sw", 20, "w");
  pairs[3].source_text = "line one\nline \"two\"";
  write_pairs(dir.path() / "p.jsonl", pairs);
  CHECK(read_pairs(dir.path() / "p.jsonl") == pairs);
}
