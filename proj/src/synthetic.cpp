#include "xalign/synthetic.hpp"

#include <array>
#include <cstdio>
#include <sstream>
#include <string_view>

#include "xalign/random.hpp"

namespace xalign {

namespace {

constexpr std::array<std::string_view, 12> kNouns{"movie", "book",   "meal",   "hotel",  "phone", "game",
                                                  "song",  "chair",  "camera", "jacket", "garden", "lamp"};
constexpr std::array<std::string_view, 8> kGood{"great",    "lovely",    "superb",   "wonderful",
                                                "pleasant", "brilliant", "charming", "delightful"};
constexpr std::array<std::string_view, 8> kBad{"awful", "broken", "terrible", "dull",
                                               "cheap", "boring", "ugly",     "faulty"};

struct Script {
  char32_t first;
  char32_t count;
};

// Code point ranges used to spell cipher words for non-Latin languages.
Script script_for(const LanguageCode& lang) {
  const auto& c = lang.str();
  if (c == "zh") return {0x4E00, 0x400};
  if (c == "ja") return {0x3041, 0x50};
  if (c == "ru" || c == "bg") return {0x0430, 0x20};
  if (c == "hi") return {0x0915, 0x25};
  if (c == "bn") return {0x0995, 0x25};
  if (c == "th") return {0x0E01, 0x2E};
  return {0, 0};
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string translate_sentence(const std::vector<std::string>& words, const LanguageCode& lang) {
  std::string out;
  const bool cjk = lang.str() == "zh" || lang.str() == "ja";
  for (const auto& w : words) {
    if (!out.empty() && !cjk) out += ' ';
    out += synthetic_translate_word(w, lang);
  }
  return out;
}

template <std::size_t N>
std::string pick(Rng& rng, const std::array<std::string_view, N>& words) {
  return std::string(words[rng.index(N)]);
}

struct EnglishItem {
  std::vector<std::string> a;
  std::vector<std::string> b;
  std::string gold;
};

EnglishItem make_item(TaskKind task, Rng& rng) {
  EnglishItem item;
  switch (task) {
    case TaskKind::kEmotion: {
      const bool good = rng.index(2) == 0;
      const auto noun = pick(rng, kNouns);
      const auto adj1 = good ? pick(rng, kGood) : pick(rng, kBad);
      const auto adj2 = good ? pick(rng, kGood) : pick(rng, kBad);
      item.a = {"the", noun, "was", adj1, "and", adj2};
      item.gold = good ? "positive" : "negative";
      break;
    }
    case TaskKind::kNli: {
      const auto noun = pick(rng, kNouns);
      const bool good = rng.index(2) == 0;
      const auto adj = good ? pick(rng, kGood) : pick(rng, kBad);
      item.a = {"the", noun, "is", adj};
      switch (rng.index(3)) {
        case 0:
          item.b = {"the", noun, "is", adj};
          item.gold = "entailment";
          break;
        case 1: {
          auto other = pick(rng, kNouns);
          if (other == noun) other = noun == "lamp" ? "book" : "lamp";
          item.b = {"the", other, "is", good ? pick(rng, kGood) : pick(rng, kBad)};
          item.gold = "neutral";
          break;
        }
        default:
          item.b = {"the", noun, "is", good ? pick(rng, kBad) : pick(rng, kGood)};
          item.gold = "contradiction";
          break;
      }
      break;
    }
    case TaskKind::kParaphrase: {
      const auto n1 = pick(rng, kNouns);
      auto n2 = pick(rng, kNouns);
      if (n2 == n1) n2 = n1 == "lamp" ? "book" : "lamp";
      const auto adj = pick(rng, kGood);
      item.a = {"the", n1, "near", "the", n2, "is", adj};
      if (rng.index(2) == 0) {
        item.b = {"the", n1, "is", adj, "near", "the", n2};
        item.gold = "paraphrase";
      } else {
        item.b = {"the", n2, "near", "the", n1, "is", adj};
        item.gold = "not_paraphrase";
      }
      break;
    }
  }
  return item;
}

}  // namespace

std::string synthetic_translate_word(const std::string& english_word, const LanguageCode& lang) {
  if (lang.str() == "en") return english_word;
  const std::uint64_t h = fnv1a(english_word, fnv1a(lang.str()));
  const auto script = script_for(lang);
  std::string out;
  if (script.count > 0) {
    const std::size_t len = 1 + (h >> 60) % 3;
    for (std::size_t i = 0; i < len; ++i)
      append_utf8(out, script.first + static_cast<char32_t>((h >> (i * 12)) % script.count));
    return out;
  }
  // Latin languages: consonant-vowel syllables. 'h' and 'x' are excluded so the
  // output never spells the task-agnostic answer words.
  static constexpr std::string_view kConsonants = "bdfgklmprstvz";
  static constexpr std::string_view kVowels = "aeiou";
  const std::size_t syllables = 2 + (h >> 61) % 2;
  std::uint64_t bits = h;
  for (std::size_t i = 0; i < syllables; ++i) {
    out += kConsonants[bits % kConsonants.size()];
    bits /= kConsonants.size();
    out += kVowels[bits % kVowels.size()];
    bits /= kVowels.size();
  }
  return out;
}

std::map<LanguageCode, std::vector<TaskInstance>> generate_synthetic_dataset(
    TaskKind task, const std::vector<LanguageCode>& languages, std::size_t n_instances, std::uint64_t seed,
    const std::string& id_prefix) {
  Rng rng(seed);
  std::vector<EnglishItem> items;
  items.reserve(n_instances);
  for (std::size_t i = 0; i < n_instances; ++i) items.push_back(make_item(task, rng));

  std::map<LanguageCode, std::vector<TaskInstance>> out;
  for (const auto& lang : languages) {
    auto& rows = out[lang];
    rows.reserve(n_instances);
    for (std::size_t i = 0; i < n_instances; ++i) {
      char id[32];
      std::snprintf(id, sizeof(id), "-%06zu", i);
      TaskInstance inst;
      inst.id = id_prefix + id;
      inst.task = task;
      inst.lang = lang;
      inst.text_a = translate_sentence(items[i].a, lang);
      if (has_second_text(task)) inst.text_b = translate_sentence(items[i].b, lang);
      inst.gold = items[i].gold;
      rows.push_back(std::move(inst));
    }
  }
  return out;
}

}  // namespace xalign
