#include "xalign/language.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <utility>

#include "xalign/error.hpp"

namespace xalign {

namespace {

constexpr std::array<std::pair<std::string_view, std::string_view>, 20> kLanguages{{
    {"en", "English"},   {"zh", "Chinese"},   {"de", "German"},    {"fr", "French"},
    {"es", "Spanish"},   {"it", "Italian"},   {"nl", "Dutch"},     {"ja", "Japanese"},
    {"ru", "Russian"},   {"sv", "Swedish"},   {"sl", "Slovenian"}, {"pl", "Polish"},
    {"bg", "Bulgarian"}, {"no", "Norwegian"}, {"ms", "Malay"},     {"is", "Icelandic"},
    {"hi", "Hindi"},     {"th", "Thai"},      {"sw", "Swahili"},   {"bn", "Bengali"},
}};

}  // namespace

LanguageCode::LanguageCode(std::string_view code) : code_(code) {
  const bool ok = code.size() == 2 &&
                  std::all_of(code.begin(), code.end(), [](char c) { return c >= 'a' && c <= 'z'; });
  if (!ok) throw ConfigError("invalid language code '" + std::string(code) + "'");
}

std::string language_name(const LanguageCode& code) {
  for (const auto& [c, name] : kLanguages)
    if (c == code.str()) return std::string(name);
  return code.str();
}

LanguageSet::LanguageSet(std::vector<LanguageCode> members, LanguageCode english)
    : members_(std::move(members)), english_(std::move(english)) {
  if (members_.size() < 2) throw ConfigError("language set needs at least 2 members");
  std::set<LanguageCode> seen;
  for (const auto& m : members_)
    if (!seen.insert(m).second) throw ConfigError("duplicate language '" + m.str() + "'");
  if (!seen.contains(english_))
    throw ConfigError("english language '" + english_.str() + "' is not in the language set");
}

const LanguageSet& LanguageSet::default_registry() {
  static const LanguageSet set = [] {
    std::vector<LanguageCode> codes;
    for (const auto& [c, name] : kLanguages) codes.emplace_back(c);
    return LanguageSet(std::move(codes), LanguageCode("en"));
  }();
  return set;
}

bool LanguageSet::contains(const LanguageCode& code) const {
  return std::find(members_.begin(), members_.end(), code) != members_.end();
}

void LanguageSet::require(const LanguageCode& code) const {
  if (!contains(code)) throw ConfigError("unknown language '" + code.str() + "'");
}

}  // namespace xalign
