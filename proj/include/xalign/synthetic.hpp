#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "xalign/corpus.hpp"

namespace xalign {

// Builds a small artificial labeled dataset and its "translations": each
// language renders the same English sentence through a deterministic
// word-level cipher in that language's script. Labels follow from the English
// word polarity, so the data is learnable but carries no real semantics.
// Generated text never contains the English label words.
std::map<LanguageCode, std::vector<TaskInstance>> generate_synthetic_dataset(
    TaskKind task, const std::vector<LanguageCode>& languages, std::size_t n_instances, std::uint64_t seed,
    const std::string& id_prefix);

// The cipher used above, exposed for tests.
std::string synthetic_translate_word(const std::string& english_word, const LanguageCode& lang);

}  // namespace xalign
