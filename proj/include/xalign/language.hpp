#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace xalign {

// Two-letter lowercase ISO-639-1 code. Membership in a LanguageSet is checked
// by the set, not here.
class LanguageCode {
 public:
  LanguageCode() = default;
  explicit LanguageCode(std::string_view code);

  const std::string& str() const noexcept { return code_; }
  bool empty() const noexcept { return code_.empty(); }

  friend auto operator<=>(const LanguageCode&, const LanguageCode&) = default;

 private:
  std::string code_;
};

// English display name for a registered code ("zh" -> "Chinese"). Unknown
// codes return the code itself.
std::string language_name(const LanguageCode& code);

class LanguageSet {
 public:
  LanguageSet(std::vector<LanguageCode> members, LanguageCode english);

  // The 20 evaluation languages, high-resource block first.
  static const LanguageSet& default_registry();

  const std::vector<LanguageCode>& members() const noexcept { return members_; }
  const LanguageCode& english() const noexcept { return english_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool contains(const LanguageCode& code) const;
  // Throws ConfigError when code is not a member.
  void require(const LanguageCode& code) const;

 private:
  std::vector<LanguageCode> members_;
  LanguageCode english_;
};

}  // namespace xalign
