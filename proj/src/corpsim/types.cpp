#include "corpsim/types.hpp"

#include <cctype>

#include "corpsim/util.hpp"

namespace corpsim {

const char *to_string(Register r) { return r == Register::TW ? "tw" : "cc"; }

const char *to_string(FeatureKind k) {
  return k == FeatureKind::WordUnigram ? "word" : "char3";
}

Register register_from_string(std::string_view s) {
  if (s == "tw") return Register::TW;
  if (s == "cc") return Register::CC;
  fail_usage("unknown register value \"" + std::string(s) +
             "\" (expected \"tw\" or \"cc\")");
}

FeatureKind kind_from_string(std::string_view s) {
  if (s == "word") return FeatureKind::WordUnigram;
  if (s == "char3") return FeatureKind::CharTrigram;
  fail_usage("unknown feature kind \"" + std::string(s) +
             "\" (expected \"word\" or \"char3\")");
}

std::string VarietyKey::label() const {
  return language + "_" + country + "_" + to_string(reg);
}

static bool all_alpha(const std::string &s) {
  for (char c : s)
    if (!std::isalpha(static_cast<unsigned char>(c))) return false;
  return true;
}

VarietyKey make_variety_key(const std::string &language,
                            const std::string &country,
                            const std::string &reg) {
  VarietyKey key;
  key.language = lower_ascii(language);
  key.country = upper_ascii(country);
  key.reg = register_from_string(reg);
  if (key.language.size() != 3 || !all_alpha(key.language))
    fail_usage("language \"" + language + "\" is not an ISO 639-3 code");
  if (key.country.size() != 2 || !all_alpha(key.country))
    fail_usage("country \"" + country + "\" is not an ISO 3166-1 alpha-2 code");
  return key;
}

}  // namespace corpsim
