#include "corpsim/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "corpsim/util.hpp"

namespace corpsim {

namespace {

const icu::Normalizer2 &nfc() {
  UErrorCode ec = U_ZERO_ERROR;
  const icu::Normalizer2 *n = icu::Normalizer2::getNFCInstance(ec);
  if (U_FAILURE(ec) || n == nullptr) fail("ICU NFC normalizer unavailable");
  return *n;
}

bool is_space(UChar32 c) { return u_isUWhiteSpace(c); }

bool ascii_eq_nocase(UChar32 c, char lower) {
  return c == lower || c == lower - 32;
}

// True if s[i..] starts with an URL scheme ("http://", "https://", "ftp://",
// ASCII case-insensitive).
bool at_scheme(const std::vector<UChar32> &s, size_t i) {
  auto rest_is = [&](size_t j, const char *lit) {
    for (const char *p = lit; *p; ++p, ++j) {
      if (j >= s.size() || !ascii_eq_nocase(s[j], *p)) return false;
    }
    return true;
  };
  if (rest_is(i, "http://") || rest_is(i, "https://")) return true;
  return rest_is(i, "ftp://");
}

bool at_www(const std::vector<UChar32> &s, size_t i, bool token_start) {
  if (!token_start) return false;
  return i + 3 < s.size() && ascii_eq_nocase(s[i], 'w') &&
         ascii_eq_nocase(s[i + 1], 'w') && ascii_eq_nocase(s[i + 2], 'w') &&
         s[i + 3] == '.';
}

bool mention_char(UChar32 c) { return u_isalnum(c) || c == '_'; }

std::vector<UChar32> to_code_points(const icu::UnicodeString &us) {
  std::vector<UChar32> cps;
  cps.reserve(static_cast<size_t>(us.countChar32()));
  for (int32_t i = 0; i < us.length();) {
    UChar32 c = us.char32At(i);
    cps.push_back(c);
    i += U16_LENGTH(c);
  }
  return cps;
}

void append_utf8(std::string &out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  int32_t len = 0;
  UBool err = false;
  U8_APPEND(reinterpret_cast<uint8_t *>(buf), len, U8_MAX_LENGTH, c, err);
  if (!err) out.append(buf, static_cast<size_t>(len));
}

// Drops URL spans, @-mention spans and the "#" of hashtags.
std::vector<UChar32> strip_spans(const std::vector<UChar32> &in) {
  std::vector<UChar32> out;
  out.reserve(in.size());
  bool token_start = true;
  for (size_t i = 0; i < in.size();) {
    UChar32 c = in[i];
    if (at_scheme(in, i) || at_www(in, i, token_start)) {
      while (i < in.size() && !is_space(in[i])) ++i;
      token_start = false;
      continue;
    }
    if (c == '@' && token_start && i + 1 < in.size() &&
        mention_char(in[i + 1])) {
      ++i;
      while (i < in.size() && mention_char(in[i])) ++i;
      token_start = false;
      continue;
    }
    if (c == '#' && token_start && i + 1 < in.size() && !is_space(in[i + 1])) {
      ++i;
      token_start = false;
      continue;
    }
    out.push_back(c);
    token_start = is_space(c);
    ++i;
  }
  return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view utf8) {
  std::vector<std::string> tokens;
  if (utf8.empty()) return tokens;

  UErrorCode ec = U_ZERO_ERROR;
  icu::UnicodeString us = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  icu::UnicodeString normalized = nfc().normalize(us, ec);
  if (U_FAILURE(ec)) fail("ICU NFC normalization failed");

  std::vector<UChar32> cleaned = strip_spans(to_code_points(normalized));

  icu::UnicodeString folded;
  for (UChar32 c : cleaned) folded.append(c);
  folded.foldCase(U_FOLD_CASE_DEFAULT);
  ec = U_ZERO_ERROR;
  icu::UnicodeString refolded = nfc().normalize(folded, ec);
  if (U_FAILURE(ec)) fail("ICU NFC normalization failed");

  std::vector<UChar32> cps = to_code_points(refolded);
  size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && is_space(cps[i])) ++i;
    size_t begin = i;
    while (i < cps.size() && !is_space(cps[i])) ++i;
    size_t end = i;
    while (begin < end && u_ispunct(cps[begin])) ++begin;
    while (end > begin && u_ispunct(cps[end - 1])) --end;
    if (begin < end) {
      std::string tok;
      tok.reserve((end - begin) * 2);
      for (size_t j = begin; j < end; ++j) append_utf8(tok, cps[j]);
      tokens.push_back(std::move(tok));
    }
  }
  return tokens;
}

void for_each_trigram(const std::vector<std::string> &tokens,
                      const std::function<void(std::string_view)> &fn) {
  if (tokens.empty()) return;
  std::vector<UChar32> cps;
  size_t width = 2;
  for (const auto &t : tokens) width += t.size() + 1;
  cps.reserve(width);
  cps.push_back(' ');
  for (size_t ti = 0; ti < tokens.size(); ++ti) {
    if (ti > 0) cps.push_back(' ');
    const std::string &t = tokens[ti];
    const uint8_t *bytes = reinterpret_cast<const uint8_t *>(t.data());
    int32_t len = static_cast<int32_t>(t.size());
    for (int32_t i = 0; i < len;) {
      UChar32 c;
      U8_NEXT(bytes, i, len, c);
      if (c < 0) c = 0xFFFD;
      cps.push_back(c);
    }
  }
  cps.push_back(' ');

  std::string window;
  for (size_t i = 0; i + 2 < cps.size(); ++i) {
    window.clear();
    append_utf8(window, cps[i]);
    append_utf8(window, cps[i + 1]);
    append_utf8(window, cps[i + 2]);
    fn(window);
  }
}

std::vector<std::string> char_trigrams(const std::vector<std::string> &tokens) {
  std::vector<std::string> out;
  for_each_trigram(tokens,
                   [&](std::string_view w) { out.emplace_back(w); });
  return out;
}

}  // namespace corpsim
