#ifndef CORPSIM_TEXT_HPP
#define CORPSIM_TEXT_HPP

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace corpsim {

// Tokenization rules, applied in order:
//   1. Unicode NFC normalization
//   2. removal of URL-shaped spans (scheme:// or leading www. up to the next
//      whitespace), @-mentions, and the "#" of hashtags
//   3. default Unicode case folding (re-normalized to NFC)
//   4. split on Unicode whitespace
//   5. strip leading/trailing punctuation (general category P*) per token
//   6. drop empty tokens
// The output is stable under re-tokenization of the space-joined result.
std::vector<std::string> tokenize(std::string_view utf8);

// Every window of 3 code points over the space-joined, space-padded token
// sequence: tokens [cat, hat] give the windows of " cat hat ".
std::vector<std::string> char_trigrams(const std::vector<std::string> &tokens);

// Streaming variant used by the counting pipeline; fn receives each window
// as UTF-8 bytes valid only for the duration of the call.
void for_each_trigram(const std::vector<std::string> &tokens,
                      const std::function<void(std::string_view)> &fn);

}  // namespace corpsim

#endif
