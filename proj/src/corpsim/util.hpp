#ifndef CORPSIM_UTIL_HPP
#define CORPSIM_UTIL_HPP

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace corpsim {

// Failure categories map one-to-one onto process exit codes.
enum class ErrorKind { Runtime = 1, Usage = 2 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(const std::string &msg) {
  throw Error(ErrorKind::Runtime, msg);
}
[[noreturn]] inline void fail_usage(const std::string &msg) {
  throw Error(ErrorKind::Usage, msg);
}
// printf-style variants for messages that embed paths or values.
[[noreturn]] void fail(const char *fmt, ...)
    __attribute__((format(printf, 1, 2)));
[[noreturn]] void fail_usage(const char *fmt, ...)
    __attribute__((format(printf, 1, 2)));

// FNV-1a 64-bit, used for content checksums and config digests.
class Fnv64 {
 public:
  Fnv64 &update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  Fnv64 &update(uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>(v >> (8 * i));
    return update(std::string_view(buf, 8));
  }
  uint64_t value() const { return state_; }
  std::string hex() const;

 private:
  uint64_t state_ = 0xcbf29ce484222325ULL;
};

uint64_t fnv64(std::string_view bytes);
std::string fnv64_hex(std::string_view bytes);

// Deterministic RNG used for all pair sampling and synthetic generation.
// mt19937_64 plus an explicit rejection-sampled bounded draw, so streams do
// not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  // Uniform in [0, bound), bound >= 1. Unbiased via rejection.
  uint64_t bounded(uint64_t bound);

  // Uniform double in [0, 1) with 53 bits.
  double uniform01() { return (next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller on explicit uniforms.
  double normal();

  // Fisher-Yates; prefix_shuffle leaves [0, take) uniformly drawn without
  // replacement from the whole vector.
  template <typename T>
  void prefix_shuffle(std::vector<T> &v, size_t take) {
    size_t n = v.size();
    if (n == 0) return;
    if (take > n) take = n;
    size_t last = (take == n) ? n - 1 : take;
    for (size_t i = 0; i < last; ++i) {
      size_t j = i + static_cast<size_t>(bounded(n - i));
      std::swap(v[i], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stable derivation of per-task seeds from a run seed and a label.
uint64_t mix_seed(uint64_t seed, std::string_view label);

// Runs fn(i) for i in [0, n). With workers <= 1 the loop is sequential;
// otherwise indexes are striped over threads. fn must only touch state
// owned by index i.
void parallel_for(size_t n, int workers, const std::function<void(size_t)> &fn);

// Formatting helpers (snprintf-backed, locale-independent).
std::string strf(const char *fmt, ...) __attribute__((format(printf, 1, 2)));
std::string format_double(double v);         // shortest round-trippable-ish, %.12g
std::string format_fixed(double v, int dp);  // %.NNf

std::string read_file(const std::string &path);
// Writes via a temp file + rename so partially written artifacts never
// appear under the final name.
void write_file_atomic(const std::string &path, std::string_view content);

std::vector<std::string> split(std::string_view s, char sep);
// View-returning variant for parsing; views alias the input buffer.
std::vector<std::string_view> split_view(std::string_view s, char sep);
std::string_view trim(std::string_view s);

// Strict decimal parse; the whole of s must be digits. what names the
// value in the error message.
uint64_t parse_u64(std::string_view s, const std::string &what);
std::string lower_ascii(std::string_view s);
std::string upper_ascii(std::string_view s);

}  // namespace corpsim

#endif
