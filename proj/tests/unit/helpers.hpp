#ifndef CORPSIM_TESTS_HELPERS_HPP
#define CORPSIM_TESTS_HELPERS_HPP

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "corpsim/util.hpp"

namespace testutil {

// Fresh per-test scratch directory under the build tree.
inline std::string scratch_dir(const std::string &name) {
  namespace fs = std::filesystem;
  fs::path dir = fs::path(CORPSIM_TEST_SCRATCH) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

inline std::string data_path(const std::string &name) {
  return std::string(CORPSIM_TEST_DATA_DIR) + "/" + name;
}

inline std::string slurp(const std::string &path) {
  return corpsim::read_file(path);
}

inline void spit(const std::string &path, const std::string &content) {
  std::filesystem::create_directories(
      std::filesystem::path(path).parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

// Message of the Error a callable throws; empty when it does not throw.
template <typename Fn>
std::string error_message(Fn &&fn) {
  try {
    fn();
  } catch (const corpsim::Error &e) {
    return e.what();
  }
  return {};
}

}  // namespace testutil

#endif
