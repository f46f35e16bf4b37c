#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "curbscan/core/error.hpp"

namespace test_support {

/// Runs fn, which must throw curbscan::Error, and returns its code.
template <class Fn>
curbscan::ErrorCode error_code(Fn&& fn) {
  try {
    fn();
  } catch (const curbscan::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected curbscan::Error, none thrown");
}

/// Fresh scratch directory under the system temp root; removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    dir_ = std::filesystem::temp_directory_path() /
           ("curbscan_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  [[nodiscard]] std::filesystem::path path() const { return dir_; }
  [[nodiscard]] std::filesystem::path file(const std::string& name) const {
    return dir_ / name;
  }

private:
  std::filesystem::path dir_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace test_support
