#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "celltide/rng.hpp"

namespace fixtures {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    celltide::Rng rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("celltide_" + tag + "_" + std::to_string(rng.next() % 1000000007));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr long long kMilanT0 = 1383260400000LL;

/// One day of Milan-style records for grids 1..n_grids: several country codes
/// per slot, some empty activity fields, some slots missing for grid 1.
inline std::string synthetic_day(int day, int n_grids, std::uint64_t seed) {
  celltide::Rng rng(seed + static_cast<std::uint64_t>(day));
  std::ostringstream out;
  out.precision(17);
  for (int slot = 0; slot < 144; ++slot) {
    const long long ts = kMilanT0 + (static_cast<long long>(day) * 144 + slot) * 600000LL;
    for (int grid = 1; grid <= n_grids; ++grid) {
      if (grid == 1 && slot % 37 == 5) continue;  // gap, must become 0
      const int countries = 1 + static_cast<int>(rng.below(3));
      for (int c = 0; c < countries; ++c) {
        out << grid << '\t' << ts << '\t' << (c == 0 ? 39 : 33 + c) << '\t';
        for (int f = 0; f < 5; ++f) {
          if (rng.uniform() < 0.3) {
            out << (f < 4 ? "\t" : "");
          } else {
            out << rng.uniform(0.0, 20.0) << (f < 4 ? "\t" : "");
          }
        }
        out << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace fixtures
