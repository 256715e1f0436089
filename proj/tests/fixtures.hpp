#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "fsmr/image_io.hpp"
#include "fsmr/synthetic.hpp"

namespace fixture {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("fsmr_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

// root/<class>/img_<i>.png, smooth RGB content so every method behaves.
inline void write_class_tree(const std::filesystem::path& root, int classes, int per_class,
                             int w = 20, int h = 16, std::uint64_t seed = 1) {
  for (int c = 0; c < classes; ++c)
    for (int i = 0; i < per_class; ++i) {
      fsmr::RasterImage img(w, h, 3);
      for (int ch = 0; ch < 3; ++ch) {
        const auto plane =
            fsmr::BandLimitedPattern::random(seed * 1000003 + c * 1009 + i * 31 + ch).sample(w, h);
        for (int y = 0; y < h; ++y)
          for (int x = 0; x < w; ++x) img.at(ch, y, x) = plane.at(0, y, x);
      }
      char name[32];
      std::snprintf(name, sizeof name, "img_%03d.png", i);
      fsmr::write_image(root / ("class_" + std::to_string(c)) / name, img);
    }
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace fixture
