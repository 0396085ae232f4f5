#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace test_support {

// Upper critical values of the chi-square distribution at significance
// 0.001, by degrees of freedom. A goodness-of-fit statistic below the entry
// means p > 0.001.
inline double chi2_critical_001(int df) {
  static const double table[] = {0.0,    10.828, 13.816, 16.266, 18.467,
                                 20.515, 22.458, 24.322, 26.125, 27.877};
  if (df < 1 || df > 9) throw std::invalid_argument("chi2_critical_001: df out of table");
  return table[df];
}

// Pearson statistic for observed counts vs expected probabilities.
inline double chi2_statistic(const std::vector<std::uint64_t>& observed,
                             const std::vector<double>& expected_prob, std::uint64_t total) {
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = expected_prob[i] * static_cast<double>(total);
    if (expected <= 0.0) {
      if (observed[i] != 0) return 1e300;  // mass observed where none is possible
      continue;
    }
    const double d = static_cast<double>(observed[i]) - expected;
    stat += d * d / expected;
  }
  return stat;
}

// Minimal P6 reader used to validate rendered frames.
struct Ppm {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::vector<std::uint8_t> pixels;  // 3 bytes per pixel, row-major

  std::uint8_t at(int x, int y, int channel) const {
    return pixels[3 * (static_cast<std::size_t>(y) * width + x) + channel];
  }
};

inline Ppm read_ppm(const std::vector<std::uint8_t>& bytes) {
  Ppm img;
  std::size_t pos = 0;
  auto token = [&]() -> std::string {
    while (pos < bytes.size() && (bytes[pos] == ' ' || bytes[pos] == '\n' || bytes[pos] == '\t' ||
                                  bytes[pos] == '\r'))
      ++pos;
    std::string t;
    while (pos < bytes.size() && bytes[pos] != ' ' && bytes[pos] != '\n' && bytes[pos] != '\t' &&
           bytes[pos] != '\r')
      t.push_back(static_cast<char>(bytes[pos++]));
    return t;
  };
  if (token() != "P6") throw std::runtime_error("not a P6 file");
  img.width = std::stoi(token());
  img.height = std::stoi(token());
  img.maxval = std::stoi(token());
  ++pos;  // single whitespace after maxval
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  if (img.pixels.size() != 3u * img.width * img.height)
    throw std::runtime_error("pixel payload size mismatch");
  return img;
}

// Scratch directory for file-format tests, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("zsim_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace test_support
