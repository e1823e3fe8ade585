#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "nst/rng.hpp"

namespace testing {

namespace fs = std::filesystem;

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("nst_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  fs::path operator/(const std::string& name) const { return path_ / name; }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, nst::Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  }
  return m;
}

// Random SPD matrix A Aᵀ + shift·I.
inline Eigen::MatrixXd random_spd(Eigen::Index d, nst::Rng& rng, double shift = 0.5) {
  const Eigen::MatrixXd a = gaussian(d, d, rng);
  return a * a.transpose() / static_cast<double>(d) +
         shift * Eigen::MatrixXd::Identity(d, d);
}

// Plain unbiased sample covariance, written independently of the library.
inline Eigen::MatrixXd sample_cov(const Eigen::MatrixXd& z) {
  const Eigen::VectorXd mean = z.rowwise().mean();
  const Eigen::MatrixXd c = z.colwise() - mean;
  return c * c.transpose() / static_cast<double>(z.cols() - 1);
}

}  // namespace testing
