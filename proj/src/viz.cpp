#include "nst/viz.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "nst/errors.hpp"

namespace nst {

Eigen::MatrixXd top_eigenvectors(const EigenFactorization& ef, int k) {
  if (k < 1 || k > ef.vectors.cols()) {
    throw UsageError("k must lie in [1, " + std::to_string(ef.vectors.cols()) + "]");
  }
  return ef.vectors.leftCols(k);
}

Projection2D classical_mds(const Eigen::MatrixXd& points, std::vector<std::string> labels,
                           int out_dim) {
  const Eigen::Index n = points.rows();
  if (n < 3) throw DataError("classical MDS needs at least 3 points");
  if (out_dim < 1 || out_dim >= n) throw UsageError("out_dim must lie in [1, points)");
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != n) {
    throw UsageError("one label per point is required");
  }

  Eigen::MatrixXd sq(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) sq(i, j) = (points.row(i) - points.row(j)).squaredNorm();
  }
  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::MatrixXd gram = -0.5 * centering * sq * centering;
  gram = 0.5 * (gram + gram.transpose());

  const EigenFactorization ef = jacobi_eigen(gram);
  Projection2D proj;
  proj.points = Eigen::MatrixXd::Zero(n, out_dim);
  for (int k = 0; k < out_dim; ++k) {
    const double lambda = std::max(ef.values[k], 0.0);
    proj.points.col(k) = ef.vectors.col(k) * std::sqrt(lambda);
  }
  if (labels.empty()) {
    for (Eigen::Index i = 0; i < n; ++i) labels.push_back("p" + std::to_string(i));
  }
  proj.labels = std::move(labels);
  return proj;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

}  // namespace

void export_heatmap(const Eigen::MatrixXd& matrix, const std::filesystem::path& path) {
  if (matrix.size() == 0) throw DataError("cannot export an empty matrix");
  std::ofstream out = open_out(path);
  for (Eigen::Index c = 0; c < matrix.cols(); ++c) out << (c ? "," : "") << 'c' << c;
  out << '\n';
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) out << (c ? "," : "") << matrix(r, c);
    out << '\n';
  }
  if (!out) throw DataError("failed writing " + path.string());
}

void export_scatter(const Projection2D& proj, const std::filesystem::path& path) {
  if (proj.points.size() == 0) throw DataError("cannot export an empty projection");
  std::ofstream out = open_out(path);
  out << "label";
  const char* axes = "xyzw";
  for (Eigen::Index c = 0; c < proj.points.cols(); ++c) {
    out << ',';
    if (c < 4) out << axes[c]; else out << 'd' << c;
  }
  out << '\n';
  for (Eigen::Index r = 0; r < proj.points.rows(); ++r) {
    out << proj.labels[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < proj.points.cols(); ++c) out << ',' << proj.points(r, c);
    out << '\n';
  }
  if (!out) throw DataError("failed writing " + path.string());
}

void export_heatmap_svg(const Eigen::MatrixXd& matrix, const std::filesystem::path& path) {
  if (matrix.size() == 0) throw DataError("cannot export an empty matrix");
  const int cell = 8;
  const double scale = std::max(matrix.cwiseAbs().maxCoeff(), 1e-300);
  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << matrix.cols() * cell
      << "\" height=\"" << matrix.rows() * cell << "\">\n";
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      const double v = matrix(r, c) / scale;
      // Diverging blue-white-red.
      const int fade = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(v))));
      const int red = v >= 0 ? 255 : fade;
      const int blue = v >= 0 ? fade : 255;
      out << "<rect x=\"" << c * cell << "\" y=\"" << r * cell << "\" width=\"" << cell
          << "\" height=\"" << cell << "\" fill=\"rgb(" << red << ',' << fade << ',' << blue
          << ")\"/>\n";
    }
  }
  out << "</svg>\n";
}

void export_scatter_svg(const Projection2D& proj, const std::filesystem::path& path) {
  if (proj.points.rows() == 0 || proj.points.cols() < 2) {
    throw DataError("scatter export needs 2-D points");
  }
  const double size = 400.0;
  const double margin = 40.0;
  const Eigen::VectorXd lo = proj.points.leftCols(2).colwise().minCoeff();
  const Eigen::VectorXd hi = proj.points.leftCols(2).colwise().maxCoeff();
  const double span = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-12});
  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * margin
      << "\" height=\"" << size + 2 * margin << "\">\n";
  for (Eigen::Index r = 0; r < proj.points.rows(); ++r) {
    const double x = margin + (proj.points(r, 0) - lo[0]) / span * size;
    const double y = margin + (hi[1] - proj.points(r, 1)) / span * size;
    out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"4\"/>\n"
        << "<text x=\"" << x + 6 << "\" y=\"" << y - 6 << "\" font-size=\"10\">"
        << proj.labels[static_cast<std::size_t>(r)] << "</text>\n";
  }
  out << "</svg>\n";
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": missing header");
  const auto cols = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',') + 1);
  std::vector<double> values;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Eigen::Index count = 0;
    while (std::getline(ss, cell, ',')) {
      values.push_back(std::stod(cell));
      ++count;
    }
    if (count != cols) throw DataError(path.string() + ": ragged row " + std::to_string(rows + 2));
    ++rows;
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = values[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

}  // namespace nst
