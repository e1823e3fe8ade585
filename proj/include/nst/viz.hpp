#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nst/style_matrix.hpp"

namespace nst {

struct Projection2D {
  Eigen::MatrixXd points;  // N x out_dim
  std::vector<std::string> labels;
};

// First k eigenvectors (columns) in descending eigenvalue order.
Eigen::MatrixXd top_eigenvectors(const EigenFactorization& ef, int k);

// Classical (Torgerson) MDS of the rows of `points` using Euclidean distances.
Projection2D classical_mds(const Eigen::MatrixXd& points, std::vector<std::string> labels,
                           int out_dim = 2);

// CSV: header row ("c0,c1,..."), then one row per matrix row, 17 significant
// digits.
void export_heatmap(const Eigen::MatrixXd& matrix, const std::filesystem::path& path);
// CSV: label,x,y[,...].
void export_scatter(const Projection2D& proj, const std::filesystem::path& path);

void export_heatmap_svg(const Eigen::MatrixXd& matrix, const std::filesystem::path& path);
void export_scatter_svg(const Projection2D& proj, const std::filesystem::path& path);

// Parses a file written by export_heatmap.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

}  // namespace nst
