#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace nst {

// Covariance of a corpus's semantic vectors together with their mean.
struct StyleMatrix {
  Eigen::MatrixXd cov;   // d x d, symmetric PSD
  Eigen::VectorXd mean;  // d
  std::size_t n = 0;     // number of samples

  int dim() const { return static_cast<int>(mean.size()); }
};

// S = P diag(values) P^T with orthonormal columns of P and values sorted in
// descending order. Each column's largest-magnitude entry is positive.
struct EigenFactorization {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd values;
};

// Whitening with respect to a source corpus: P diag(inv_sqrt) P^T (z - mean).
struct Neutralizer {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd inv_sqrt_values;
  Eigen::VectorXd mean;

  int dim() const { return static_cast<int>(mean.size()); }
};

// Coloring towards a target corpus: P diag(sqrt) P^T z + mean.
struct Stylizer {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd sqrt_values;
  Eigen::VectorXd mean;

  int dim() const { return static_cast<int>(mean.size()); }
};

inline constexpr double kDefaultEigenTol = 1e-12;
inline constexpr double kDefaultClampEps = 1e-5;

// Columns of z are samples. Requires at least two columns.
StyleMatrix compute_style_matrix(const Eigen::MatrixXd& z);

// Jacobi eigendecomposition of a symmetric matrix. Eigenvalues are returned
// as computed (possibly negative), sorted descending, with the sign
// convention applied to the vectors.
EigenFactorization jacobi_eigen(const Eigen::MatrixXd& s, double tol = kDefaultEigenTol,
                                int max_sweeps = 100);

// As jacobi_eigen, for PSD inputs: negative round-off eigenvalues clamp to 0.
EigenFactorization symmetric_eigen(const Eigen::MatrixXd& s, double tol = kDefaultEigenTol);

Neutralizer make_neutralizer(const StyleMatrix& sm, double eps = kDefaultClampEps);
Stylizer make_stylizer(const StyleMatrix& sm, double eps = kDefaultClampEps);

// Both operators act column-wise; a single column is a valid input.
Eigen::MatrixXd neutralize(const Neutralizer& op, const Eigen::MatrixXd& z);
Eigen::MatrixXd stylize(const Stylizer& op, const Eigen::MatrixXd& z);

}  // namespace nst
