#include "nst/style_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "nst/errors.hpp"

namespace nst {

StyleMatrix compute_style_matrix(const Eigen::MatrixXd& z) {
  const Eigen::Index d = z.rows();
  const Eigen::Index n = z.cols();
  if (n < 2) throw DataError("need at least 2 samples");
  if (!z.allFinite()) throw NumericError("semantic vectors contain non-finite values");

  StyleMatrix sm;
  sm.n = static_cast<std::size_t>(n);
  sm.mean = Eigen::VectorXd::Zero(d);
  for (Eigen::Index k = 0; k < n; ++k) sm.mean += z.col(k);
  sm.mean /= static_cast<double>(n);

  // Upper triangle accumulated column by column, then mirrored so the result
  // is exactly symmetric and independent of any blocked product ordering.
  sm.cov = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd centered(d);
  for (Eigen::Index k = 0; k < n; ++k) {
    centered = z.col(k) - sm.mean;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double cj = centered[j];
      for (Eigen::Index i = 0; i <= j; ++i) sm.cov(i, j) += centered[i] * cj;
    }
  }
  const double scale = 1.0 / static_cast<double>(n - 1);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      sm.cov(i, j) *= scale;
      sm.cov(j, i) = sm.cov(i, j);
    }
  }
  return sm;
}

namespace {

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) total += 2.0 * a(i, j) * a(i, j);
  }
  return std::sqrt(total);
}

}  // namespace

EigenFactorization jacobi_eigen(const Eigen::MatrixXd& s, double tol, int max_sweeps) {
  if (s.rows() != s.cols()) throw DataError("eigendecomposition needs a square matrix");
  if (!s.allFinite()) throw NumericError("matrix contains non-finite values");
  const Eigen::Index d = s.rows();
  const double norm = s.norm();
  if ((s - s.transpose()).norm() / std::max(1.0, norm) >= 1e-9) {
    throw DataError("matrix is not symmetric");
  }

  Eigen::MatrixXd a = 0.5 * (s + s.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(d, d);
  double* ad = a.data();
  double* vd = v.data();
  auto at = [d](double* base, Eigen::Index r, Eigen::Index c) -> double& {
    return base[c * d + r];
  };

  bool converged = off_diagonal_norm(a) <= tol * norm;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    for (Eigen::Index p = 0; p + 1 < d; ++p) {
      for (Eigen::Index q = p + 1; q < d; ++q) {
        const double apq = at(ad, p, q);
        if (apq == 0.0) continue;
        const double app = at(ad, p, p);
        const double aqq = at(ad, q, q);
        const double theta = 0.5 * (aqq - app) / apq;
        double t = 0.0;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        const double tau = sn / (1.0 + c);

        at(ad, p, p) = app - t * apq;
        at(ad, q, q) = aqq + t * apq;
        at(ad, p, q) = 0.0;
        at(ad, q, p) = 0.0;
        double* col_p = ad + p * d;
        double* col_q = ad + q * d;
        for (Eigen::Index r = 0; r < d; ++r) {
          if (r == p || r == q) continue;
          const double g = col_p[r];
          const double h = col_q[r];
          const double np = g - sn * (h + g * tau);
          const double nq = h + sn * (g - h * tau);
          col_p[r] = np;
          col_q[r] = nq;
          at(ad, p, r) = np;
          at(ad, q, r) = nq;
        }
        double* vp = vd + p * d;
        double* vq = vd + q * d;
        for (Eigen::Index r = 0; r < d; ++r) {
          const double g = vp[r];
          const double h = vq[r];
          vp[r] = g - sn * (h + g * tau);
          vq[r] = h + sn * (g - h * tau);
        }
      }
    }
    converged = off_diagonal_norm(a) <= tol * norm;
  }
  if (!converged) throw NumericError("Jacobi eigensolver did not converge");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return a(i, i) > a(j, j);
  });

  EigenFactorization ef;
  ef.values.resize(d);
  ef.vectors.resize(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    ef.values[k] = a(src, src);
    Eigen::VectorXd col = v.col(src);
    Eigen::Index pivot = 0;
    for (Eigen::Index i = 1; i < d; ++i) {
      if (std::abs(col[i]) > std::abs(col[pivot])) pivot = i;
    }
    if (col[pivot] < 0.0) col = -col;
    ef.vectors.col(k) = col;
  }
  return ef;
}

EigenFactorization symmetric_eigen(const Eigen::MatrixXd& s, double tol) {
  EigenFactorization ef = jacobi_eigen(s, tol);
  ef.values = ef.values.cwiseMax(0.0);
  return ef;
}

Neutralizer make_neutralizer(const StyleMatrix& sm, double eps) {
  if (!(eps > 0.0)) throw UsageError("eps must be positive");
  EigenFactorization ef = symmetric_eigen(sm.cov);
  Neutralizer op;
  op.vectors = std::move(ef.vectors);
  op.inv_sqrt_values = ef.values.unaryExpr([eps](double l) {
    return 1.0 / std::sqrt(std::max(l, eps));
  });
  op.mean = sm.mean;
  return op;
}

Stylizer make_stylizer(const StyleMatrix& sm, double eps) {
  if (!(eps > 0.0)) throw UsageError("eps must be positive");
  EigenFactorization ef = symmetric_eigen(sm.cov);
  Stylizer op;
  op.vectors = std::move(ef.vectors);
  op.sqrt_values = ef.values.unaryExpr([](double l) { return std::sqrt(std::max(l, 0.0)); });
  op.mean = sm.mean;
  return op;
}

Eigen::MatrixXd neutralize(const Neutralizer& op, const Eigen::MatrixXd& z) {
  if (z.rows() != op.mean.size()) throw UsageError("neutralize: dimension mismatch");
  const Eigen::MatrixXd centered = z.colwise() - op.mean;
  const Eigen::MatrixXd rotated = op.vectors.transpose() * centered;
  return op.vectors * (op.inv_sqrt_values.asDiagonal() * rotated);
}

Eigen::MatrixXd stylize(const Stylizer& op, const Eigen::MatrixXd& z) {
  if (z.rows() != op.mean.size()) throw UsageError("stylize: dimension mismatch");
  const Eigen::MatrixXd rotated = op.vectors.transpose() * z;
  Eigen::MatrixXd out = op.vectors * (op.sqrt_values.asDiagonal() * rotated);
  out.colwise() += op.mean;
  return out;
}

}  // namespace nst
