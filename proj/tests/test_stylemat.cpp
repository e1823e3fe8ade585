#include <cmath>

#include "doctest.h"
#include "nst/errors.hpp"
#include "nst/style_matrix.hpp"
#include "test_support.hpp"

using namespace nst;
using testing::gaussian;
using testing::random_spd;
using testing::sample_cov;

namespace {

// Columns drawn from N(mu, cov).
Eigen::MatrixXd correlated(const Eigen::MatrixXd& cov, const Eigen::VectorXd& mu,
                           Eigen::Index n, Rng& rng) {
  const Eigen::MatrixXd l = cov.llt().matrixL();
  return (l * gaussian(cov.rows(), n, rng)).colwise() + mu;
}

StyleMatrix style_of(const Eigen::MatrixXd& cov, const Eigen::VectorXd& mean) {
  return StyleMatrix{cov, mean, 10};
}

}  // namespace

TEST_CASE("style matrix by hand") {
  Eigen::MatrixXd z(2, 2);
  z << 1, -1, 0, 0;
  const StyleMatrix sm = compute_style_matrix(z);
  CHECK(sm.mean.isZero(0.0));
  Eigen::Matrix2d expected;
  expected << 2, 0, 0, 0;
  CHECK(sm.cov == expected);
  CHECK(sm.n == 2);

  const Eigen::MatrixXd same = Eigen::VectorXd::LinSpaced(3, 1, 3).replicate(1, 5);
  CHECK(compute_style_matrix(same).cov.isZero(0.0));
  CHECK_THROWS_WITH_AS(compute_style_matrix(Eigen::MatrixXd::Ones(3, 1)),
                       "need at least 2 samples", DataError);
}

TEST_CASE("style matrix agrees with a plain covariance and is bit-stable") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd z = gaussian(1 + rng.below(12), 2 + rng.below(40), rng);
    const StyleMatrix sm = compute_style_matrix(z);
    CHECK((sm.cov - sample_cov(z)).norm() < 1e-12 * std::max(1.0, sm.cov.norm()));
    CHECK((sm.mean - z.rowwise().mean()).norm() < 1e-14);
    CHECK(sm.cov == sm.cov.transpose());
    CHECK(compute_style_matrix(z).cov == sm.cov);
    CHECK_NOTHROW(make_stylizer(sm));
  }
}

TEST_CASE("eigensolver on small analytic cases") {
  Eigen::Matrix2d d;
  d << 2, 0, 0, 0;
  EigenFactorization ef = symmetric_eigen(d);
  CHECK(ef.values == Eigen::Vector2d(2, 0));
  CHECK(ef.vectors == Eigen::Matrix2d::Identity());

  Eigen::Matrix2d s;
  s << 2, 1, 1, 2;
  ef = symmetric_eigen(s);
  CHECK(ef.values[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(ef.values[1] == doctest::Approx(1.0).epsilon(1e-14));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK((ef.vectors.col(0) - Eigen::Vector2d(r, r)).norm() < 1e-14);
  // Largest-magnitude entries tie; the first one is made positive.
  CHECK((ef.vectors.col(1) - Eigen::Vector2d(r, -r)).norm() < 1e-14);
}

TEST_CASE("eigensolver residuals, ordering and signs on random PSD matrices") {
  Rng rng(4);
  for (int d : {1, 2, 5, 16, 64}) {
    const Eigen::MatrixXd a = gaussian(d, std::max(1, d / 2), rng);
    const Eigen::MatrixXd s = a * a.transpose();  // rank deficient on purpose
    const EigenFactorization ef = symmetric_eigen(s);
    const Eigen::MatrixXd& p = ef.vectors;
    CHECK((p.transpose() * p - Eigen::MatrixXd::Identity(d, d)).norm() < 1e-10);
    CHECK((p * ef.values.asDiagonal() * p.transpose() - s).norm() / std::max(1.0, s.norm()) <
          1e-10);
    for (int i = 0; i < d; ++i) {
      CHECK(ef.values[i] >= 0.0);
      if (i + 1 < d) CHECK(ef.values[i] >= ef.values[i + 1]);
      Eigen::Index arg = 0;
      p.col(i).cwiseAbs().maxCoeff(&arg);
      CHECK(p(arg, i) > 0.0);
    }
  }
}

TEST_CASE("eigensolver errors") {
  Eigen::Matrix2d bad;
  bad << 1, 2, 0, 1;
  CHECK_THROWS_AS(symmetric_eigen(bad), DataError);
  Eigen::Matrix2d s;
  s << 1, 1, 1, 1;
  CHECK_THROWS_AS(jacobi_eigen(s, 1e-12, 0), NumericError);
}

TEST_CASE("operator eigenvalue transforms") {
  const StyleMatrix identity = style_of(Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero());
  CHECK(make_neutralizer(identity).inv_sqrt_values.isApproxToConstant(1.0, 1e-15));
  CHECK(make_stylizer(identity).sqrt_values.isApproxToConstant(1.0, 1e-15));

  Eigen::Matrix2d d;
  d << 4, 0, 0, 0;
  const StyleMatrix rank1 = style_of(d, Eigen::Vector2d::Zero());
  const Neutralizer n = make_neutralizer(rank1, 1e-4);
  CHECK(n.inv_sqrt_values[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(n.inv_sqrt_values[1] == doctest::Approx(100.0).epsilon(1e-12));
  const Stylizer st = make_stylizer(rank1);
  CHECK(st.sqrt_values == Eigen::Vector2d(2.0, 0.0));
  CHECK_THROWS_WITH_AS(make_neutralizer(rank1, 0.0), "eps must be positive", UsageError);
  CHECK_THROWS_AS(make_stylizer(rank1, -1.0), UsageError);
}

TEST_CASE("identity operators leave vectors unchanged") {
  Rng rng(6);
  const StyleMatrix identity = style_of(Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero());
  const Eigen::MatrixXd z = gaussian(3, 4, rng);
  CHECK((neutralize(make_neutralizer(identity), z) - z).norm() < 1e-15);
  CHECK((stylize(make_stylizer(identity), z) - z).norm() < 1e-15);
  CHECK(neutralize(make_neutralizer(identity), z.col(0)).cols() == 1);
  CHECK_THROWS_AS(neutralize(make_neutralizer(identity), gaussian(2, 4, rng)), UsageError);
  CHECK_THROWS_AS(stylize(make_stylizer(identity), gaussian(4, 1, rng)), UsageError);
}

TEST_CASE("whitening, coloring and inverse pairing on random full-rank data") {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(14));
    const Eigen::VectorXd mx = gaussian(d, 1, rng), my = gaussian(d, 1, rng);
    const Eigen::MatrixXd zx = correlated(random_spd(d, rng), mx, 400, rng);
    const Eigen::MatrixXd zy = correlated(random_spd(d, rng), my, 300, rng);
    const StyleMatrix sx = compute_style_matrix(zx);
    const StyleMatrix sy = compute_style_matrix(zy);

    const Eigen::MatrixXd w = neutralize(make_neutralizer(sx), zx);
    CHECK((sample_cov(w) - Eigen::MatrixXd::Identity(d, d)).norm() < 1e-8);
    CHECK(w.rowwise().mean().norm() < 1e-10);

    const Eigen::MatrixXd colored = stylize(make_stylizer(sy), w);
    CHECK((sample_cov(colored) - sy.cov).norm() < 1e-8);
    CHECK((colored.rowwise().mean() - sy.mean).norm() < 1e-10);

    const Eigen::MatrixXd back = stylize(make_stylizer(sx), w);
    CHECK((back - zx).norm() / zx.norm() < 1e-8);
  }
}
