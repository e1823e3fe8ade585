#include <cmath>

#include "doctest.h"
#include "nst/errors.hpp"
#include "nst/viz.hpp"
#include "test_support.hpp"

using namespace nst;
using testing::TempDir;

namespace {

double max_distance_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.rows(); ++j) {
      const double da = (a.row(i) - a.row(j)).norm();
      const double db = (b.row(i) - b.row(j)).norm();
      worst = std::max(worst, std::abs(da - db));
    }
  }
  return worst;
}

std::vector<std::string> names(Eigen::Index n) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back("p" + std::to_string(i));
  return out;
}

}  // namespace

TEST_CASE("top eigenvectors") {
  Eigen::MatrixXd s(2, 2);
  s << 2, 0, 0, 0;
  const EigenFactorization ef = symmetric_eigen(s);
  const Eigen::MatrixXd top = top_eigenvectors(ef, 1);
  REQUIRE(top.cols() == 1);
  CHECK(top(0, 0) == doctest::Approx(1.0));
  CHECK(top(1, 0) == doctest::Approx(0.0));
  CHECK(top_eigenvectors(ef, 2) == ef.vectors);
  CHECK_THROWS_AS(top_eigenvectors(ef, 0), UsageError);
  CHECK_THROWS_AS(top_eigenvectors(ef, 3), UsageError);
}

TEST_CASE("mds of an equilateral triangle") {
  Eigen::MatrixXd p(3, 2);
  p << 0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2;
  const Projection2D proj = classical_mds(p, names(3));
  CHECK(max_distance_error(p, proj.points) < 1e-8);
  CHECK(proj.points.colwise().sum().norm() < 1e-10);
  CHECK(proj.labels == names(3));
}

TEST_CASE("mds recovers planar configurations embedded in higher dimensions") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.below(20));
    const Eigen::MatrixXd plane = testing::gaussian(n, 2, rng);
    // Rotate the plane into 10 dimensions and shift it.
    const Eigen::MatrixXd basis = testing::gaussian(10, 2, rng).householderQr().householderQ() *
                                  Eigen::MatrixXd::Identity(10, 2);
    Eigen::MatrixXd points = plane * basis.transpose();
    points.rowwise() += testing::gaussian(1, 10, rng).row(0);
    const Projection2D proj = classical_mds(points, names(n));
    CHECK(max_distance_error(plane, proj.points) < 1e-8);
  }
}

TEST_CASE("mds errors") {
  CHECK_THROWS_AS(classical_mds(Eigen::MatrixXd::Ones(2, 3), names(2)), DataError);
  CHECK_THROWS_AS(classical_mds(Eigen::MatrixXd::Ones(4, 3), names(3)), UsageError);
}

TEST_CASE("heatmap csv") {
  TempDir dir("viz");
  Eigen::MatrixXd m(2, 2);
  m << 1.0 / 3, -2.5e-7, 4, std::acos(-1.0);
  export_heatmap(m, dir / "m.csv");
  const std::string text = testing::read_file(dir / "m.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  const Eigen::MatrixXd back = read_matrix_csv(dir / "m.csv");
  CHECK((back - m).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(export_heatmap(Eigen::MatrixXd(), dir / "e.csv"), DataError);
  CHECK_THROWS_AS(export_heatmap(m, dir / "missing" / "m.csv"), DataError);

  export_heatmap_svg(m, dir / "a.svg");
  export_heatmap_svg(m, dir / "b.svg");
  CHECK(testing::read_file(dir / "a.svg") == testing::read_file(dir / "b.svg"));
  CHECK(testing::read_file(dir / "a.svg").rfind("<svg", 0) == 0);
}

TEST_CASE("scatter csv") {
  TempDir dir("viz");
  Eigen::MatrixXd p(3, 2);
  p << 0, 0, 1, 0, 0, 1;
  const Projection2D proj = classical_mds(p, {"a", "b", "c"});
  export_scatter(proj, dir / "s.csv");
  const std::string text = testing::read_file(dir / "s.csv");
  CHECK(text.find("a,") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  export_scatter_svg(proj, dir / "s.svg");
  CHECK(std::filesystem::file_size(dir / "s.svg") > 0);
}
