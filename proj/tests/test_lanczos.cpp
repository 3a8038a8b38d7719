#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "rfim_qa/lanczos.hpp"

using namespace rfim_qa;

namespace {

LinearOperator from_matrix(const Eigen::MatrixXd& m) {
  return [m](std::span<const double> v, std::span<double> w) {
    Eigen::Map<const Eigen::VectorXd> x(v.data(), static_cast<Eigen::Index>(v.size()));
    Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())) = m * x;
  };
}

}  // namespace

TEST(Lanczos, MatchesDenseOnRandomSymmetric) {
  oracle::Gen g(5);
  for (int c = 0; c < 20; ++c) {
    const int n = g.integer(10, 300);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = g.real(-1, 1);
    const auto ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues();
    const auto pairs = lanczos_lowest(from_matrix(a), static_cast<std::size_t>(n), 3, a.cwiseAbs().rowwise().sum().maxCoeff());
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(pairs[static_cast<std::size_t>(k)].energy, ref(k), 1e-9);
  }
}

TEST(Lanczos, ResolvesExactDegeneracy) {
  Eigen::VectorXd d(50);
  for (int i = 0; i < 50; ++i) d(i) = i / 10;  // each value five-fold degenerate
  const Eigen::MatrixXd a = d.asDiagonal();
  const auto pairs = lanczos_lowest(from_matrix(a), 50, 3, 5.0);
  for (const auto& p : pairs) EXPECT_NEAR(p.energy, 0.0, 1e-10);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < i; ++j) EXPECT_NEAR(detail::dot(pairs[i].vector, pairs[j].vector), 0.0, 1e-10);
}

TEST(Lanczos, IterationCapRaisesSolverError) {
  oracle::Gen g(9);
  const int n = 400;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = g.real(-1, 1);
  LanczosOptions opt;
  opt.basis_size = 4;
  opt.keep = 1;
  opt.max_matvecs_per_pair = 8;
  try {
    lanczos_lowest(from_matrix(a), n, 2, 40.0, {}, opt);
    FAIL() << "expected solver_error";
  } catch (const solver_error& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(Lanczos, RejectsBadCount) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_THROW(lanczos_lowest(from_matrix(a), 3, 0, 1.0), argument_error);
  EXPECT_THROW(lanczos_lowest(from_matrix(a), 3, 4, 1.0), argument_error);
}
