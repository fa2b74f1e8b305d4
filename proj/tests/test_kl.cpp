#include <doctest.h>

#include <cmath>

#include "glws/errors.hpp"
#include "glws/kl.hpp"

using namespace glws;

TEST_CASE("eigenvalues are positive and descending") {
  const KLExpansion kl = kl_expand(0.1, 4.0, 0.0, 25.0, 201, 5);
  for (int j = 0; j < 5; ++j) CHECK(kl.eigenvalues[j] > 0.0);
  for (int j = 1; j < 5; ++j) CHECK(kl.eigenvalues[j] <= kl.eigenvalues[j - 1]);
}

TEST_CASE("eigenfunctions are orthonormal in the discrete inner product") {
  const KLExpansion kl = kl_expand(0.1, 4.0, 0.0, 25.0, 201, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double dot =
          (kl.eigenfunctions.col(i).array() * kl.eigenfunctions.col(j).array() *
           kl.weights.array())
              .sum();
      CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-8);
    }
}

TEST_CASE("eigenpairs satisfy the discretized integral eigenproblem") {
  const KLExpansion kl = kl_expand(0.1, 4.0, 0.0, 25.0, 201, 2);
  CHECK(kl.eigenproblem_residual() < 1e-6);
}

TEST_CASE("two-term reconstruction at lag zero: below sigma2, above half of it") {
  // Brute-force grid oracle: Mercer truncation sum lambda_j phi_j(t)^2
  // evaluated at the domain midpoint and compared with the kernel diagonal.
  const double sigma2 = 0.1;
  const KLExpansion kl = kl_expand(sigma2, 4.0, 0.0, 25.0, 201, 2);
  const Eigen::Index mid = kl.times.size() / 2;
  double mercer = 0.0;
  for (int j = 0; j < 2; ++j)
    mercer += kl.eigenvalues[j] * kl.eigenfunctions(mid, j) * kl.eigenfunctions(mid, j);
  CHECK(mercer < sigma2);
  CHECK(mercer > 0.5 * sigma2);
}

TEST_CASE("Nystrom extension agrees with the grid values and is smooth") {
  const KLExpansion kl = kl_expand(0.1, 4.0, 0.0, 25.0, 201, 2);
  for (const Eigen::Index i : {0L, 57L, 200L})
    for (int j = 0; j < 2; ++j)
      CHECK(kl.eigenfunction_at(j, kl.times[i]) ==
            doctest::Approx(kl.eigenfunctions(i, j)).epsilon(1e-8));
  // Off-grid values interpolate smoothly between neighbors.
  const double t = 0.5 * (kl.times[10] + kl.times[11]);
  const double v = kl.eigenfunction_at(0, t);
  const double lo = std::min(kl.eigenfunctions(10, 0), kl.eigenfunctions(11, 0));
  const double hi = std::max(kl.eigenfunctions(10, 0), kl.eigenfunctions(11, 0));
  CHECK(v >= lo - 1e-3);
  CHECK(v <= hi + 1e-3);
}

TEST_CASE("basis scaling follows the chosen eigenvalue convention") {
  const KLExpansion kl = kl_expand(0.1, 4.0, 0.0, 20.0, 151, 2);
  Eigen::VectorXd tq(3);
  tq << 1.0, 7.3, 19.0;
  const Eigen::MatrixXd printed = kl.basis_at(tq, false);
  const Eigen::MatrixXd rooted = kl.basis_at(tq, true);
  for (int j = 0; j < 2; ++j) {
    const double ratio = std::sqrt(kl.eigenvalues[j]) / kl.eigenvalues[j];
    for (int i = 0; i < 3; ++i)
      CHECK(rooted(i, j) == doctest::Approx(printed(i, j) * ratio).epsilon(1e-10));
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(kl_expand(0.1, 4.0, 0.0, 25.0, 50, 2), InvalidArgumentError);
  CHECK_THROWS_AS(kl_expand(-0.1, 4.0, 0.0, 25.0, 201, 2), InvalidArgumentError);
  CHECK_THROWS_AS(kl_expand(0.1, 4.0, 5.0, 5.0, 201, 2), InvalidArgumentError);
}
