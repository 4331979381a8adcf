#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "unitroot/errors.hpp"
#include "unitroot/numla.hpp"

using namespace unitroot;

namespace {

Mat random_mat(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = g(rng);
  return M;
}

Mat random_low_rank(Index n, Index r, std::mt19937_64& rng) {
  return random_mat(n, r, rng) * random_mat(r, n, rng);
}

}  // namespace

TEST_CASE("pinv satisfies the four Penrose conditions") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Mat M = random_low_rank(5, 1 + trial % 4, rng);
    Mat Mp = pinv(M);
    CHECK((M * Mp * M - M).norm() < 1e-10);
    CHECK((Mp * M * Mp - Mp).norm() < 1e-10);
    CHECK(((M * Mp).transpose() - M * Mp).norm() < 1e-10);
    CHECK(((Mp * M).transpose() - Mp * M).norm() < 1e-10);
  }
}

TEST_CASE("pinv of empty and zero matrices") {
  Mat empty(3, 0);
  Mat p = pinv(empty);
  CHECK(p.rows() == 0);
  CHECK(p.cols() == 3);
  CHECK(pinv(Mat::Zero(2, 2)).norm() == 0.0);
}

TEST_CASE("numerical_rank counts singular values above the relative cutoff") {
  std::mt19937_64 rng(5);
  for (Index r = 0; r <= 4; ++r)
    CHECK(numerical_rank(random_low_rank(4, r, rng)) == std::min<Index>(r, 4));
  CHECK(numerical_rank(Mat(0, 0)) == 0);
  // near-rank-deficient: tiny singular value below cutoff vanishes
  Mat D = Mat::Zero(3, 3);
  D(0, 0) = 1.0;
  D(1, 1) = 1e-15;
  CHECK(numerical_rank(D) == 1);
}

TEST_CASE("rank_factorize reconstructs M = B C^T with full-column-rank factors") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    Mat M = random_low_rank(5, 2, rng);
    RankFactorization f = rank_factorize(M);
    CHECK(f.r == 2);
    CHECK(f.B.cols() == 2);
    CHECK((f.B * f.C.transpose() - M).norm() < 1e-10);
    CHECK(numerical_rank(f.B) == 2);
    CHECK(numerical_rank(f.C) == 2);
  }
  CHECK_THROWS_AS(rank_factorize(Mat::Zero(2, 3)), ShapeError);
}

TEST_CASE("orth_complement spans the nullspace of M^T") {
  std::mt19937_64 rng(3);
  Mat M = random_low_rank(5, 2, rng);
  RankFactorization f = rank_factorize(M);
  Mat Bp = orth_complement(f.B);
  CHECK(Bp.cols() == 3);
  CHECK((f.B.transpose() * Bp).norm() < 1e-12);
  CHECK((Bp.transpose() * Bp - Mat::Identity(3, 3)).norm() < 1e-12);
  // empty input: complement is everything
  CHECK((orth_complement(Mat::Zero(4, 0)) - Mat::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("range_basis is orthonormal and spans range(M)") {
  std::mt19937_64 rng(9);
  Mat M = random_low_rank(6, 3, rng);
  Mat Q = range_basis(M);
  CHECK(Q.cols() == 3);
  CHECK((Q.transpose() * Q - Mat::Identity(3, 3)).norm() < 1e-12);
  CHECK(((Mat::Identity(6, 6) - Q * Q.transpose()) * M).norm() < 1e-10);
}

TEST_CASE("ann_row and ann_col annihilate from the correct side") {
  std::mt19937_64 rng(13);
  Mat G = random_mat(5, 2, rng);
  Mat A = random_mat(2, 5, rng);
  CHECK((ann_row(G) * G).norm() < 1e-10);
  CHECK((A * ann_col(A)).norm() < 1e-10);
  // annihilators are idempotent and symmetric
  Mat T = ann_row(G);
  CHECK((T * T - T).norm() < 1e-10);
  CHECK((T - T.transpose()).norm() < 1e-10);
  // empty inputs give the identity
  CHECK((ann_row(Mat::Zero(3, 0)) - Mat::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("anchored tolerance zeroes pure-roundoff matrices") {
  Mat noise = 1e-16 * Mat::Ones(2, 2);
  CHECK(numerical_rank(noise) >= 1);  // relative cutoff alone is blind
  Tolerances t = anchored(Tolerances{}, sigma_max(noise), 1.0);
  CHECK(numerical_rank(noise, t) == 0);
}
