#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "hklab/fp_linalg.hpp"

using namespace hklab;

namespace {

// Independent rank oracle: |column space| = p^rank, found by enumerating
// every combination of the columns.
std::size_t brute_force_rank(const PrimeFieldMatrix& m) {
  const Residue p = m.field().characteristic();
  std::set<std::vector<Residue>> image;
  std::vector<Residue> coeffs(m.cols(), 0);
  while (true) {
    std::vector<Residue> v(m.rows(), 0);
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c) v[r] = (v[r] + coeffs[c] * m(r, c)) % p;
    image.insert(v);
    std::size_t i = 0;
    while (i < coeffs.size() && ++coeffs[i] == p) coeffs[i++] = 0;
    if (i == coeffs.size()) break;
  }
  std::size_t rank = 0, size = 1;
  while (size < image.size()) {
    size *= p;
    ++rank;
  }
  return rank;
}

PrimeFieldMatrix random_matrix(std::mt19937& rng, PrimeField field, std::size_t rows, std::size_t cols, double zero_bias) {
  std::uniform_int_distribution<Residue> entry(0, field.characteristic() - 1);
  std::bernoulli_distribution zero(zero_bias);
  PrimeFieldMatrix m(field, rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m.set(r, c, zero(rng) ? 0 : entry(rng));
  return m;
}

}  // namespace

TEST(PrimeField, RejectsComposites) {
  EXPECT_THROW(PrimeField(1), MathError);
  EXPECT_THROW(PrimeField(9), MathError);
  EXPECT_THROW(PrimeField(561), MathError);  // Carmichael
  EXPECT_NO_THROW(PrimeField(2));
  EXPECT_NO_THROW(PrimeField(4294967291ULL));
  EXPECT_THROW(PrimeField(4294967311ULL), MathError);  // prime, but wider than 32 bits
}

TEST(PrimeField, PrimalityAgreesWithTrialDivision) {
  for (std::uint64_t n = 0; n < 5000; ++n) {
    bool trial = n >= 2;
    for (std::uint64_t d = 2; d * d <= n && trial; ++d) trial = n % d != 0;
    EXPECT_EQ(is_prime(n), trial) << n;
  }
}

TEST(PrimeField, InverseAndArithmetic) {
  PrimeField f(101);
  for (Residue a = 1; a < 101; ++a) EXPECT_EQ(f.mul(a, f.inv(a)), 1U);
  EXPECT_THROW(f.inv(0), MathError);
  EXPECT_EQ(f.reduce(-1), 100U);
  EXPECT_EQ(f.sub(3, 5), 99U);
  EXPECT_EQ(f.pow(3, 100), 1U);
}

TEST(RankModP, EmptyMatrix) {
  PrimeFieldMatrix m(PrimeField(5), 0, 0);
  EXPECT_EQ(rank_mod_p(m), 0U);
  EXPECT_EQ(rank_mod_p(PrimeFieldMatrix(PrimeField(5), 3, 0)), 0U);
  EXPECT_EQ(rank_mod_p(PrimeFieldMatrix(PrimeField(5), 0, 4)), 0U);
}

TEST(RankModP, Identity) { EXPECT_EQ(rank_mod_p(PrimeFieldMatrix::identity(PrimeField(5), 3)), 3U); }

TEST(RankModP, MultiplicationByCubicOnTruncatedPlane) {
  // 3xy(x+y) acting on F_7[x,y]/(x^3,y^3), basis x^i y^j.
  PrimeField f(7);
  PrimeFieldMatrix m(f, 9, 9);
  auto idx = [](int i, int j) { return static_cast<std::size_t>(3 * i + j); };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i + 2 < 3 && j + 1 < 3) m.accumulate(idx(i + 2, j + 1), idx(i, j), 3);
      if (i + 1 < 3 && j + 2 < 3) m.accumulate(idx(i + 1, j + 2), idx(i, j), 3);
    }
  EXPECT_EQ(rank_mod_p(m), 2U);
  EXPECT_EQ(brute_force_rank(m), 2U);
}

TEST(RankModP, AgreesWithEnumerationOracle) {
  std::mt19937 rng(20261016);
  for (Residue p : {2U, 3U, 5U}) {
    PrimeField f(p);
    for (int trial = 0; trial < 60; ++trial) {
      std::size_t rows = 1 + rng() % 5, cols = 1 + rng() % (p == 5 ? 4 : 5);
      auto m = random_matrix(rng, f, rows, cols, trial % 2 ? 0.6 : 0.2);
      EXPECT_EQ(rank_mod_p(m), brute_force_rank(m)) << "p=" << p << " trial " << trial;
    }
  }
}

TEST(RankModP, SingletonPeelingMatchesPlainElimination) {
  std::mt19937 rng(7);
  for (Residue p : {2U, 7U, 65521U}) {
    PrimeField f(p);
    for (int trial = 0; trial < 80; ++trial) {
      std::size_t rows = 1 + rng() % 30, cols = 1 + rng() % 30;
      auto m = random_matrix(rng, f, rows, cols, 0.85);
      EXPECT_EQ(rank_mod_p(m), rank_mod_p_dense(m));
    }
  }
}

TEST(RankModP, TransposeRankNullityAndPermutation) {
  std::mt19937 rng(99);
  PrimeField f(13);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t rows = 1 + rng() % 12, cols = 1 + rng() % 12;
    auto m = random_matrix(rng, f, rows, cols, 0.5);
    const std::size_t r = rank_mod_p(m);
    EXPECT_LE(r, std::min(rows, cols));
    EXPECT_EQ(r, rank_mod_p(m.transposed()));
    EXPECT_EQ(r + nullity_mod_p(m), cols);

    std::vector<std::size_t> rp(rows), cp(cols);
    std::iota(rp.begin(), rp.end(), 0);
    std::iota(cp.begin(), cp.end(), 0);
    std::shuffle(rp.begin(), rp.end(), rng);
    std::shuffle(cp.begin(), cp.end(), rng);
    PrimeFieldMatrix permuted(f, rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) permuted.set(i, j, m(rp[i], cp[j]));
    EXPECT_EQ(r, rank_mod_p(permuted));
  }
}

TEST(RankModP, DoesNotMutateInput) {
  PrimeField f(3);
  PrimeFieldMatrix m(f, 2, 2, {1, 2, 2, 1});
  auto before = std::vector<Residue>(m.row(0).begin(), m.row(0).end());
  EXPECT_EQ(rank_mod_p(m), 1U);  // second row is 2 * first mod 3
  EXPECT_EQ(std::vector<Residue>(m.row(0).begin(), m.row(0).end()), before);
}

TEST(PrimeFieldMatrix, ShapeMismatchThrows) {
  EXPECT_THROW(PrimeFieldMatrix(PrimeField(5), 2, 2, {1, 2, 3}), MathError);
}
