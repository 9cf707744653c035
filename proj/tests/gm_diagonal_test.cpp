#include <gtest/gtest.h>

#include <algorithm>

#include "hklab/gm_diagonal.hpp"

using namespace hklab;

namespace {

std::vector<Rational> rats(std::initializer_list<std::pair<int, int>> v) {
  std::vector<Rational> out;
  for (auto [a, b] : v) out.push_back(make_rational(a, b));
  return out;
}

}  // namespace

TEST(DF, TwoArgumentsIsMinimum) {
  for (std::uint64_t p : {2, 3, 7})
    for (int a = 0; a <= 6; ++a)
      for (int b = 0; b <= 6; ++b) EXPECT_EQ(d_f(p, {a, b}), std::min(a, b)) << p << ' ' << a << ' ' << b;
}

TEST(DF, Examples) {
  EXPECT_EQ(d_f(7, {3, 3, 3}), 7);
  EXPECT_EQ(d_f(5, {2, 2, 2}), 3);
  EXPECT_EQ(d_f(5, {1, 1, 1}), 1);
  EXPECT_EQ(d_f(5, {0, 4, 4}), 0);
  // (x+y)^2 = x^2 + y^2 in characteristic 2, so it dies modulo (x^2, y^2).
  EXPECT_EQ(d_f(2, {2, 2, 2}), 4);
}

TEST(DF, RejectsBadInput) {
  EXPECT_THROW(d_f(5, {3}), MathError);
  EXPECT_THROW(d_f(5, {3, -1}), MathError);
  EXPECT_THROW(d_f(4, {3, 3}), MathError);
}

TEST(DF, SymmetricIncludingLastArgument) {
  for (std::uint64_t p : {3, 5, 7}) {
    for (int a = 1; a <= 5; ++a)
      for (int b = 1; b <= 5; ++b)
        for (int c = 1; c <= 5; ++c) {
          std::vector<int> k{a, b, c};
          std::sort(k.begin(), k.end());
          const auto base = d_f(p, k);
          do {
            EXPECT_EQ(d_f(p, k), base) << p << ' ' << k[0] << k[1] << k[2];
          } while (std::next_permutation(k.begin(), k.end()));
        }
  }
}

TEST(DF, MonotoneInEachArgument) {
  for (std::uint64_t p : {3, 5}) {
    for (int a = 1; a <= 4; ++a)
      for (int b = 1; b <= 4; ++b)
        for (int c = 1; c <= 4; ++c)
          for (int d = 1; d <= 4; ++d) {
            std::vector<int> k{a, b, c, d};
            const auto base = d_f(p, k);
            for (std::size_t i = 0; i < 4; ++i) {
              auto up = k;
              ++up[i];
              EXPECT_GE(d_f(p, up), base);
            }
          }
  }
}

TEST(DF, CharZeroEqualDiagonal) {
  for (int n = 1; n <= 12; ++n) EXPECT_EQ(d_char0({n, n, n}), (3 * n * n + 3) / 4) << n;
}

TEST(DF, CharZeroTwoArguments) { EXPECT_EQ(d_char0({4, 9}), 4); }

TEST(GLambda, Examples) {
  EXPECT_EQ(g_lambda(rats({{1, 1}, {1, 1}, {1, 1}}), 0), 6);
  // x = (1/2)^5: only eps = all +1 reaches 5/2 - 2 = 1/2 for lambda = 1.
  const auto half5 = rats({{1, 2}, {1, 2}, {1, 2}, {1, 2}, {1, 2}});
  EXPECT_EQ(g_lambda(half5, 1), make_rational(1, 16));
  EXPECT_EQ(g_lambda(half5, -1), make_rational(1, 16));
}

TEST(GLambda, VanishesOutsideReach) {
  const auto x = rats({{1, 2}, {1, 3}, {1, 5}});
  // sum x < 2: every lambda >= 1 has no sign vector reaching it.
  EXPECT_EQ(g_lambda(x, 1), 0);
  EXPECT_EQ(g_lambda(x, 3), 0);
}

TEST(GValue, KnownTotals) {
  EXPECT_EQ(g_value(rats({{1, 1}, {1, 1}, {1, 1}})).total, 1);
  EXPECT_EQ(g_value(rats({{1, 2}, {1, 2}, {1, 2}})).total, make_rational(3, 16));
  auto g = g_value(rats({{1, 1}, {1, 1}, {1, 1}}));
  EXPECT_EQ(g.prefactor, make_rational(1, 8));
  for (const auto& [lambda, v] : g.lambda_terms) EXPECT_NE(v, 0) << lambda;
}

TEST(GValue, PermutationInvariant) {
  auto x = rats({{1, 2}, {1, 3}, {1, 5}, {1, 7}});
  const auto base = g_value(x).total;
  std::sort(x.begin(), x.end());
  do {
    EXPECT_EQ(g_value(x).total, base);
  } while (std::next_permutation(x.begin(), x.end()));
}

TEST(GValue, TwoVariables) {
  // s = 2: g(x, y) = min(x, y) for 0 < x, y <= 1.
  for (int a = 1; a <= 6; ++a)
    for (int b = 1; b <= 6; ++b) EXPECT_EQ(g_value(rats({{1, a}, {1, b}})).total, make_rational(1, std::max(a, b)));
}

TEST(DiagonalLimits, Examples) {
  auto bc = diagonal_limits(DiagonalSpec({1, 1, 1}));
  EXPECT_EQ(bc.e_hk_infinity, 1);
  EXPECT_EQ(bc.e_naive, make_rational(3, 4));
  EXPECT_EQ(diagonal_limits(DiagonalSpec({2, 2, 2})).e_hk_infinity, make_rational(3, 2));
  EXPECT_EQ(diagonal_limits(DiagonalSpec({3, 3, 3})).e_hk_infinity, make_rational(9, 4));
  EXPECT_EQ(diagonal_limits(DiagonalSpec({4, 4, 4, 4})).e_hk_infinity, make_rational(8, 3));
  auto q = diagonal_limits(DiagonalSpec({2, 2, 2}));
  EXPECT_EQ(q.e_hk_infinity, 8 * q.bare_g);
}

TEST(DiagonalLimits, LimitMatchesCharZeroD) {
  // e_infinity = lim d_1..d_s D(N/d_1, ..)/N^{s-1}; at N = 12 k the quotient is exact
  // for (2,2,2): 8 * ceil(3 (6k)^2 / 4) / (12k)^2 = 3/2.
  EXPECT_EQ(8 * make_rational(d_char0({6, 6, 6}), 144), make_rational(3, 2));
}

TEST(DiagonalSpec, Validation) {
  EXPECT_THROW(DiagonalSpec({3}), MathError);
  EXPECT_THROW(DiagonalSpec({3, 0}), MathError);
  EXPECT_EQ(DiagonalSpec({2, 3, 4}).product(), 24);
}

TEST(Sandwich, QuadricAtFive) {
  auto rep = sandwich_check(DiagonalSpec({2, 2, 2}), 5, 1);
  EXPECT_EQ(rep.lower, make_rational(24, 25));
  EXPECT_EQ(rep.middle, make_rational(37, 25));
  EXPECT_EQ(rep.upper, make_rational(56, 25));
  EXPECT_EQ(rep.width_p, make_rational(32, 5));
}

TEST(Sandwich, MoreCases) {
  auto two = sandwich_check(DiagonalSpec({2, 2}), 5, 1);
  EXPECT_LE(two.lower, two.middle);
  EXPECT_LE(two.middle, two.upper);
  EXPECT_EQ(two.middle, make_rational(9, 5));
  auto bc = sandwich_check(DiagonalSpec({1, 1, 1}), 3, 1);
  EXPECT_EQ(bc.middle, 1);
  auto deep = sandwich_check(DiagonalSpec({2, 2, 2}), 5, 2);
  EXPECT_EQ(deep.middle, make_rational(937, 625));
}

TEST(Sandwich, WidthShrinksWithP) {
  Rational prev = sandwich_check(DiagonalSpec({2, 2, 2}), 5, 1).width;
  for (std::uint64_t p : {7, 11, 13}) {
    auto rep = sandwich_check(DiagonalSpec({2, 2, 2}), p, 1);
    EXPECT_LT(rep.width, prev) << p;
    prev = rep.width;
  }
}
