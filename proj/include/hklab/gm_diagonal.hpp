#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "hklab/colength.hpp"
#include "hklab/fp_linalg.hpp"
#include "hklab/graded_hypersurface.hpp"
#include "hklab/rational.hpp"

namespace hklab {

/// Exponents d_1..d_s of x_1^{d_1} + ... + x_s^{d_s}.
class DiagonalSpec {
 public:
  explicit DiagonalSpec(std::vector<int> exponents) : d_(std::move(exponents)) {
    if (d_.size() < 2) throw MathError("diagonal hypersurface needs s >= 2");
    for (int e : d_)
      if (e < 1) throw MathError("diagonal exponents must be positive");
  }
  const std::vector<int>& exponents() const noexcept { return d_; }
  std::size_t size() const noexcept { return d_.size(); }
  std::int64_t product() const {
    return std::accumulate(d_.begin(), d_.end(), std::int64_t{1}, [](std::int64_t a, int b) { return a * b; });
  }
  std::vector<Rational> reciprocals() const {
    std::vector<Rational> x;
    for (int e : d_) x.push_back(make_rational(1, e));
    return x;
  }
  HypersurfaceRing ring(std::uint64_t p) const { return HypersurfaceRing::diagonal(p, d_); }

 private:
  std::vector<int> d_;
};

namespace detail {

/// Pascal's triangle mod p up to row k; exact in characteristic p.
inline std::vector<std::vector<Residue>> binomials_mod_p(const PrimeField& field, int k) {
  std::vector<std::vector<Residue>> c(static_cast<std::size_t>(k + 1));
  for (int i = 0; i <= k; ++i) {
    c[i].assign(static_cast<std::size_t>(i + 1), 0);
    c[i][0] = c[i][i] = 1 % field.characteristic();
    for (int j = 1; j < i; ++j) c[i][j] = field.add(c[i - 1][j - 1], c[i - 1][j]);
  }
  return c;
}

}  // namespace detail

/// D_F(k_1..k_s) = dim F[x_1..x_{s-1}]/(x_i^{k_i}, (x_1+...+x_{s-1})^{k_s}).
///
/// The quotient A = F[x]/(x_i^{k_i}) is graded, so the rank of
/// multiplication by the power splits into blocks A_j -> A_{j+k_s}.
inline std::int64_t d_f(std::uint64_t p, const std::vector<int>& k) {
  if (k.size() < 2) throw MathError("D_F needs s >= 2 arguments");
  for (int v : k)
    if (v < 0) throw MathError("D_F arguments must be nonnegative");
  if (std::any_of(k.begin(), k.end(), [](int v) { return v == 0; })) return 0;

  const PrimeField field(p);
  const std::size_t nv = k.size() - 1;
  const int power = k.back();
  const auto pascal = detail::binomials_mod_p(field, power);

  // Basis monomials of A grouped by degree.
  int top = 0;
  for (std::size_t i = 0; i < nv; ++i) top += k[i] - 1;
  std::vector<std::vector<std::vector<int>>> by_degree(static_cast<std::size_t>(top + 1));
  std::vector<int> e(nv, 0);
  std::function<void(std::size_t, int)> enumerate = [&](std::size_t i, int deg) {
    if (i == nv) {
      by_degree[static_cast<std::size_t>(deg)].push_back(e);
      return;
    }
    for (int v = 0; v < k[i]; ++v) {
      e[i] = v;
      enumerate(i + 1, deg + v);
    }
  };
  enumerate(0, 0);

  std::int64_t dim = 0;
  for (const auto& piece : by_degree) dim += static_cast<std::int64_t>(piece.size());

  std::int64_t rank = 0;
  for (int j = 0; j + power <= top; ++j) {
    const auto& cols = by_degree[static_cast<std::size_t>(j)];
    const auto& rows = by_degree[static_cast<std::size_t>(j + power)];
    std::map<std::vector<int>, std::size_t> row_index;
    for (std::size_t r = 0; r < rows.size(); ++r) row_index.emplace(rows[r], r);
    PrimeFieldMatrix mat(field, rows.size(), cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
      // Terms x^a of the power with multinomial coefficient prod_i C(rest_i, a_i).
      std::vector<int> target = cols[c];
      std::function<void(std::size_t, int, Residue)> expand = [&](std::size_t i, int left, Residue coef) {
        if (i + 1 == nv) {
          if (target[i] + left >= k[i]) return;
          target[i] += left;
          mat.accumulate(row_index.at(target), c, coef);
          target[i] -= left;
          return;
        }
        const int room = k[i] - 1 - target[i];
        for (int a = 0; a <= std::min(left, room); ++a) {
          target[i] += a;
          expand(i + 1, left - a, field.mul(coef, pascal[static_cast<std::size_t>(left)][static_cast<std::size_t>(a)]));
          target[i] -= a;
        }
      };
      expand(0, power, 1 % field.characteristic());
    }
    rank += static_cast<std::int64_t>(rank_mod_p(mat));
  }
  return dim - rank;
}

/// Characteristic-zero D: sample primes above sum k_i until two consecutive
/// samples agree; returns the minimum seen.
inline std::int64_t d_char0(const std::vector<int>& k, int max_samples = 16) {
  if (k.size() < 2) throw MathError("D_F needs s >= 2 arguments");
  std::uint64_t p = next_prime(static_cast<std::uint64_t>(std::max(0, std::accumulate(k.begin(), k.end(), 0))));
  std::int64_t best = d_f(p, k);
  std::int64_t prev = best;
  for (int sample = 1; sample < max_samples; ++sample) {
    p = next_prime(p);
    const std::int64_t cur = d_f(p, k);
    best = std::min(best, cur);
    if (cur == prev) return best;
    prev = cur;
  }
  throw MathError("no stabilization of D_F after " + std::to_string(max_samples) + " primes");
}

/// g_lambda(x) = sum over sign vectors with sum eps_i x_i >= 2 lambda of
/// eps_1...eps_s (sum eps_i x_i - 2 lambda)^{s-1}.
inline Rational g_lambda(const std::vector<Rational>& x, std::int64_t lambda) {
  const std::size_t s = x.size();
  if (s < 2) throw MathError("g needs s >= 2 arguments");
  if (s > 30) throw MathError("g sign enumeration limited to 30 arguments");
  Rational total = 0;
  const Rational two_lambda = 2 * lambda;
  for (std::uint32_t mask = 0; mask < (1U << s); ++mask) {
    Rational sum = 0;
    int sign = 1;
    for (std::size_t i = 0; i < s; ++i) {
      if (mask & (1U << i)) {
        sum -= x[i];
        sign = -sign;
      } else {
        sum += x[i];
      }
    }
    if (sum >= two_lambda) total += sign * rational_pow(sum - two_lambda, static_cast<unsigned>(s - 1));
  }
  return total;
}

struct GValue {
  std::map<std::int64_t, Rational> lambda_terms;  // nonzero g_lambda only
  Rational prefactor = 0;                         // 1 / (2^{s-1} (s-1)!)
  Rational total = 0;                             // prefactor * sum g_lambda
};

inline GValue g_value(const std::vector<Rational>& x) {
  const std::size_t s = x.size();
  if (s < 2) throw MathError("g needs s >= 2 arguments");
  Rational sum = 0;
  for (const auto& v : x) sum += v;
  const std::int64_t reach = ceil_rational(sum / 2);
  GValue g;
  BigInt denom = 1;
  for (std::size_t i = 1; i < s; ++i) denom *= 2 * static_cast<std::int64_t>(i);  // 2^{s-1} (s-1)!
  g.prefactor = Rational(BigInt(1), denom);
  Rational acc = 0;
  for (std::int64_t lambda = -reach; lambda <= reach; ++lambda) {
    Rational term = g_lambda(x, lambda);
    if (term != 0) {
      g.lambda_terms.emplace(lambda, term);
      acc += term;
    }
  }
  g.total = g.prefactor * acc;
  return g;
}

struct DiagonalLimits {
  Rational e_hk_infinity;  // d_1...d_s * g(1/d_1..1/d_s)
  Rational e_naive;        // d_1...d_s * prefactor * g_0
  Rational bare_g;         // g(1/d_1..1/d_s) without the product normalization
  GValue g;
};

inline DiagonalLimits diagonal_limits(const DiagonalSpec& spec) {
  DiagonalLimits out;
  out.g = g_value(spec.reciprocals());
  const Rational scale = spec.product();
  out.bare_g = out.g.total;
  out.e_hk_infinity = scale * out.g.total;
  auto zero = out.g.lambda_terms.find(0);
  out.e_naive = scale * out.g.prefactor * (zero == out.g.lambda_terms.end() ? Rational(0) : zero->second);
  return out;
}

struct SandwichReport {
  Rational lower;
  Rational middle;
  Rational upper;
  Rational width;    // upper - lower
  Rational width_p;  // (upper - lower) * p
  ColengthRecord record;
};

/// d_1..d_s D_F(floor(p/d_i)) / p^{s-1} <= l / q^{s-1} <= d_1..d_s D_F(floor(p/d_i)+1) / p^{s-1}.
inline SandwichReport sandwich_check(const DiagonalSpec& spec, std::uint64_t p, int n, const ColengthOptions& opts = {}) {
  if (n < 1) throw MathError("sandwich check needs n >= 1");
  std::vector<int> lo, hi;
  for (int d : spec.exponents()) {
    lo.push_back(static_cast<int>(p / static_cast<std::uint64_t>(d)));
    hi.push_back(lo.back() + 1);
  }
  const Rational scale = Rational(spec.product()) /
                         boost::multiprecision::pow(BigInt(static_cast<std::int64_t>(p)), static_cast<unsigned>(spec.size() - 1));
  SandwichReport rep;
  rep.lower = scale * d_f(p, lo);
  rep.upper = scale * d_f(p, hi);
  HypersurfaceRing ring = spec.ring(p);
  rep.record = frobenius_colength(ring, IdealSpec::maximal(ring), n, opts);
  rep.middle = rep.record.normalized;
  rep.width = rep.upper - rep.lower;
  rep.width_p = rep.width * static_cast<std::int64_t>(p);
  if (rep.lower > rep.middle || rep.middle > rep.upper)
    throw MathError("sandwich inequality violated: " + to_string(rep.lower) + " <= " + to_string(rep.middle) + " <= " +
                    to_string(rep.upper) + " fails");
  return rep;
}

}  // namespace hklab
