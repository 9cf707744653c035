#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hklab/colength.hpp"
#include "hklab/curve_cohomology.hpp"
#include "hklab/rational.hpp"

namespace hklab {

/// (deg Y / 2) (sum_k r_k nu_k^2 - sum_i d_i^2).
inline Rational hk_from_profile(const CurveGeometry& geom, const HNProfile& hn, const std::vector<int>& degrees) {
  Rational quad = 0;
  for (const auto& step : hn.steps) quad += step.rank * step.nu * step.nu;
  std::int64_t dsq = 0;
  for (int d : degrees) dsq += static_cast<std::int64_t>(d) * d;
  return make_rational(geom.degree, 2) * (quad - dsq);
}

/// l(R/I^{[p^n]}) / (p^n)^{krull_dim}, exact.
inline Rational normalized_colength(const HypersurfaceRing& ring, const IdealSpec& ideal, int n, const ColengthOptions& opts = {}) {
  return frobenius_colength(ring, ideal, n, opts).normalized;
}

enum class ReferenceFamily { fermat_quartic, chang_quartic };

/// Exact HK multiplicities of the maximal ideal for the two quartic families.
inline Rational reference_value(ReferenceFamily family, std::uint64_t p) {
  if (p == 2 || !is_prime(p)) throw MathError("reference values need an odd prime, got " + std::to_string(p));
  const auto pp = static_cast<std::int64_t>(p);
  switch (family) {
    case ReferenceFamily::fermat_quartic: {
      const auto r = p % 8;
      if (r == 3 || r == 5) return 3 + make_rational(1, pp * pp);
      return 3;
    }
    case ReferenceFamily::chang_quartic: {
      const std::int64_t sign = p % 4 == 1 ? 1 : -1;
      const std::int64_t base = 2 * pp * pp + sign * 2 * pp;
      return make_rational(8, 3) * make_rational(base + 3, base + 1);
    }
  }
  throw MathError("unknown reference family");
}

struct ConvergenceRow {
  std::uint64_t p = 0;
  int n = 1;
  std::int64_t q = 1;
  Rational normalized = 0;
  Rational reference = 0;
  Rational residual = 0;    // normalized - reference
  Rational residual_p = 0;  // residual * p

  static ConvergenceRow make(std::uint64_t p, int n, std::int64_t q, Rational normalized, Rational reference) {
    ConvergenceRow row{p, n, q, normalized, reference, 0, 0};
    row.residual = normalized - reference;
    row.residual_p = row.residual * static_cast<std::int64_t>(p);
    return row;
  }
};

struct FitReport {
  double e_hat = 0;
  double c_hat = 0;
  double c2_hat = 0;
  double max_resid_p = 0;   // max |normalized - reference| * p
  double max_resid_p2 = 0;  // max |normalized - reference| * p^2
  double max_fit_error = 0; // max |normalized - fitted curve|
};

/// Least squares normalized ~ e + c/p + c2/p^2 over at least three primes.
inline FitReport convergence_fit(const std::vector<ConvergenceRow>& rows) {
  std::set<std::uint64_t> primes;
  for (const auto& r : rows) primes.insert(r.p);
  if (rows.size() < 3 || primes.size() != rows.size()) throw MathError("underdetermined: need at least three rows with distinct p");
  for (const auto& r : rows)
    if (r.n != rows.front().n) throw MathError("convergence rows must share n");

  const auto count = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd design(count, 3);
  Eigen::VectorXd target(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const double p = static_cast<double>(rows[static_cast<std::size_t>(i)].p);
    design(i, 0) = 1.0;
    design(i, 1) = 1.0 / p;
    design(i, 2) = 1.0 / (p * p);
    target(i) = to_double(rows[static_cast<std::size_t>(i)].normalized);
  }
  Eigen::Vector3d coef = design.colPivHouseholderQr().solve(target);

  FitReport rep;
  rep.e_hat = coef(0);
  rep.c_hat = coef(1);
  rep.c2_hat = coef(2);
  const Eigen::VectorXd fitted = design * coef;
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    const double p = static_cast<double>(row.p);
    const double resid = std::abs(to_double(row.residual));
    rep.max_resid_p = std::max(rep.max_resid_p, resid * p);
    rep.max_resid_p2 = std::max(rep.max_resid_p2, resid * p * p);
    rep.max_fit_error = std::max(rep.max_fit_error, std::abs(fitted(i) - target(i)));
  }
  return rep;
}

}  // namespace hklab
