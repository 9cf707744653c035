#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hklab/colength.hpp"
#include "hklab/graded_hypersurface.hpp"
#include "hklab/rational.hpp"

namespace hklab {

/// Smooth plane curve Y = Proj R of degree d: genus (d-1)(d-2)/2, theta = d - 3.
struct CurveGeometry {
  int degree = 1;
  int genus = 0;
  int theta = -2;

  friend bool operator==(const CurveGeometry&, const CurveGeometry&) = default;
};

/// Formal partial derivative with respect to variable i.
inline Polynomial partial_derivative(const Polynomial& f, std::size_t i) {
  const PrimeField& field = f.field();
  Polynomial out(field, f.nvars());
  for (const auto& [m, c] : f.terms()) {
    if (m[i] == 0) continue;
    std::vector<int> e = m.exponents();
    Residue k = field.reduce(e[i]);
    e[i] -= 1;
    out.add_term(Monomial(std::move(e)), field.mul(c, k));
  }
  return out;
}

/// True when (f, df/dx, df/dy, df/dz) is primary to the maximal ideal of
/// the polynomial ring, i.e. Proj R is smooth.
inline bool is_smooth(const HypersurfaceRing& ring) {
  const std::size_t s = ring.nvars();
  HypersurfaceRing ambient = HypersurfaceRing::polynomial_ring(ring.characteristic(), s);
  auto lift = [&](const Polynomial& g) {
    Polynomial out = ambient.zero();
    for (const auto& [m, c] : g.terms()) {
      std::vector<int> e = m.exponents();
      e.push_back(0);
      out.add_term(Monomial(std::move(e)), c);
    }
    return out;
  };
  std::vector<Polynomial> gens{lift(ring.relation())};
  for (std::size_t i = 0; i < s; ++i) {
    Polynomial d = partial_derivative(ring.relation(), i);
    if (!d.is_zero()) gens.push_back(lift(d));
  }
  try {
    colength(ambient, IdealSpec(std::move(gens)));
    return true;
  } catch (const MathError&) {
    return false;
  }
}

inline CurveGeometry curve_geometry(const HypersurfaceRing& ring) {
  if (ring.nvars() != 3) throw MathError("curve geometry needs a plane curve (3 variables)");
  if (!is_smooth(ring)) throw MathError("singular curve");
  const int d = ring.relation_degree();
  return {d, (d - 1) * (d - 2) / 2, d - 3};
}

/// Syz(f_1..f_s) on Y: rank s - 1, degree -(sum d_i) deg Y.
struct SyzygyData {
  int rank = 1;
  std::int64_t degree = 0;
  Rational slope = 0;             // mu = degree / rank
  Rational normalized_slope = 0;  // nu = -mu / deg Y

  static SyzygyData of(const CurveGeometry& geom, const IdealSpec& ideal) {
    SyzygyData s;
    s.rank = static_cast<int>(ideal.size()) - 1;
    if (s.rank < 1) throw MathError("syzygy bundle needs at least two generators");
    s.degree = -static_cast<std::int64_t>(ideal.degree_sum()) * geom.degree;
    s.slope = make_rational(s.degree, s.rank);
    s.normalized_slope = -s.slope / geom.degree;
    return s;
  }
};

/// chi(S^q(m)) by Riemann-Roch.
inline std::int64_t syzygy_euler_char(const CurveGeometry& geom, const IdealSpec& ideal, std::int64_t q, std::int64_t m) {
  const std::int64_t rank = static_cast<std::int64_t>(ideal.size()) - 1;
  const std::int64_t deg_s = -static_cast<std::int64_t>(ideal.degree_sum()) * geom.degree;
  return q * deg_s + rank * m * geom.degree + rank * (1 - geom.genus);
}

struct CohomologyRecord {
  int m = 0;
  std::int64_t h0 = 0;
  std::int64_t chi = 0;
  std::int64_t h1 = 0;

  friend bool operator==(const CohomologyRecord&, const CohomologyRecord&) = default;
};

/// h^0, chi, h^1 of S^q(m) for consecutive m = m_min..m_max.
struct CohomologyProfile {
  std::uint64_t p = 0;
  std::int64_t q = 1;
  std::vector<CohomologyRecord> records;

  int m_min() const { return records.empty() ? 0 : records.front().m; }
  int m_max() const { return records.empty() ? -1 : records.back().m; }
  const CohomologyRecord& at(int m) const { return records.at(static_cast<std::size_t>(m - m_min())); }
};

/// Default upper degree: twice q times the syzygy normalized slope, rounded up.
inline int default_profile_m_max(const IdealSpec& ideal, std::int64_t q) {
  return static_cast<int>(ceil_rational(make_rational(2 * q * ideal.degree_sum(), static_cast<std::int64_t>(ideal.size()) - 1)));
}

/// Degree window of a profile; m_max defaults to default_profile_m_max.
struct ProfileRange {
  int m_min = 0;
  std::optional<int> m_max;
};

inline CohomologyProfile cohomology_profile(const HypersurfaceRing& ring, const CurveGeometry& geom, const IdealSpec& ideal,
                                            std::int64_t q, ProfileRange range = {}, const ColengthOptions& opts = {}) {
  const int top = range.m_max.value_or(default_profile_m_max(ideal, q));
  if (range.m_min < 0 || top < range.m_min) throw MathError("empty profile range");
  const IdealSpec frob = reduced_generators(ring, frobenius_power(ring, ideal, q));
  NormalFormCache cache(ring);
  CohomologyProfile prof;
  prof.p = ring.characteristic();
  prof.q = q;
  for (int m = range.m_min; m <= top; ++m) {
    CohomologyRecord rec;
    rec.m = m;
    rec.h0 = syzygy_h0_of(ring, frob, m, cache, opts);
    rec.chi = syzygy_euler_char(geom, ideal, q, m);
    rec.h1 = rec.h0 - rec.chi;
    if (rec.h1 < 0) throw MathError("negative h1 at m=" + std::to_string(m) + "; ring is not a smooth curve ring");
    prof.records.push_back(rec);
  }
  return prof;
}

inline CohomologyProfile cohomology_profile(const HypersurfaceRing& ring, const IdealSpec& ideal, std::int64_t q,
                                            ProfileRange range = {}, const ColengthOptions& opts = {}) {
  return cohomology_profile(ring, curve_geometry(ring), ideal, q, range, opts);
}

struct HNStep {
  Rational nu;  // normalized slope of the quotient
  int rank = 1;

  friend bool operator==(const HNStep&, const HNStep&) = default;
};

/// A constant-difference run of h^0 matched to cumulative rank R.
struct Plateau {
  int first_m = 0;  // first m with delta h0 = deg Y * R
  int last_m = 0;
  int cumulative_rank = 0;
  Rational intercept = 0;  // D_k = sum_{i<=k} r_i nu_i
};

struct HNProfile {
  std::vector<HNStep> steps;  // increasing nu
  std::vector<Plateau> plateaus;
  double residual = 0;                // max |h0 - piecewise-linear model|
  Rational breakpoint_uncertainty = 0;  // (g + theta) / q
  std::optional<int> first_nonzero_m;  // bounds q nu_1 from above, diagnostic only

  int total_rank() const {
    int r = 0;
    for (const auto& s : steps) r += s.rank;
    return r;
  }
  Rational weighted_slope_sum() const {
    Rational sum = 0;
    for (const auto& s : steps) sum += s.rank * s.nu;
    return sum;
  }
};

/// h0 predicted by the HN lines: max(0, max_k degY(m R_k - q D_k) + R_k(1 - g)).
inline Rational hn_model_h0(const HNProfile& hn, const CurveGeometry& geom, std::int64_t q, int m) {
  Rational best = 0;
  for (const auto& pl : hn.plateaus) {
    Rational line = geom.degree * (Rational(m) * pl.cumulative_rank - q * pl.intercept) + pl.cumulative_rank * (1 - geom.genus);
    best = std::max(best, line);
  }
  return best;
}

inline int plateau_min_length(const CurveGeometry& geom) { return std::max(3, geom.theta + 2); }

/// Reads the HN type of S^q off the piecewise-linear growth of h^0.
///
/// Runs of constant delta h0 = deg Y * R of length at least max(3, theta+2)
/// are plateaus of cumulative rank R. The last must reach R = rank with
/// h1 = 0. Each plateau's exact line deg Y (m R - q D) + R (1 - g) gives
/// the intercept D; slopes follow from successive differences.
inline HNProfile estimate_hn_profile(const CohomologyProfile& profile, const CurveGeometry& geom, int ngens, int degree_sum) {
  const int full_rank = ngens - 1;
  if (full_rank < 1) throw MathError("syzygy bundle needs at least two generators");
  const auto& recs = profile.records;
  if (recs.size() < 2) throw MathError("profile too short");
  const int min_len = plateau_min_length(geom);
  const std::int64_t q = profile.q;

  // delta[i] = h0(m_i) - h0(m_i - 1), defined from the second record on.
  std::vector<std::int64_t> delta(recs.size(), 0);
  for (std::size_t i = 1; i < recs.size(); ++i) delta[i] = recs[i].h0 - recs[i - 1].h0;

  struct Run {
    std::size_t first, last;
    std::int64_t value;
  };
  std::vector<Run> runs;
  for (std::size_t i = 1; i < delta.size(); ++i) {
    if (!runs.empty() && runs.back().value == delta[i] && runs.back().last + 1 == i)
      runs.back().last = i;
    else
      runs.push_back({i, i, delta[i]});
  }

  const Run& tail = runs.back();
  const std::int64_t full_delta = static_cast<std::int64_t>(geom.degree) * full_rank;
  if (tail.value != full_delta || static_cast<int>(tail.last - tail.first + 1) < min_len) throw MathError("profile too short");
  for (std::size_t i = tail.first; i <= tail.last; ++i)
    if (recs[i].h1 != 0) throw MathError("profile too short");

  std::vector<std::optional<Run>> best(static_cast<std::size_t>(full_rank));
  for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
    const Run& run = runs[k];
    if (run.value <= 0 || run.value % geom.degree != 0) continue;
    const std::int64_t r = run.value / geom.degree;
    if (r >= full_rank) continue;
    if (static_cast<int>(run.last - run.first + 1) < min_len) continue;
    auto& slot = best[static_cast<std::size_t>(r)];
    if (!slot || run.last - run.first >= slot->last - slot->first) slot = run;
  }

  HNProfile hn;
  auto intercept_at = [&](std::size_t idx, int cum_rank) {
    const auto& rec = recs[idx];
    Rational numer = Rational(geom.degree) * rec.m * cum_rank + cum_rank * (1 - geom.genus) - rec.h0;
    return numer / (Rational(geom.degree) * q);
  };
  std::size_t prev_last = 0;
  for (int r = 1; r < full_rank; ++r) {
    const auto& run = best[static_cast<std::size_t>(r)];
    if (!run) continue;
    if (run->first < prev_last) throw MathError("ambiguous plateau");
    hn.plateaus.push_back({recs[run->first].m, recs[run->last].m, r, intercept_at(run->last, r)});
    prev_last = run->last;
  }
  if (tail.first < prev_last) throw MathError("ambiguous plateau");
  hn.plateaus.push_back({recs[tail.first].m, recs[tail.last].m, full_rank, intercept_at(tail.last, full_rank)});

  int prev_rank = 0;
  Rational prev_d = 0;
  for (const auto& pl : hn.plateaus) {
    const int r = pl.cumulative_rank - prev_rank;
    hn.steps.push_back({(pl.intercept - prev_d) / r, r});
    prev_rank = pl.cumulative_rank;
    prev_d = pl.intercept;
  }
  for (std::size_t k = 1; k < hn.steps.size(); ++k)
    if (!(hn.steps[k - 1].nu < hn.steps[k].nu)) throw MathError("ambiguous plateau");
  if (hn.weighted_slope_sum() != Rational(degree_sum))
    throw MathError("HN slopes do not conserve total degree: sum r nu = " + to_string(hn.weighted_slope_sum()));

  if (recs.front().h0 == 0) {
    for (const auto& rec : recs) {
      if (rec.h0 > 0) {
        hn.first_nonzero_m = rec.m;
        break;
      }
    }
  }
  double worst = 0;
  for (const auto& rec : recs) worst = std::max(worst, std::abs(to_double(Rational(rec.h0) - hn_model_h0(hn, geom, q, rec.m))));
  hn.residual = worst;
  hn.breakpoint_uncertainty = make_rational(geom.genus + geom.theta, q);
  return hn;
}

/// Checks of the vanishing windows at the estimated slopes.
struct VanishingReport {
  std::int64_t lower_bound = 0;  // floor(q nu_1): h0 expected zero strictly below
  std::int64_t upper_bound = 0;  // ceil(q nu_t + theta): h1 expected zero strictly above
  std::vector<int> h0_violations;
  std::vector<int> h1_violations;
  std::int64_t tail_start = 0;  // ceil(q nu_t)
  std::int64_t tail_h1_sum = 0;
  Rational tail_ratio = 0;  // tail sum / (q^2 / p)
  bool covers_upper_window = false;

  bool clean() const { return h0_violations.empty() && h1_violations.empty(); }
  std::optional<int> largest_h0_violation() const {
    return h0_violations.empty() ? std::nullopt : std::optional<int>(h0_violations.back());
  }
  std::optional<int> smallest_h1_violation() const {
    return h1_violations.empty() ? std::nullopt : std::optional<int>(h1_violations.front());
  }
};

inline VanishingReport vanishing_report(const CohomologyProfile& profile, const HNProfile& hn, const CurveGeometry& geom) {
  if (hn.steps.empty()) throw MathError("empty HN profile");
  VanishingReport rep;
  const std::int64_t q = profile.q;
  const Rational q_nu1 = q * hn.steps.front().nu;
  const Rational q_nut = q * hn.steps.back().nu;
  rep.lower_bound = floor_rational(q_nu1);
  rep.upper_bound = ceil_rational(q_nut + geom.theta);
  rep.tail_start = ceil_rational(q_nut);
  for (const auto& rec : profile.records) {
    if (rec.m < rep.lower_bound && rec.h0 > 0) rep.h0_violations.push_back(rec.m);
    if (rec.m > rep.upper_bound && rec.h1 > 0) rep.h1_violations.push_back(rec.m);
    if (rec.m >= rep.tail_start) rep.tail_h1_sum += rec.h1;
  }
  rep.covers_upper_window = profile.m_max() > rep.upper_bound;
  rep.tail_ratio = Rational(rep.tail_h1_sum) * profile.p / (Rational(q) * q);
  return rep;
}

}  // namespace hklab
