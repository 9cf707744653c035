#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hklab/fp_linalg.hpp"
#include "hklab/graded_hypersurface.hpp"
#include "hklab/polynomial.hpp"
#include "hklab/rational.hpp"

namespace hklab {

/// Raised when a computation would build a matrix above the configured cap.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Homogeneous ideal (g_1, ..., g_k) with declared degrees.
class IdealSpec {
 public:
  IdealSpec(std::vector<Polynomial> generators, std::vector<int> degrees)
      : gens_(std::move(generators)), degrees_(std::move(degrees)) {
    if (gens_.empty()) throw MathError("ideal needs at least one generator");
    if (gens_.size() != degrees_.size()) throw MathError("ideal generator and degree counts differ");
    for (std::size_t i = 0; i < gens_.size(); ++i) {
      if (!gens_[i].is_homogeneous()) throw MathError("ideal generator " + to_string(gens_[i]) + " is not homogeneous");
      if (!gens_[i].is_zero() && gens_[i].degree() != degrees_[i])
        throw MathError("ideal generator " + to_string(gens_[i]) + " does not have degree " + std::to_string(degrees_[i]));
    }
  }

  /// Degrees taken from the generators themselves.
  explicit IdealSpec(std::vector<Polynomial> generators) : IdealSpec(generators, degrees_of(generators)) {}

  static IdealSpec maximal(const HypersurfaceRing& ring) {
    std::vector<Polynomial> vars;
    for (std::size_t i = 0; i < ring.nvars(); ++i) vars.push_back(ring.variable(i));
    return IdealSpec(std::move(vars));
  }

  /// (x_1^N, ..., x_s^N)
  static IdealSpec variable_powers(const HypersurfaceRing& ring, int power) {
    std::vector<Polynomial> gens;
    for (std::size_t i = 0; i < ring.nvars(); ++i)
      gens.emplace_back(ring.field(), Monomial::variable(ring.nvars(), i, power));
    return IdealSpec(std::move(gens));
  }

  /// "maximal" or a comma-separated list of homogeneous polynomials.
  static IdealSpec parse(std::string_view text, const HypersurfaceRing& ring) {
    if (text == "maximal" || text == "m") return maximal(ring);
    std::vector<Polynomial> gens;
    std::size_t start = 0;
    while (start <= text.size()) {
      auto comma = text.find(',', start);
      std::string_view piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      Polynomial g = ring.parse(piece);
      if (!g.is_homogeneous() || g.is_zero()) throw ParseError("ideal generator '" + std::string(piece) + "' must be a nonzero homogeneous polynomial");
      gens.push_back(std::move(g));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return IdealSpec(std::move(gens));
  }

  const std::vector<Polynomial>& generators() const noexcept { return gens_; }
  const std::vector<int>& degrees() const noexcept { return degrees_; }
  std::size_t size() const noexcept { return gens_.size(); }
  int degree_sum() const { return std::accumulate(degrees_.begin(), degrees_.end(), 0); }

  std::vector<GradedElement> graded() const {
    std::vector<GradedElement> out;
    for (std::size_t i = 0; i < gens_.size(); ++i) out.push_back({gens_[i], degrees_[i]});
    return out;
  }

  /// Generators in canonical form, sorted, joined by ';'. Order-independent.
  std::string canonical() const {
    std::vector<std::string> parts;
    for (const auto& g : gens_) parts.push_back(to_string(g));
    std::sort(parts.begin(), parts.end());
    std::string out;
    for (const auto& s : parts) out += (out.empty() ? "" : ";") + s;
    return out;
  }

 private:
  static std::vector<int> degrees_of(const std::vector<Polynomial>& gens) {
    std::vector<int> ds;
    for (const auto& g : gens) {
      if (g.is_zero()) throw MathError("zero generator needs an explicit degree");
      ds.push_back(g.degree());
    }
    return ds;
  }

  std::vector<Polynomial> gens_;
  std::vector<int> degrees_;
};

/// Graded colength data of R/J.
struct ColengthRecord {
  std::uint64_t p = 0;
  int n = 0;
  std::int64_t q = 1;
  std::vector<std::int64_t> dims;  // dim (R/J)_m for m = 0, 1, ..., first zero
  std::int64_t total = 0;
  Rational normalized = 0;  // total / q^{krull_dim}

  friend bool operator==(const ColengthRecord&, const ColengthRecord&) = default;
};

struct ColengthOptions {
  /// Largest matrix row or column count allowed; 0 means unlimited.
  std::size_t max_matrix_dim = 0;
};

/// Returns n with p^n == q, or throws.
inline int frobenius_exponent(std::uint64_t p, std::int64_t q) {
  if (q < 1) throw MathError("Frobenius power " + std::to_string(q) + " must be positive");
  int n = 0;
  std::int64_t v = q;
  while (v % static_cast<std::int64_t>(p) == 0) {
    v /= static_cast<std::int64_t>(p);
    ++n;
  }
  if (v != 1) throw MathError(std::to_string(q) + " is not a power of the characteristic " + std::to_string(p));
  return n;
}

/// I^{[q]} = (g_1^q, ..., g_s^q), via n applications of the p-th power map.
inline IdealSpec frobenius_power(const HypersurfaceRing& ring, const IdealSpec& ideal, std::int64_t q) {
  const int n = frobenius_exponent(ring.characteristic(), q);
  std::vector<Polynomial> gens;
  std::vector<int> degrees;
  for (std::size_t i = 0; i < ideal.size(); ++i) {
    Polynomial g = ideal.generators()[i];
    for (int k = 0; k < n; ++k) g = g.frobenius();
    gens.push_back(std::move(g));
    degrees.push_back(static_cast<int>(ideal.degrees()[i] * q));
  }
  return IdealSpec(std::move(gens), std::move(degrees));
}

namespace detail {

inline std::size_t map_columns(const HypersurfaceRing& ring, const std::vector<int>& degrees, int m) {
  std::int64_t cols = 0;
  for (int e : degrees) cols += hilbert_dim(ring, m - e);
  return static_cast<std::size_t>(cols);
}

inline void check_size(const HypersurfaceRing& ring, const std::vector<int>& degrees, int m, const ColengthOptions& opts) {
  if (opts.max_matrix_dim == 0) return;
  const auto rows = static_cast<std::size_t>(hilbert_dim(ring, m));
  const auto cols = map_columns(ring, degrees, m);
  if (std::max(rows, cols) > opts.max_matrix_dim)
    throw InfeasibleError("degree " + std::to_string(m) + " needs a " + std::to_string(rows) + "x" + std::to_string(cols) +
                          " matrix, above the cap of " + std::to_string(opts.max_matrix_dim));
}

inline std::size_t map_rank(const HypersurfaceRing& ring, const IdealSpec& ideal, int m, NormalFormCache& cache,
                            const ColengthOptions& opts) {
  check_size(ring, ideal.degrees(), m, opts);
  return rank_mod_p(graded_map_matrix(ring, ideal.graded(), m, cache));
}

}  // namespace detail

/// dim (R/J)_m = dim R_m - rank of (+) R_{m-e_i} -> R_m.
inline std::int64_t quotient_piece_dim(const HypersurfaceRing& ring, const IdealSpec& ideal, int m, NormalFormCache& cache,
                                       const ColengthOptions& opts = {}) {
  if (m < 0) return 0;
  return hilbert_dim(ring, m) - static_cast<std::int64_t>(detail::map_rank(ring, ideal, m, cache, opts));
}

inline std::int64_t quotient_piece_dim(const HypersurfaceRing& ring, const IdealSpec& ideal, int m) {
  NormalFormCache cache(ring);
  return quotient_piece_dim(ring, ideal, m, cache);
}

/// Same ideal with generators replaced by their normal forms, so matrix
/// assembly over many degrees does not repeat the division.
inline IdealSpec reduced_generators(const HypersurfaceRing& ring, const IdealSpec& ideal) {
  std::vector<Polynomial> gens;
  for (const auto& g : ideal.generators()) gens.push_back(normal_form(ring, g));
  return IdealSpec(std::move(gens), ideal.degrees());
}

/// Degree past which a primary quotient must have vanished.
inline int colength_degree_cap(const HypersurfaceRing& ring, const IdealSpec& ideal) {
  return ideal.degree_sum() + ring.relation_degree() + 1;
}

/// Largest row or column count the colength loop can meet. When the
/// generators form a system of parameters the quotient vanishes past
/// sum(e_i - 1), so the scan stops there (or at the cap, if lower).
inline std::size_t estimate_max_matrix_dim(const HypersurfaceRing& ring, const IdealSpec& ideal) {
  int top = 1;
  for (int e : ideal.degrees()) top += e - 1;
  top = std::min(top, colength_degree_cap(ring, ideal));
  std::size_t best = 0;
  for (int m = 0; m <= top; ++m) {
    best = std::max(best, static_cast<std::size_t>(hilbert_dim(ring, m)));
    best = std::max(best, detail::map_columns(ring, ideal.degrees(), m));
  }
  return best;
}

/// l(R/J) by summing graded pieces up to the first zero one. The record is
/// labelled with n = 0, q = 1; see frobenius_colength for Frobenius powers.
inline ColengthRecord colength(const HypersurfaceRing& ring, const IdealSpec& ideal, const ColengthOptions& opts = {}) {
  ColengthRecord rec;
  rec.p = ring.characteristic();
  NormalFormCache cache(ring);
  const int cap = colength_degree_cap(ring, ideal);
  const IdealSpec work = reduced_generators(ring, ideal);
  for (int m = 0;; ++m) {
    if (m > cap) throw MathError("not primary: no vanishing graded piece up to degree " + std::to_string(cap));
    std::int64_t dim = quotient_piece_dim(ring, work, m, cache, opts);
    rec.dims.push_back(dim);
    rec.total += dim;
    if (dim == 0) break;
  }
  rec.normalized = rec.total;
  return rec;
}

/// Relabels a record with scale N: normalized = total / N^{krull_dim}.
inline ColengthRecord with_scale(ColengthRecord rec, const HypersurfaceRing& ring, int n, std::int64_t q) {
  rec.n = n;
  rec.q = q;
  rec.normalized = Rational(BigInt(rec.total), boost::multiprecision::pow(BigInt(q), static_cast<unsigned>(ring.krull_dim())));
  return rec;
}

/// l(R/I^{[p^n]}) with normalization by (p^n)^{krull_dim}.
inline ColengthRecord frobenius_colength(const HypersurfaceRing& ring, const IdealSpec& ideal, int n,
                                         const ColengthOptions& opts = {}) {
  if (n < 0) throw MathError("Frobenius exponent must be nonnegative");
  std::int64_t q = 1;
  for (int i = 0; i < n; ++i) q *= ring.characteristic();
  return with_scale(colength(ring, frobenius_power(ring, ideal, q), opts), ring, n, q);
}

/// dim of the degree-m syzygies of (g_1, ..., g_k): the kernel of the graded map.
inline std::int64_t syzygy_h0_of(const HypersurfaceRing& ring, const IdealSpec& ideal, int m, NormalFormCache& cache,
                                 const ColengthOptions& opts = {}) {
  if (m < 0) return 0;
  const auto cols = static_cast<std::int64_t>(detail::map_columns(ring, ideal.degrees(), m));
  if (cols == 0) return 0;
  return cols - static_cast<std::int64_t>(detail::map_rank(ring, ideal, m, cache, opts));
}

/// h^0(S^q(m)) = sum_i dim R_{m - q d_i} - rank, for the Frobenius power I^{[q]}.
inline std::int64_t syzygy_h0(const HypersurfaceRing& ring, const IdealSpec& ideal, std::int64_t q, int m) {
  NormalFormCache cache(ring);
  return syzygy_h0_of(ring, frobenius_power(ring, ideal, q), m, cache);
}

}  // namespace hklab
