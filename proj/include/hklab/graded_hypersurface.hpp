#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hklab/fp_linalg.hpp"
#include "hklab/polynomial.hpp"

namespace hklab {

/// Exact binomial coefficient; zero when top < 0 or bottom outside [0, top].
inline std::int64_t binomial(std::int64_t top, std::int64_t bottom) {
  if (top < 0 || bottom < 0 || bottom > top) return 0;
  bottom = std::min(bottom, top - bottom);
  unsigned __int128 acc = 1;
  for (std::int64_t i = 1; i <= bottom; ++i) {
    acc = acc * static_cast<unsigned __int128>(top - bottom + i) / static_cast<unsigned __int128>(i);
    if (acc > static_cast<unsigned __int128>(std::numeric_limits<std::int64_t>::max()))
      throw MathError("binomial coefficient overflows 64 bits");
  }
  return static_cast<std::int64_t>(acc);
}

namespace detail {

// Descending grevlex within one degree: the last exponent runs upward and the
// prefix on variables [0, len) is enumerated the same way. Vectors rejected by
// `keep` are never materialized as Monomials.
template <class Keep>
void grevlex_descending(std::vector<int>& e, std::size_t len, int left, std::vector<Monomial>& out, const Keep& keep) {
  if (len == 1) {
    e[0] = left;
    if (keep(e)) out.emplace_back(e);
    return;
  }
  for (int k = 0; k <= left; ++k) {
    e[len - 1] = k;
    grevlex_descending(e, len - 1, left - k, out, keep);
  }
  e[len - 1] = 0;
}

template <class Keep>
std::vector<Monomial> monomials_of_degree_if(std::size_t nvars, int m, const Keep& keep) {
  std::vector<Monomial> out;
  if (m < 0 || nvars == 0) return out;
  std::vector<int> e(nvars, 0);
  grevlex_descending(e, nvars, m, out, keep);
  return out;
}

}  // namespace detail

/// All monomials of degree m, in descending grevlex order.
inline std::vector<Monomial> monomials_of_degree(std::size_t nvars, int m) {
  return detail::monomials_of_degree_if(nvars, m, [](const std::vector<int>&) { return true; });
}

/// R = F_p[x_1..x_s]/(f) with f homogeneous of degree d >= 1, graded
/// reverse lexicographic order. {f} is a Groebner basis of (f), so a
/// monomial is standard iff it is not divisible by LT(f).
class HypersurfaceRing {
 public:
  HypersurfaceRing(Polynomial relation) : f_(std::move(relation)) {
    if (f_.is_zero()) throw MathError("defining relation must be nonzero");
    if (!f_.is_homogeneous()) throw MathError("defining relation must be homogeneous");
    if (f_.degree() < 1) throw MathError("defining relation must have degree at least 1");
    lead_ = f_.leading_monomial();
    lead_inv_ = f_.field().inv(f_.leading_coefficient());
  }

  const PrimeField& field() const noexcept { return f_.field(); }
  Residue characteristic() const noexcept { return f_.field().characteristic(); }
  std::size_t nvars() const noexcept { return f_.nvars(); }
  int relation_degree() const { return f_.degree(); }
  int krull_dim() const noexcept { return static_cast<int>(nvars()) - 1; }
  const Polynomial& relation() const noexcept { return f_; }
  const Monomial& leading_monomial() const noexcept { return lead_; }
  Residue leading_coefficient_inverse() const noexcept { return lead_inv_; }

  bool is_standard(const Monomial& m) const { return !m.divisible_by(lead_); }

  Polynomial zero() const { return Polynomial(field(), nvars()); }
  Polynomial variable(std::size_t i) const { return Polynomial(field(), Monomial::variable(nvars(), i)); }
  Polynomial parse(std::string_view text) const { return parse_polynomial(text, field(), nvars()); }

  /// "p=..;s=..;f=.." with f in canonical term order.
  std::string canonical() const {
    return "p=" + std::to_string(characteristic()) + ";s=" + std::to_string(nvars()) + ";f=" + to_string(f_);
  }

  /// F_p[x_1..x_s]/(x_1^{d_1}+...+x_s^{d_s}).
  static HypersurfaceRing diagonal(std::uint64_t p, const std::vector<int>& exponents) {
    PrimeField field(p);
    Polynomial f(field, exponents.size());
    for (std::size_t i = 0; i < exponents.size(); ++i) {
      if (exponents[i] < 1) throw MathError("diagonal exponents must be positive");
      f.add_term(Monomial::variable(exponents.size(), i, exponents[i]), 1);
    }
    return HypersurfaceRing(std::move(f));
  }
  static HypersurfaceRing fermat(std::uint64_t p, std::size_t nvars, int degree) {
    return diagonal(p, std::vector<int>(nvars, degree));
  }
  /// The polynomial ring in s variables, modelled as F_p[x_1..x_s, t]/(t).
  static HypersurfaceRing polynomial_ring(std::uint64_t p, std::size_t nvars) {
    PrimeField field(p);
    return HypersurfaceRing(Polynomial(field, Monomial::variable(nvars + 1, nvars)));
  }

 private:
  Polynomial f_;
  Monomial lead_;
  Residue lead_inv_ = 1;
};

/// dim_F R_m = C(m+s-1, s-1) - C(m-d+s-1, s-1); zero for m < 0.
inline std::int64_t hilbert_dim(const HypersurfaceRing& ring, int m) {
  if (m < 0) return 0;
  const std::int64_t s = static_cast<std::int64_t>(ring.nvars());
  const std::int64_t d = ring.relation_degree();
  return binomial(m + s - 1, s - 1) - binomial(m - d + s - 1, s - 1);
}

/// Standard monomials of degree m, descending grevlex.
inline std::vector<Monomial> monomial_basis(const HypersurfaceRing& ring, int m) {
  const Monomial& lt = ring.leading_monomial();
  return detail::monomials_of_degree_if(ring.nvars(), m, [&](const std::vector<int>& e) {
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] < lt[i]) return true;
    return false;
  });
}

/// Division by the principal relation.
inline Polynomial normal_form(const HypersurfaceRing& ring, const Polynomial& g) {
  const PrimeField& field = ring.field();
  Polynomial remainder = ring.zero();
  Polynomial work = g;
  while (!work.is_zero()) {
    Monomial m = work.leading_monomial();
    Residue c = work.leading_coefficient();
    if (ring.is_standard(m)) {
      remainder.add_term(m, c);
      work.add_term(m, field.neg(c));
      continue;
    }
    const Residue scale = field.mul(c, ring.leading_coefficient_inverse());
    Monomial shift = m.quotient(ring.leading_monomial());
    for (const auto& [t, ct] : ring.relation().terms()) work.add_term(t * shift, field.neg(field.mul(scale, ct)));
  }
  return remainder;
}

/// Memoized normal forms of monomials, for assembling many matrices over one
/// ring. Not thread-safe; use one instance per thread.
class NormalFormCache {
 public:
  explicit NormalFormCache(const HypersurfaceRing& ring) : ring_(ring) {}

  const HypersurfaceRing& ring() const noexcept { return ring_; }

  const Polynomial& of(const Monomial& u) {
    if (auto it = memo_.find(u); it != memo_.end()) return it->second;
    Polynomial result = ring_.zero();
    if (ring_.is_standard(u)) {
      result.add_term(u, 1);
    } else {
      const PrimeField& field = ring_.field();
      Monomial shift = u.quotient(ring_.leading_monomial());
      const Residue minus_inv = field.neg(ring_.leading_coefficient_inverse());
      for (const auto& [t, ct] : ring_.relation().terms()) {
        if (t == ring_.leading_monomial()) continue;
        const Polynomial& sub = of(t * shift);
        Residue scale = field.mul(minus_inv, ct);
        for (const auto& [w, cw] : sub.terms()) result.add_term(w, field.mul(scale, cw));
      }
    }
    return memo_.emplace(u, std::move(result)).first->second;
  }

  std::size_t size() const noexcept { return memo_.size(); }

 private:
  const HypersurfaceRing& ring_;
  std::unordered_map<Monomial, Polynomial, MonomialHash> memo_;
};

/// A homogeneous element together with its declared degree.
struct GradedElement {
  Polynomial element;
  int degree;
};

/// Matrix of v_i -> sum g_i v_i from (+)_i R_{m-e_i} to R_m. Columns follow
/// the generators in order, each block indexed by monomial_basis(R, m-e_i);
/// rows follow monomial_basis(R, m).
inline PrimeFieldMatrix graded_map_matrix(const HypersurfaceRing& ring, const std::vector<GradedElement>& gens, int m,
                                          NormalFormCache& cache) {
  const PrimeField& field = ring.field();
  auto rows = monomial_basis(ring, m);
  std::unordered_map<Monomial, std::size_t, MonomialHash> row_index;
  row_index.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) row_index.emplace(rows[i], i);

  std::vector<std::vector<Monomial>> blocks;
  std::size_t ncols = 0;
  for (const auto& g : gens) {
    if (!g.element.is_homogeneous() || (!g.element.is_zero() && g.element.degree() != g.degree))
      throw MathError("generator is not homogeneous of its declared degree");
    blocks.push_back(monomial_basis(ring, m - g.degree));
    ncols += blocks.back().size();
  }

  PrimeFieldMatrix mat(field, rows.size(), ncols);
  std::size_t col = 0;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    Polynomial reduced = normal_form(ring, gens[i].element);
    for (const Monomial& u : blocks[i]) {
      for (const auto& [t, ct] : reduced.terms()) {
        for (const auto& [w, cw] : cache.of(t * u).terms()) mat.accumulate(row_index.at(w), col, field.mul(ct, cw));
      }
      ++col;
    }
  }
  return mat;
}

inline PrimeFieldMatrix graded_map_matrix(const HypersurfaceRing& ring, const std::vector<GradedElement>& gens, int m) {
  NormalFormCache cache(ring);
  return graded_map_matrix(ring, gens, m, cache);
}

/// Ring descriptions:
///   fermat:s=3,d=4,p=7
///   diagonal:d=2/2/2,p=5
///   poly:p=7,s=3,f=x^4+y^4+z^4
///   buchweitz-chen:p=5          (x1+x2+x3 in three variables)
inline HypersurfaceRing parse_ring(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ParseError("ring description needs 'kind:key=value,...': " + std::string(text));
  std::string kind(text.substr(0, colon));
  std::map<std::string, std::string> kv;
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    auto comma = rest.find(',');
    std::string_view item = rest.substr(0, comma);
    auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value in ring description: " + std::string(item));
    kv[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  auto need = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError("ring description '" + std::string(text) + "' lacks " + key);
    return it->second;
  };
  auto need_int = [&](const std::string& key) -> std::int64_t {
    const std::string& v = need(key);
    try {
      std::size_t used = 0;
      auto value = std::stoll(v, &used);
      if (used != v.size()) throw ParseError("");
      return value;
    } catch (const std::exception&) {
      throw ParseError("ring description key " + key + " is not an integer: " + v);
    }
  };
  auto prime = [&]() -> std::uint64_t {
    auto p = need_int("p");
    if (p < 2 || !is_prime(static_cast<std::uint64_t>(p))) throw ParseError("p=" + std::to_string(p) + " is not prime");
    return static_cast<std::uint64_t>(p);
  };

  if (kind == "fermat") {
    auto s = need_int("s");
    auto d = need_int("d");
    if (s < 1 || d < 1) throw ParseError("fermat ring needs s >= 1, d >= 1");
    return HypersurfaceRing::fermat(prime(), static_cast<std::size_t>(s), static_cast<int>(d));
  }
  if (kind == "diagonal") {
    std::vector<int> ds;
    std::string list = need("d");
    std::size_t start = 0;
    while (start <= list.size()) {
      auto slash = list.find('/', start);
      std::string piece = list.substr(start, slash == std::string::npos ? std::string::npos : slash - start);
      try {
        ds.push_back(std::stoi(piece));
      } catch (const std::exception&) {
        throw ParseError("bad diagonal exponent list: " + list);
      }
      if (ds.back() < 1) throw ParseError("diagonal exponents must be positive");
      if (slash == std::string::npos) break;
      start = slash + 1;
    }
    return HypersurfaceRing::diagonal(prime(), ds);
  }
  if (kind == "poly") {
    auto s = need_int("s");
    if (s < 1) throw ParseError("poly ring needs s >= 1");
    PrimeField field(prime());
    return HypersurfaceRing(parse_polynomial(need("f"), field, static_cast<std::size_t>(s)));
  }
  if (kind == "buchweitz-chen" || kind == "bc") {
    return HypersurfaceRing::diagonal(prime(), {1, 1, 1});
  }
  throw ParseError("unknown ring kind '" + kind + "'");
}

}  // namespace hklab
