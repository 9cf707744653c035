#pragma once

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include <boost/container_hash/hash.hpp>

#include "hklab/fp_linalg.hpp"

namespace hklab {

/// Exponent vector x_1^{e_1} ... x_s^{e_s}.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exponents) : exps_(std::move(exponents)) {
    for (int e : exps_)
      if (e < 0) throw MathError("negative exponent in monomial");
  }

  static Monomial one(std::size_t nvars) { return Monomial(std::vector<int>(nvars, 0)); }
  static Monomial variable(std::size_t nvars, std::size_t index, int power = 1) {
    std::vector<int> e(nvars, 0);
    e.at(index) = power;
    return Monomial(std::move(e));
  }

  std::size_t nvars() const noexcept { return exps_.size(); }
  int operator[](std::size_t i) const { return exps_[i]; }
  const std::vector<int>& exponents() const noexcept { return exps_; }
  int degree() const { return std::accumulate(exps_.begin(), exps_.end(), 0); }

  bool divisible_by(const Monomial& d) const {
    for (std::size_t i = 0; i < exps_.size(); ++i)
      if (exps_[i] < d.exps_[i]) return false;
    return true;
  }
  /// Caller guarantees divisibility.
  Monomial quotient(const Monomial& d) const {
    Monomial q = *this;
    for (std::size_t i = 0; i < exps_.size(); ++i) q.exps_[i] -= d.exps_[i];
    return q;
  }
  Monomial scaled(int k) const {
    Monomial r = *this;
    for (int& e : r.exps_) e *= k;
    return r;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial r = a;
    for (std::size_t i = 0; i < r.exps_.size(); ++i) r.exps_[i] += b.exps_[i];
    return r;
  }
  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<int> exps_;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const { return boost::hash_range(m.exponents().begin(), m.exponents().end()); }
};

/// Graded reverse lexicographic order, x_1 > x_2 > ... > x_s.
/// True when a is strictly greater than b.
inline bool grevlex_greater(const Monomial& a, const Monomial& b) {
  int da = a.degree(), db = b.degree();
  if (da != db) return da > db;
  for (std::size_t i = a.nvars(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

struct GrevlexDescending {
  bool operator()(const Monomial& a, const Monomial& b) const { return grevlex_greater(a, b); }
};

/// Sparse polynomial over Z/pZ; terms are kept in descending grevlex order
/// and no stored coefficient is zero.
class Polynomial {
 public:
  using Terms = std::map<Monomial, Residue, GrevlexDescending>;

  Polynomial(PrimeField field, std::size_t nvars) : field_(field), nvars_(nvars) {}
  Polynomial(PrimeField field, const Monomial& m, Residue c = 1) : field_(field), nvars_(m.nvars()) { add_term(m, c); }

  const PrimeField& field() const noexcept { return field_; }
  std::size_t nvars() const noexcept { return nvars_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  const Monomial& leading_monomial() const {
    if (terms_.empty()) throw MathError("leading term of zero polynomial");
    return terms_.begin()->first;
  }
  Residue leading_coefficient() const {
    if (terms_.empty()) throw MathError("leading term of zero polynomial");
    return terms_.begin()->second;
  }

  Residue coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? 0 : it->second;
  }

  void add_term(const Monomial& m, Residue c) {
    if (m.nvars() != nvars_) throw MathError("monomial arity does not match polynomial");
    c %= field_.characteristic();
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second = field_.add(it->second, c);
      if (it->second == 0) terms_.erase(it);
    }
  }

  /// Degree of the leading term; -1 for zero.
  int degree() const { return terms_.empty() ? -1 : terms_.begin()->first.degree(); }

  bool is_homogeneous() const {
    if (terms_.empty()) return true;
    int d = degree();
    for (const auto& [m, c] : terms_)
      if (m.degree() != d) return false;
    return true;
  }

  Polynomial operator+(const Polynomial& o) const {
    Polynomial r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
  }
  Polynomial operator-(const Polynomial& o) const {
    Polynomial r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, field_.neg(c));
    return r;
  }
  Polynomial operator*(const Polynomial& o) const {
    Polynomial r(field_, nvars_);
    for (const auto& [ma, ca] : terms_)
      for (const auto& [mb, cb] : o.terms_) r.add_term(ma * mb, field_.mul(ca, cb));
    return r;
  }
  Polynomial times(const Monomial& m, Residue c = 1) const {
    Polynomial r(field_, nvars_);
    for (const auto& [mt, ct] : terms_) r.terms_.emplace(mt * m, field_.mul(ct, c));
    if (c % field_.characteristic() == 0) r.terms_.clear();
    return r;
  }
  Polynomial pow(unsigned k) const {
    Polynomial result(field_, Monomial::one(nvars_));
    Polynomial base = *this;
    while (k > 0) {
      if (k & 1U) result = result * base;
      k >>= 1U;
      if (k > 0) base = base * base;
    }
    return result;
  }

  /// The p-th power map, which is additive in characteristic p.
  Polynomial frobenius() const {
    const Residue p = field_.characteristic();
    Polynomial r(field_, nvars_);
    for (const auto& [m, c] : terms_) r.add_term(m.scaled(static_cast<int>(p)), field_.pow(c, p));
    return r;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.field_ == b.field_ && a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

 private:
  PrimeField field_;
  std::size_t nvars_;
  Terms terms_;
};

/// Variable names: x,y,z,w for up to four variables, x1..xs otherwise.
inline std::vector<std::string> variable_names(std::size_t nvars) {
  std::vector<std::string> names;
  if (nvars <= 4) {
    const char* small[] = {"x", "y", "z", "w"};
    for (std::size_t i = 0; i < nvars; ++i) names.emplace_back(small[i]);
  } else {
    for (std::size_t i = 0; i < nvars; ++i) names.push_back("x" + std::to_string(i + 1));
  }
  return names;
}

/// Canonical text form, terms in descending grevlex order.
inline std::string to_string(const Polynomial& f) {
  if (f.is_zero()) return "0";
  auto names = variable_names(f.nvars());
  std::string out;
  for (const auto& [m, c] : f.terms()) {
    if (!out.empty()) out += '+';
    bool constant = m.degree() == 0;
    if (c != 1 || constant) out += std::to_string(c);
    bool first = c == 1 && !constant;
    for (std::size_t i = 0; i < m.nvars(); ++i) {
      if (m[i] == 0) continue;
      if (!first) out += '*';
      first = false;
      out += names[i];
      if (m[i] > 1) out += '^' + std::to_string(m[i]);
    }
  }
  return out;
}

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses sums of terms like "3*x^2*y - z^4 + x1^2". Accepts both naming
/// schemes (x,y,z,w and x1..xs) for rings with up to four variables.
inline Polynomial parse_polynomial(std::string_view text, PrimeField field, std::size_t nvars) {
  Polynomial result(field, nvars);
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto read_int = [&]() -> std::int64_t {
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (start == pos) throw ParseError("expected integer at offset " + std::to_string(start) + " in '" + std::string(text) + "'");
    return std::stoll(std::string(text.substr(start, pos - start)));
  };
  auto read_variable = [&]() -> std::size_t {
    char c = text[pos];
    if (c == 'x' && pos + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[pos + 1]))) {
      ++pos;
      auto idx = read_int();
      if (idx < 1 || static_cast<std::size_t>(idx) > nvars) throw ParseError("variable x" + std::to_string(idx) + " out of range");
      return static_cast<std::size_t>(idx - 1);
    }
    const std::string_view small = "xyzw";
    auto idx = small.find(c);
    if (idx == std::string_view::npos || idx >= nvars || nvars > 4)
      throw ParseError(std::string("unknown variable '") + c + "' in '" + std::string(text) + "'");
    ++pos;
    return idx;
  };

  skip_ws();
  if (pos == text.size()) throw ParseError("empty polynomial");
  bool expect_term = true;
  while (pos < text.size()) {
    skip_ws();
    bool negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      negative = text[pos] == '-';
      ++pos;
      skip_ws();
    } else if (!expect_term) {
      throw ParseError("expected '+' or '-' at offset " + std::to_string(pos) + " in '" + std::string(text) + "'");
    }
    expect_term = false;
    std::int64_t coef = 1;
    std::vector<int> exps(nvars, 0);
    bool have_factor = false;
    while (pos < text.size()) {
      skip_ws();
      if (pos >= text.size()) break;
      char c = text[pos];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        coef = (coef * field.reduce(read_int())) % field.characteristic();
      } else if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t v = read_variable();
        int power = 1;
        skip_ws();
        if (pos < text.size() && text[pos] == '^') {
          ++pos;
          skip_ws();
          power = static_cast<int>(read_int());
        }
        exps[v] += power;
      } else {
        throw ParseError(std::string("unexpected character '") + c + "' in '" + std::string(text) + "'");
      }
      have_factor = true;
      skip_ws();
      if (pos < text.size() && text[pos] == '*') {
        ++pos;
        continue;
      }
      if (pos < text.size() && (std::isalpha(static_cast<unsigned char>(text[pos])))) continue;
      break;
    }
    if (!have_factor) throw ParseError("dangling sign in '" + std::string(text) + "'");
    Residue r = field.reduce(coef);
    result.add_term(Monomial(std::move(exps)), negative ? field.neg(r) : r);
  }
  return result;
}

}  // namespace hklab
