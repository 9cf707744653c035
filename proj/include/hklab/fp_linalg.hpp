#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hklab {

/// Residue in [0, p). Stored as 32 bits; every product is formed in 64 bits
/// and reduced immediately, so no accumulation can overflow regardless of
/// matrix dimension. This bounds p below 2^32.
using Residue = std::uint32_t;

class MathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::uint64_t mul_mod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t pow_mod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1U) result = mul_mod_u64(result, base, m);
    base = mul_mod_u64(base, base, m);
    exp >>= 1U;
  }
  return result;
}

}  // namespace detail

/// Deterministic Miller-Rabin for 64-bit inputs (witness set valid below 3.3e24).
inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t small : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % small == 0) return n == small;
  }
  std::uint64_t d = n - 1;
  int twos = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++twos;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = detail::pow_mod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < twos; ++r) {
      x = detail::mul_mod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

inline std::uint64_t next_prime(std::uint64_t n) {
  std::uint64_t candidate = n + 1;
  while (!is_prime(candidate)) ++candidate;
  return candidate;
}

/// The prime field Z/pZ.
class PrimeField {
 public:
  explicit PrimeField(std::uint64_t p) : p_(static_cast<Residue>(p)) {
    if (p >= (1ULL << 32U)) throw MathError("modulus " + std::to_string(p) + " exceeds 32 bits");
    if (!is_prime(p)) throw MathError("modulus " + std::to_string(p) + " is not prime");
  }

  Residue characteristic() const noexcept { return p_; }

  Residue reduce(std::int64_t v) const noexcept {
    std::int64_t r = v % static_cast<std::int64_t>(p_);
    return static_cast<Residue>(r < 0 ? r + p_ : r);
  }
  Residue add(Residue a, Residue b) const noexcept {
    std::uint64_t s = std::uint64_t{a} + b;
    return static_cast<Residue>(s >= p_ ? s - p_ : s);
  }
  Residue sub(Residue a, Residue b) const noexcept { return a >= b ? a - b : static_cast<Residue>(std::uint64_t{a} + p_ - b); }
  Residue neg(Residue a) const noexcept { return a == 0 ? 0 : p_ - a; }
  Residue mul(Residue a, Residue b) const noexcept {
    return static_cast<Residue>(std::uint64_t{a} * b % p_);
  }
  Residue pow(Residue a, std::uint64_t e) const noexcept {
    return static_cast<Residue>(detail::pow_mod_u64(a, e, p_));
  }

  /// Inverse via the extended Euclidean algorithm; a must be nonzero.
  Residue inv(Residue a) const {
    if (a % p_ == 0) throw MathError("inverse of zero mod " + std::to_string(p_));
    std::int64_t r0 = p_, r1 = a % p_;
    std::int64_t t0 = 0, t1 = 1;
    while (r1 != 0) {
      std::int64_t quot = r0 / r1;
      std::tie(r0, r1) = std::pair{r1, r0 - quot * r1};
      std::tie(t0, t1) = std::pair{t1, t0 - quot * t1};
    }
    return reduce(t0);
  }

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  Residue p_;
};

/// Dense row-major matrix over Z/pZ.
class PrimeFieldMatrix {
 public:
  PrimeFieldMatrix(PrimeField field, std::size_t rows, std::size_t cols)
      : field_(field), rows_(rows), cols_(cols), entries_(rows * cols, 0) {}

  PrimeFieldMatrix(PrimeField field, std::size_t rows, std::size_t cols, std::vector<Residue> entries)
      : field_(field), rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) throw MathError("matrix entry count does not match shape");
    for (Residue& e : entries_) e %= field_.characteristic();
  }

  const PrimeField& field() const noexcept { return field_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Residue operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, Residue v) { entries_[r * cols_ + c] = v % field_.characteristic(); }
  void accumulate(std::size_t r, std::size_t c, Residue v) {
    Residue& e = entries_[r * cols_ + c];
    e = field_.add(e, v % field_.characteristic());
  }

  std::span<const Residue> row(std::size_t r) const { return {entries_.data() + r * cols_, cols_}; }

  PrimeFieldMatrix transposed() const {
    PrimeFieldMatrix t(field_, cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t.entries_[c * rows_ + r] = entries_[r * cols_ + c];
    return t;
  }

  static PrimeFieldMatrix identity(PrimeField field, std::size_t n) {
    PrimeFieldMatrix m(field, n, n);
    for (std::size_t i = 0; i < n; ++i) m.entries_[i * n + i] = 1 % field.characteristic();
    return m;
  }

 private:
  PrimeField field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Residue> entries_;
};

namespace detail {

/// Gaussian elimination on a packed dense block; returns its rank.
inline std::size_t dense_rank(const PrimeField& field, std::vector<Residue>& a, std::size_t rows, std::size_t cols) {
  const std::uint64_t p = field.characteristic();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && a[pivot * cols + c] == 0) ++pivot;
    if (pivot == rows) continue;
    if (pivot != rank) std::swap_ranges(a.begin() + pivot * cols, a.begin() + (pivot + 1) * cols, a.begin() + rank * cols);
    Residue* prow = a.data() + rank * cols;
    const Residue scale = field.inv(prow[c]);
    for (std::size_t j = c; j < cols; ++j) prow[j] = field.mul(prow[j], scale);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      Residue* row = a.data() + r * cols;
      const Residue factor = row[c];
      if (factor == 0) continue;
      const std::uint64_t negf = p - factor;
      for (std::size_t j = c; j < cols; ++j) {
        if (prow[j] != 0) row[j] = static_cast<Residue>((row[j] + negf * prow[j]) % p);
      }
    }
    ++rank;
  }
  return rank;
}

}  // namespace detail

/// Rank over Z/pZ.
///
/// Singleton rows and columns are peeled off first: a column with a single
/// nonzero entry on the live rows is a pivot for that row (and vice versa),
/// contributing exactly one to the rank. Monomial generators make most
/// columns of graded multiplication maps singletons, so the dense residue
/// left for elimination is usually small.
inline std::size_t rank_mod_p(const PrimeFieldMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  if (rows == 0 || cols == 0) return 0;

  std::vector<std::vector<std::size_t>> row_nz(rows), col_nz(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = m.row(r);
    for (std::size_t c = 0; c < cols; ++c) {
      if (row[c] != 0) {
        row_nz[r].push_back(c);
        col_nz[c].push_back(r);
      }
    }
  }
  std::vector<char> row_live(rows, 1), col_live(cols, 1);
  std::vector<std::size_t> row_count(rows), col_count(cols);
  for (std::size_t r = 0; r < rows; ++r) row_count[r] = row_nz[r].size();
  for (std::size_t c = 0; c < cols; ++c) col_count[c] = col_nz[c].size();

  std::size_t rank = 0;
  std::vector<std::size_t> col_queue, row_queue;
  for (std::size_t c = 0; c < cols; ++c)
    if (col_count[c] == 1) col_queue.push_back(c);
  for (std::size_t r = 0; r < rows; ++r)
    if (row_count[r] == 1) row_queue.push_back(r);

  auto kill_row = [&](std::size_t r) {
    row_live[r] = 0;
    for (std::size_t c : row_nz[r]) {
      if (!col_live[c]) continue;
      if (--col_count[c] == 1) col_queue.push_back(c);
    }
  };
  auto kill_col = [&](std::size_t c) {
    col_live[c] = 0;
    for (std::size_t r : col_nz[c]) {
      if (!row_live[r]) continue;
      if (--row_count[r] == 1) row_queue.push_back(r);
    }
  };

  while (!col_queue.empty() || !row_queue.empty()) {
    if (!col_queue.empty()) {
      std::size_t c = col_queue.back();
      col_queue.pop_back();
      if (!col_live[c] || col_count[c] != 1) continue;
      auto it = std::find_if(col_nz[c].begin(), col_nz[c].end(), [&](std::size_t r) { return row_live[r] != 0; });
      std::size_t r = *it;
      ++rank;
      kill_col(c);
      kill_row(r);
    } else {
      std::size_t r = row_queue.back();
      row_queue.pop_back();
      if (!row_live[r] || row_count[r] != 1) continue;
      auto it = std::find_if(row_nz[r].begin(), row_nz[r].end(), [&](std::size_t c) { return col_live[c] != 0; });
      std::size_t c = *it;
      ++rank;
      kill_row(r);
      kill_col(c);
    }
  }

  std::vector<std::size_t> live_rows, live_cols;
  for (std::size_t r = 0; r < rows; ++r)
    if (row_live[r] && row_count[r] > 0) live_rows.push_back(r);
  for (std::size_t c = 0; c < cols; ++c)
    if (col_live[c] && col_count[c] > 0) live_cols.push_back(c);
  if (live_rows.empty() || live_cols.empty()) return rank;

  std::vector<Residue> block(live_rows.size() * live_cols.size());
  for (std::size_t i = 0; i < live_rows.size(); ++i) {
    auto row = m.row(live_rows[i]);
    for (std::size_t j = 0; j < live_cols.size(); ++j) block[i * live_cols.size() + j] = row[live_cols[j]];
  }
  return rank + detail::dense_rank(m.field(), block, live_rows.size(), live_cols.size());
}

/// Rank by plain elimination, without the singleton pass. Kept for cross-checks.
inline std::size_t rank_mod_p_dense(const PrimeFieldMatrix& m) {
  std::vector<Residue> block(m.rows() * m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) std::copy(m.row(r).begin(), m.row(r).end(), block.begin() + r * m.cols());
  return detail::dense_rank(m.field(), block, m.rows(), m.cols());
}

inline std::size_t nullity_mod_p(const PrimeFieldMatrix& m) { return m.cols() - rank_mod_p(m); }

}  // namespace hklab
