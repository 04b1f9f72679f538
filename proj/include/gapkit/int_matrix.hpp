#pragma once

// Exact small dense integer matrices (64-bit entries, 128-bit checked
// intermediates) plus matrices over a prime field. Orders stay tiny (the
// callers use d <= 8 or so), so cofactor expansions and O(n^5) modular
// adjugates are perfectly adequate.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gapkit/errors.hpp"
#include "gapkit/fp.hpp"
#include "gapkit/int_math.hpp"
#include "gapkit/int_poly.hpp"

namespace gapkit {

// ---------------------------------------------------------------------------
// Matrices over F_p
// ---------------------------------------------------------------------------

class FpMat {
 public:
  // The modulus is taken on trust here; primality is validated once at the
  // field/instance boundary, not per matrix.
  FpMat(size_t n, u64 p) : n_(n), p_(p), v_(n * n, 0) {
    if (n == 0) throw InvalidArgumentError("matrix order must be positive");
    if (p < 2) throw InvalidArgumentError("modulus must be at least 2");
  }

  static FpMat identity(size_t n, u64 p) {
    FpMat m(n, p);
    for (size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  size_t order() const { return n_; }
  u64 modulus() const { return p_; }

  u64& at(size_t i, size_t j) { return v_[i * n_ + j]; }
  u64 at(size_t i, size_t j) const { return v_[i * n_ + j]; }
  const std::vector<u64>& data() const { return v_; }

  bool is_zero() const {
    for (u64 x : v_)
      if (x != 0) return false;
    return true;
  }

  bool is_scalar() const {
    for (size_t i = 0; i < n_; ++i)
      for (size_t j = 0; j < n_; ++j)
        if (at(i, j) != (i == j ? at(0, 0) : 0)) return false;
    return true;
  }

  FpMat operator+(const FpMat& o) const {
    check_same(o);
    FpMat r(n_, p_);
    for (size_t k = 0; k < v_.size(); ++k) r.v_[k] = add_mod(v_[k], o.v_[k], p_);
    return r;
  }

  FpMat operator-(const FpMat& o) const {
    check_same(o);
    FpMat r(n_, p_);
    for (size_t k = 0; k < v_.size(); ++k) r.v_[k] = sub_mod(v_[k], o.v_[k], p_);
    return r;
  }

  FpMat operator*(const FpMat& o) const {
    check_same(o);
    FpMat r(n_, p_);
    for (size_t i = 0; i < n_; ++i)
      for (size_t j = 0; j < n_; ++j) {
        u128 acc = 0;  // n_ * (p-1)^2 < 2^125 for n_ <= 8, p < 2^61
        for (size_t k = 0; k < n_; ++k)
          acc += static_cast<u128>(at(i, k)) * o.at(k, j);
        r.at(i, j) = static_cast<u64>(acc % p_);
      }
    return r;
  }

  FpMat scaled(u64 s) const {
    FpMat r(n_, p_);
    s %= p_;
    for (size_t k = 0; k < v_.size(); ++k) r.v_[k] = mul_mod(v_[k], s, p_);
    return r;
  }

  friend bool operator==(const FpMat& a, const FpMat& b) {
    return a.n_ == b.n_ && a.p_ == b.p_ && a.v_ == b.v_;
  }
  friend bool operator!=(const FpMat& a, const FpMat& b) { return !(a == b); }

  const std::vector<u64>& entries() const { return v_; }

  u64 det() const {
    FpMat w(*this);
    u64 det = 1;
    for (size_t col = 0, row = 0; col < n_ && row < n_; ++col) {
      size_t piv = row;
      while (piv < n_ && w.at(piv, col) == 0) ++piv;
      if (piv == n_) return 0;
      if (piv != row) {
        for (size_t j = 0; j < n_; ++j) std::swap(w.at(piv, j), w.at(row, j));
        det = det == 0 ? 0 : p_ - det;
      }
      u64 d = w.at(row, col);
      det = mul_mod(det, d, p_);
      u64 dinv = inv_mod_u64(d, p_);
      for (size_t i = row + 1; i < n_; ++i) {
        u64 f = mul_mod(w.at(i, col), dinv, p_);
        if (f == 0) continue;
        for (size_t j = col; j < n_; ++j)
          w.at(i, j) = sub_mod(w.at(i, j), mul_mod(f, w.at(row, j), p_), p_);
      }
      ++row;
    }
    return det;
  }

  // Gauss-Jordan inverse; throws NotInvertibleError on singular input.
  FpMat inverse() const {
    FpMat w(*this);
    FpMat inv = identity(n_, p_);
    for (size_t col = 0; col < n_; ++col) {
      size_t piv = col;
      while (piv < n_ && w.at(piv, col) == 0) ++piv;
      if (piv == n_) throw NotInvertibleError("matrix is singular mod p");
      if (piv != col)
        for (size_t j = 0; j < n_; ++j) {
          std::swap(w.at(piv, j), w.at(col, j));
          std::swap(inv.at(piv, j), inv.at(col, j));
        }
      u64 dinv = inv_mod_u64(w.at(col, col), p_);
      for (size_t j = 0; j < n_; ++j) {
        w.at(col, j) = mul_mod(w.at(col, j), dinv, p_);
        inv.at(col, j) = mul_mod(inv.at(col, j), dinv, p_);
      }
      for (size_t i = 0; i < n_; ++i) {
        if (i == col || w.at(i, col) == 0) continue;
        u64 f = w.at(i, col);
        for (size_t j = 0; j < n_; ++j) {
          w.at(i, j) = sub_mod(w.at(i, j), mul_mod(f, w.at(col, j), p_), p_);
          inv.at(i, j) = sub_mod(inv.at(i, j), mul_mod(f, inv.at(col, j), p_), p_);
        }
      }
    }
    return inv;
  }

  bool invertible() const { return det() != 0; }

  // 64-bit fingerprint for hash tables; collisions are resolved by callers
  // with exact comparisons.
  u64 fingerprint() const {
    u64 h = 0x9E3779B97F4A7C15ull ^ (static_cast<u64>(n_) << 32) ^ p_;
    for (u64 x : v_) {
      h ^= x + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
      h *= 0xBF58476D1CE4E5B9ull;
      h ^= h >> 29;
    }
    return h;
  }

  std::string str() const {
    std::string s = "[";
    for (size_t i = 0; i < n_; ++i) {
      s += i == 0 ? "[" : " [";
      for (size_t j = 0; j < n_; ++j)
        s += std::to_string(at(i, j)) + (j + 1 < n_ ? ", " : "");
      s += i + 1 < n_ ? "]\n" : "]";
    }
    return s + "]";
  }

 private:
  void check_same(const FpMat& o) const {
    if (n_ != o.n_ || p_ != o.p_)
      throw InvalidArgumentError("matrix dimension/modulus mismatch");
  }

  size_t n_;
  u64 p_;
  std::vector<u64> v_;
};

// ---------------------------------------------------------------------------
// Exact integer matrices
// ---------------------------------------------------------------------------

class IntMatrix {
 public:
  IntMatrix(size_t n) : n_(n), v_(n * n, 0) {
    if (n == 0) throw InvalidArgumentError("matrix order must be positive");
  }
  IntMatrix(size_t n, std::vector<i64> entries) : n_(n), v_(std::move(entries)) {
    if (n == 0 || v_.size() != n * n)
      throw InvalidArgumentError("entry count does not match matrix order");
  }

  static IntMatrix identity(size_t n) {
    IntMatrix m(n);
    for (size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  size_t order() const { return n_; }
  i64& at(size_t i, size_t j) { return v_[i * n_ + j]; }
  i64 at(size_t i, size_t j) const { return v_[i * n_ + j]; }
  const std::vector<i64>& data() const { return v_; }

  i64 max_abs_entry() const {
    i64 m = 0;
    for (i64 x : v_) m = std::max(m, x < 0 ? -x : x);
    return m;
  }

  IntMatrix operator*(const IntMatrix& o) const {
    if (n_ != o.n_) throw InvalidArgumentError("matrix order mismatch");
    IntMatrix r(n_);
    for (size_t i = 0; i < n_; ++i)
      for (size_t j = 0; j < n_; ++j) {
        i128 acc = 0;
        for (size_t k = 0; k < n_; ++k)
          acc = checked_add128(acc, checked_mul128(at(i, k), o.at(k, j)));
        r.at(i, j) = narrow_i64(acc);
      }
    return r;
  }

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.n_ == b.n_ && a.v_ == b.v_;
  }

  // Exact determinant by cofactor expansion (orders here are tiny).
  i64 det() const { return narrow_i64(det_i128(v_, n_)); }

  // Exact adjugate: adj(A) * A = det(A) * I.
  IntMatrix adjugate() const {
    IntMatrix r(n_);
    if (n_ == 1) {
      r.at(0, 0) = 1;
      return r;
    }
    std::vector<i64> minor((n_ - 1) * (n_ - 1));
    for (size_t i = 0; i < n_; ++i)
      for (size_t j = 0; j < n_; ++j) {
        size_t m = 0;
        for (size_t r2 = 0; r2 < n_; ++r2) {
          if (r2 == i) continue;
          for (size_t c2 = 0; c2 < n_; ++c2) {
            if (c2 == j) continue;
            minor[m++] = at(r2, c2);
          }
        }
        i128 d = det_i128(minor, n_ - 1);
        if ((i + j) & 1) d = -d;
        r.at(j, i) = narrow_i64(d);  // transposed cofactor
      }
    return r;
  }

  // Monic characteristic polynomial det(x*I - A) via the Faddeev-LeVerrier
  // recurrence; all divisions are exact over the integers.
  IntPoly char_poly() const {
    const size_t n = n_;
    std::vector<i128> a(v_.begin(), v_.end());
    std::vector<i128> m(n * n, 0);  // M_0 = 0
    std::vector<i64> c(n + 1, 0);
    c[n] = 1;
    std::vector<i128> am(n * n);
    for (size_t k = 1; k <= n; ++k) {
      // M_k = A*M_{k-1} + c_{n-k+1} * I
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
          i128 acc = 0;
          for (size_t t = 0; t < n; ++t)
            acc = checked_add128(acc, checked_mul128(a[i * n + t], m[t * n + j]));
          am[i * n + j] = acc;
        }
      for (size_t i = 0; i < n; ++i)
        am[i * n + i] = checked_add128(am[i * n + i], static_cast<i128>(c[n - k + 1]));
      m.swap(am);
      // c_{n-k} = -trace(A*M_k) / k
      i128 tr = 0;
      for (size_t i = 0; i < n; ++i) {
        i128 acc = 0;
        for (size_t t = 0; t < n; ++t)
          acc = checked_add128(acc, checked_mul128(a[i * n + t], m[t * n + i]));
        tr = checked_add128(tr, acc);
      }
      c[n - k] = narrow_i64(-tr / static_cast<i128>(k));
    }
    return IntPoly(std::move(c));
  }

  FpMat reduce_mod(u64 p) const {
    FpMat r(n_, p);
    for (size_t i = 0; i < n_; ++i)
      for (size_t j = 0; j < n_; ++j) r.at(i, j) = mod_i64(at(i, j), p);
    return r;
  }

  std::string str() const {
    std::string s = "[";
    for (size_t i = 0; i < n_; ++i) {
      s += i == 0 ? "[" : " [";
      for (size_t j = 0; j < n_; ++j)
        s += std::to_string(at(i, j)) + (j + 1 < n_ ? ", " : "");
      s += i + 1 < n_ ? "]\n" : "]";
    }
    return s + "]";
  }

 private:
  static i128 det_i128(const std::vector<i64>& m, size_t n) {
    std::vector<i128> w(m.begin(), m.end());
    return det_rec(w, n);
  }

  static i128 det_rec(const std::vector<i128>& m, size_t n) {
    if (n == 1) return m[0];
    if (n == 2)
      return checked_add128(checked_mul128(m[0], m[3]),
                              -checked_mul128(m[1], m[2]));
    i128 acc = 0;
    std::vector<i128> minor((n - 1) * (n - 1));
    for (size_t j = 0; j < n; ++j) {
      if (m[j] == 0) continue;
      size_t t = 0;
      for (size_t r = 1; r < n; ++r)
        for (size_t c = 0; c < n; ++c)
          if (c != j) minor[t++] = m[r * n + c];
      i128 term = checked_mul128(m[j], det_rec(minor, n - 1));
      acc = checked_add128(acc, (j & 1) ? -term : term);
    }
    return acc;
  }

  size_t n_;
  std::vector<i64> v_;
};

// Determinant and adjugate of an integer matrix reduced mod p, computed
// entirely in the field (no intermediate blow-up, works for singular input).
inline std::pair<Fp, FpMat> det_adjugate_mod(const IntMatrix& m, u64 p) {
  const size_t n = m.order();
  FpMat red = m.reduce_mod(p);
  FpMat adj(n, p);
  if (n == 1) {
    adj.at(0, 0) = 1;
    return {Fp(red.det(), p), adj};
  }
  FpMat minor(n - 1, p);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      size_t t = 0;
      for (size_t r = 0; r < n; ++r) {
        if (r == i) continue;
        for (size_t c = 0; c < n; ++c) {
          if (c == j) continue;
          minor.at(t / (n - 1), t % (n - 1)) = red.at(r, c);
          ++t;
        }
      }
      u64 d = minor.det();
      if ((i + j) & 1) d = d == 0 ? 0 : p - d;
      adj.at(j, i) = d;
    }
  return {Fp(red.det(), p), adj};
}

// d! * C^d, the height bound for the aggregated relation coefficients.
inline u64 relation_height_bound(size_t d, i64 entry_bound) {
  if (entry_bound < 0) throw InvalidArgumentError("entry bound must be nonnegative");
  u128 b = 1;
  for (size_t k = 2; k <= d; ++k) b = checked_mul_u128(b, static_cast<u128>(k));
  for (size_t k = 0; k < d; ++k) b = checked_mul_u128(b, static_cast<u128>(entry_bound));
  if (b > static_cast<u128>(UINT64_MAX)) throw OverflowError("relation height bound exceeds 64 bits");
  return static_cast<u64>(b);
}

// ---------------------------------------------------------------------------
// Row reduction over F_p with row bookkeeping
// ---------------------------------------------------------------------------

// Result of greedily scanning a list of row vectors mod p in input order,
// keeping each row that is independent of the rows kept so far.
struct RowBasis {
  std::vector<size_t> rows;        // indices of the kept (independent) rows
  std::vector<size_t> pivot_cols;  // pivot column of each kept row
  std::optional<size_t> first_dependent;  // first row that reduced to zero
};

// rows[i] has entries already reduced into [0, p).
inline RowBasis greedy_row_basis(const std::vector<std::vector<u64>>& rows, u64 p) {
  RowBasis out;
  std::vector<std::vector<u64>> basis;  // reduced rows, basis[k] pivots at out.pivot_cols[k]
  const size_t width = rows.empty() ? 0 : rows[0].size();
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) throw InvalidArgumentError("ragged row list");
    std::vector<u64> cur = rows[r];
    for (size_t b = 0; b < basis.size(); ++b) {
      u64 f = cur[out.pivot_cols[b]];
      if (f == 0) continue;
      for (size_t j = 0; j < width; ++j)
        cur[j] = sub_mod(cur[j], mul_mod(f, basis[b][j], p), p);
    }
    size_t piv = 0;
    while (piv < width && cur[piv] == 0) ++piv;
    if (piv == width) {
      if (!out.first_dependent) out.first_dependent = r;
      continue;
    }
    u64 inv = inv_mod_u64(cur[piv], p);
    for (size_t j = 0; j < width; ++j) cur[j] = mul_mod(cur[j], inv, p);
    out.rows.push_back(r);
    out.pivot_cols.push_back(piv);
    basis.push_back(std::move(cur));
  }
  return out;
}

}  // namespace gapkit
