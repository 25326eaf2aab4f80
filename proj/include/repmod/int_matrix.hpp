#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <type_traits>
#include <utility>
#include <vector>

#include "repmod/errors.hpp"

namespace repmod {

using Int = boost::multiprecision::cpp_int;

/// Dense integer matrix with arbitrary-precision entries, row-major.
struct IntMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<Int> data;

  IntMatrix() = default;
  IntMatrix(int r, int c) : rows(r), cols(c), data(size_t(r) * size_t(c)) {
    if (r < 0 || c < 0) throw std::invalid_argument("negative matrix dimension");
  }

  Int& at(int i, int j) { return data[size_t(i) * cols + j]; }
  const Int& at(int i, int j) const { return data[size_t(i) * cols + j]; }

  bool empty() const { return rows == 0 || cols == 0; }

  static IntMatrix identity(int n) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  bool operator==(const IntMatrix& o) const {
    return rows == o.rows && cols == o.cols && data == o.data;
  }
};

inline IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matrix product shape mismatch");
  IntMatrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      const Int& aik = a.at(i, k);
      if (aik == 0) continue;
      for (int j = 0; j < b.cols; ++j) out.at(i, j) += aik * b.at(k, j);
    }
  return out;
}

/// Fraction-free (Bareiss) determinant.
inline Int determinant(IntMatrix a) {
  if (a.rows != a.cols) throw std::invalid_argument("determinant of non-square matrix");
  const int n = a.rows;
  if (n == 0) return 1;
  Int prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (a.at(k, k) == 0) {
      int p = -1;
      for (int i = k + 1; i < n; ++i)
        if (a.at(i, k) != 0) { p = i; break; }
      if (p < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(a.at(k, j), a.at(p, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        Int v = a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j);
        a.at(i, j) = v / prev;  // exact by Sylvester's identity
      }
    prev = a.at(k, k);
  }
  return sign > 0 ? a.at(n - 1, n - 1) : Int(-a.at(n - 1, n - 1));
}

/// Smith decomposition A = U * S * V with U, V unimodular and S diagonal,
/// nonnegative, each diagonal entry dividing the next.
struct SnfResult {
  IntMatrix U;
  IntMatrix S;
  IntMatrix V;
};

namespace detail {

struct ArithmeticOverflow {};

template <class T>
inline T checked_add(const T& a, const T& b) {
  if constexpr (std::is_same_v<T, std::int64_t>) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw ArithmeticOverflow{};
    return r;
  } else {
    return a + b;
  }
}

template <class T>
inline T checked_mul(const T& a, const T& b) {
  if constexpr (std::is_same_v<T, std::int64_t>) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticOverflow{};
    return r;
  } else {
    return a * b;
  }
}

template <class T>
inline T abs_of(const T& v) {
  if constexpr (std::is_same_v<T, std::int64_t>) {
    if (v == std::numeric_limits<std::int64_t>::min()) throw ArithmeticOverflow{};
    return v < 0 ? -v : v;
  } else {
    return v < 0 ? T(-v) : v;
  }
}

template <class T>
inline T gcd_of(T a, T b) {
  a = abs_of(a);
  b = abs_of(b);
  while (b != 0) {
    T r = a % b;
    a = b;
    b = r;
  }
  return a;
}

// Smallest-nonzero-absolute-value pivot in the trailing block, lexicographic
// tie-break; returns false when the block is zero.
template <class M>
inline bool find_pivot(const M& s, int rows, int cols, int k, int& pi, int& pj) {
  bool found = false;
  for (int i = k; i < rows; ++i)
    for (int j = k; j < cols; ++j) {
      if (s[i][j] == 0) continue;
      auto a = abs_of(s[i][j]);
      if (!found || a < abs_of(s[pi][pj])) {
        found = true;
        pi = i;
        pj = j;
      }
    }
  return found;
}

// Diagonalize by elementary row/column operations; returns the diagonal of a
// valid Smith form (divisibility chain enforced arithmetically afterwards,
// which is legitimate because diag(a,b) and diag(gcd,lcm) present the same
// cokernel). The minimal pivot is re-selected on every sweep, which keeps
// intermediate growth tame.
template <class T>
inline std::vector<T> snf_diagonal_impl(std::vector<std::vector<T>> s, int rows, int cols) {
  const int nmin = std::min(rows, cols);
  std::vector<T> diag;
  for (int k = 0; k < nmin; ++k) {
    bool have_pivot = false;
    while (true) {
      int pi, pj;
      if (!find_pivot(s, rows, cols, k, pi, pj)) break;
      have_pivot = true;
      std::swap(s[k], s[pi]);
      if (pj != k)
        for (int i = k; i < rows; ++i) std::swap(s[i][k], s[i][pj]);
      bool clean = true;
      for (int i = k + 1; i < rows; ++i) {
        if (s[i][k] == 0) continue;
        T q = s[i][k] / s[k][k];
        if (q != 0)
          for (int j = k; j < cols; ++j)
            s[i][j] = checked_add(s[i][j], checked_mul(T(-q), s[k][j]));
        if (s[i][k] != 0) clean = false;
      }
      for (int j = k + 1; j < cols; ++j) {
        if (s[k][j] == 0) continue;
        T q = s[k][j] / s[k][k];
        if (q != 0)
          for (int i = k; i < rows; ++i)
            s[i][j] = checked_add(s[i][j], checked_mul(T(-q), s[i][k]));
        if (s[k][j] != 0) clean = false;
      }
      if (clean) break;
    }
    if (!have_pivot) break;
    diag.push_back(abs_of(s[k][k]));
  }
  // divisibility chain
  for (size_t i = 0; i < diag.size(); ++i)
    for (size_t j = i + 1; j < diag.size(); ++j) {
      T g = gcd_of(diag[i], diag[j]);
      if (g == diag[i]) continue;
      T l = checked_mul(T(diag[i] / g), diag[j]);
      diag[i] = g;
      diag[j] = l;
    }
  diag.resize(size_t(nmin), T(0));
  return diag;
}

}  // namespace detail

/// Diagonal of the Smith normal form (invariant factors, ascending
/// divisibility, zeros trailing). Tries native 64-bit arithmetic first and
/// falls back to arbitrary precision on overflow.
inline std::vector<Int> snf_diagonal(const IntMatrix& a) {
  if (a.empty()) throw std::invalid_argument("smith form of empty matrix");
  bool fits = true;
  for (const Int& v : a.data)
    if (v > std::numeric_limits<std::int64_t>::max() / 4 ||
        v < std::numeric_limits<std::int64_t>::min() / 4) {
      fits = false;
      break;
    }
  if (fits) {
    std::vector<std::vector<std::int64_t>> s(a.rows, std::vector<std::int64_t>(a.cols));
    for (int i = 0; i < a.rows; ++i)
      for (int j = 0; j < a.cols; ++j) s[i][j] = a.at(i, j).convert_to<std::int64_t>();
    try {
      auto d = detail::snf_diagonal_impl<std::int64_t>(std::move(s), a.rows, a.cols);
      return std::vector<Int>(d.begin(), d.end());
    } catch (const detail::ArithmeticOverflow&) {
      // retry below in full precision
    }
  }
  std::vector<std::vector<Int>> s(a.rows, std::vector<Int>(a.cols));
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) s[i][j] = a.at(i, j);
  return detail::snf_diagonal_impl<Int>(std::move(s), a.rows, a.cols);
}

/// Full Smith decomposition with transform matrices. Deterministic: pivots are
/// chosen by smallest nonzero absolute value, ties broken lexicographically.
inline SnfResult smith_normal_form(const IntMatrix& a) {
  if (a.empty()) throw std::invalid_argument("smith form of empty matrix");
  const int rows = a.rows, cols = a.cols, nmin = std::min(rows, cols);
  SnfResult res{IntMatrix::identity(rows), a, IntMatrix::identity(cols)};
  IntMatrix& u = res.U;
  IntMatrix& s = res.S;
  IntMatrix& v = res.V;

  // Row op S <- E*S paired with U <- U*E^-1, column op S <- S*F with
  // V <- F^-1*V, so A = U*S*V holds after every step.
  auto row_add = [&](int i, int j, Int t) {  // row_i += t*row_j
    for (int c = 0; c < cols; ++c) s.at(i, c) += t * s.at(j, c);
    for (int r = 0; r < rows; ++r) u.at(r, j) -= t * u.at(r, i);
  };
  auto col_add = [&](int i, int j, Int t) {  // col_i += t*col_j
    for (int r = 0; r < rows; ++r) s.at(r, i) += t * s.at(r, j);
    for (int c = 0; c < cols; ++c) v.at(j, c) -= t * v.at(i, c);
  };
  auto row_swap = [&](int i, int j) {
    if (i == j) return;
    for (int c = 0; c < cols; ++c) std::swap(s.at(i, c), s.at(j, c));
    for (int r = 0; r < rows; ++r) std::swap(u.at(r, i), u.at(r, j));
  };
  auto col_swap = [&](int i, int j) {
    if (i == j) return;
    for (int r = 0; r < rows; ++r) std::swap(s.at(r, i), s.at(r, j));
    for (int c = 0; c < cols; ++c) std::swap(v.at(i, c), v.at(j, c));
  };
  auto row_negate = [&](int i) {
    for (int c = 0; c < cols; ++c) s.at(i, c) = -s.at(i, c);
    for (int r = 0; r < rows; ++r) u.at(r, i) = -u.at(r, i);
  };

  int rank = 0;
  for (int k = 0; k < nmin; ++k) {
    bool have_pivot = false;
    while (true) {
      int pi = k, pj = k;
      bool found = false;
      for (int i = k; i < rows; ++i)
        for (int j = k; j < cols; ++j) {
          if (s.at(i, j) == 0) continue;
          Int av = abs(s.at(i, j));
          if (!found || av < abs(s.at(pi, pj))) {
            found = true;
            pi = i;
            pj = j;
          }
        }
      if (!found) break;
      have_pivot = true;
      row_swap(k, pi);
      col_swap(k, pj);
      bool clean = true;
      for (int i = k + 1; i < rows; ++i) {
        if (s.at(i, k) == 0) continue;
        Int q = s.at(i, k) / s.at(k, k);
        if (q != 0) row_add(i, k, -q);
        if (s.at(i, k) != 0) clean = false;
      }
      for (int j = k + 1; j < cols; ++j) {
        if (s.at(k, j) == 0) continue;
        Int q = s.at(k, j) / s.at(k, k);
        if (q != 0) col_add(j, k, -q);
        if (s.at(k, j) != 0) clean = false;
      }
      if (clean) break;
    }
    if (!have_pivot) break;
    rank = k + 1;
  }

  for (int k = 0; k < rank; ++k)
    if (s.at(k, k) < 0) row_negate(k);

  // Enforce the divisibility chain by hyperbolic 2x2 merges on diagonal pairs.
  for (int k = 0; k < rank; ++k)
    for (int j = k + 1; j < rank; ++j) {
      Int aa = s.at(k, k), bb = s.at(j, j);
      if (bb % aa == 0) continue;
      Int x, y, g;
      {
        // extended gcd on positive entries
        Int r0 = aa, r1 = bb, x0 = 1, x1 = 0, y0 = 0, y1 = 1;
        while (r1 != 0) {
          Int q = r0 / r1;
          r0 -= q * r1; std::swap(r0, r1);
          x0 -= q * x1; std::swap(x0, x1);
          y0 -= q * y1; std::swap(y0, y1);
        }
        g = r0; x = x0; y = y0;
      }
      row_add(k, j, 1);  // S[k][j] = bb
      // columns (k, j) <- (k, j) * [[x, -bb/g], [y, aa/g]], determinant 1
      Int bg = bb / g, ag = aa / g;
      for (int r = 0; r < rows; ++r) {
        Int ck = s.at(r, k), cj = s.at(r, j);
        s.at(r, k) = ck * x + cj * y;
        s.at(r, j) = -ck * bg + cj * ag;
      }
      for (int c = 0; c < cols; ++c) {  // V <- W^-1 * V
        Int rk = v.at(k, c), rj = v.at(j, c);
        v.at(k, c) = ag * rk + bg * rj;
        v.at(j, c) = -y * rk + x * rj;
      }
      // S[j][k] = bb*y remains; clear it with a row operation
      if (s.at(j, k) != 0) row_add(j, k, -Int(s.at(j, k) / g));
      if (s.at(j, j) < 0) row_negate(j);
    }
  return res;
}

/// Inverse of a unimodular integer matrix, via integer row reduction of the
/// augmented system. Throws if the input is not unimodular.
inline IntMatrix unimodular_inverse(const IntMatrix& a) {
  if (a.rows != a.cols) throw std::invalid_argument("inverse of non-square matrix");
  const int n = a.rows;
  IntMatrix m = a;
  IntMatrix t = IntMatrix::identity(n);
  auto row_combine = [&](int i, int j, Int q) {  // row_i -= q*row_j; q by value, it may alias m

    for (int c = 0; c < n; ++c) {
      m.at(i, c) -= q * m.at(j, c);
      t.at(i, c) -= q * t.at(j, c);
    }
  };
  for (int k = 0; k < n; ++k) {
    // Euclid down column k
    while (true) {
      int p = -1;
      for (int i = k; i < n; ++i)
        if (m.at(i, k) != 0 && (p < 0 || abs(m.at(i, k)) < abs(m.at(p, k)))) p = i;
      if (p < 0) throw InternalInvariantError("matrix is singular, expected unimodular");
      if (p != k) {
        for (int c = 0; c < n; ++c) {
          std::swap(m.at(k, c), m.at(p, c));
          std::swap(t.at(k, c), t.at(p, c));
        }
      }
      bool done = true;
      for (int i = k + 1; i < n; ++i) {
        if (m.at(i, k) == 0) continue;
        row_combine(i, k, m.at(i, k) / m.at(k, k));
        if (m.at(i, k) != 0) done = false;
      }
      if (done) break;
    }
    if (abs(m.at(k, k)) != 1)
      throw InternalInvariantError("matrix is not unimodular");
    if (m.at(k, k) < 0)
      for (int c = 0; c < n; ++c) {
        m.at(k, c) = -m.at(k, c);
        t.at(k, c) = -t.at(k, c);
      }
  }
  for (int k = n - 1; k >= 0; --k)
    for (int i = 0; i < k; ++i)
      if (m.at(i, k) != 0) row_combine(i, k, m.at(i, k));
  return t;
}

/// Isomorphism type of a finitely generated abelian group: torsion
/// coefficients in an increasing divisibility chain, each > 1, plus free rank.
struct AbelianStructure {
  std::vector<Int> torsion;
  int free_rank = 0;

  AbelianStructure() = default;
  AbelianStructure(std::vector<Int> t, int rank) : torsion(std::move(t)), free_rank(rank) {
    for (size_t i = 0; i < torsion.size(); ++i) {
      if (torsion[i] <= 1) throw std::invalid_argument("torsion coefficient must exceed 1");
      if (i + 1 < torsion.size() && torsion[i + 1] % torsion[i] != 0)
        throw std::invalid_argument("torsion coefficients must form a divisibility chain");
    }
    if (rank < 0) throw std::invalid_argument("negative free rank");
  }

  Int order() const {  // of the torsion part
    Int o = 1;
    for (const Int& t : torsion) o *= t;
    return o;
  }
  Int exponent() const { return torsion.empty() ? Int(1) : torsion.back(); }
  bool trivial() const { return torsion.empty() && free_rank == 0; }

  bool operator==(const AbelianStructure& o) const {
    return torsion == o.torsion && free_rank == o.free_rank;
  }
};

/// |R(D)| for the submodule R(D) of (Z/m)^n generated by the rows of D.
/// Computed from the Smith diagonal of the integer lift: the image of
/// diag(s_1..s_n) in (Z/m)^n has order prod m/gcd(s_i, m).
inline Int row_space_order(const IntMatrix& d, const Int& m) {
  if (d.rows != d.cols) throw std::invalid_argument("row_space_order expects a square matrix");
  if (m <= 0) throw std::invalid_argument("modulus must be positive");
  Int order = 1;
  for (const Int& s : snf_diagonal(d)) order *= m / gcd(s, m);
  return order;
}

/// Orders r_i of the coordinate projections of R(D): r_i = m / gcd(m, column-i gcd).
inline std::vector<Int> coordinate_orders(const IntMatrix& d, const Int& m) {
  if (d.rows != d.cols) throw std::invalid_argument("coordinate_orders expects a square matrix");
  if (m <= 0) throw std::invalid_argument("modulus must be positive");
  std::vector<Int> r(size_t(d.cols));
  for (int j = 0; j < d.cols; ++j) {
    Int g = m;
    for (int i = 0; i < d.rows; ++i) g = gcd(g, d.at(i, j));
    r[size_t(j)] = m / g;
  }
  return r;
}

/// Structure of (Z/k_1 + ... + Z/k_s) / <generators>, via the Smith form of
/// the stacked relation matrix [generators; diag(k_i)]. Generators are reduced
/// mod their moduli before stacking.
inline AbelianStructure cokernel_structure(const std::vector<std::vector<Int>>& generators,
                                           const std::vector<Int>& moduli) {
  const int s = int(moduli.size());
  for (const Int& k : moduli)
    if (k <= 0) throw std::invalid_argument("modulus must be positive");
  if (s == 0) return AbelianStructure{};
  for (const auto& g : generators)
    if (int(g.size()) != s)
      throw std::invalid_argument("generator length does not match modulus count");
  IntMatrix rel(int(generators.size()) + s, s);
  for (size_t i = 0; i < generators.size(); ++i)
    for (int j = 0; j < s; ++j) {
      Int v = generators[i][size_t(j)] % moduli[size_t(j)];
      if (v < 0) v += moduli[size_t(j)];
      rel.at(int(i), j) = v;
    }
  for (int j = 0; j < s; ++j) rel.at(int(generators.size()) + j, j) = moduli[size_t(j)];
  std::vector<Int> torsion;
  for (const Int& f : snf_diagonal(rel))
    if (f > 1) torsion.push_back(f);
  return AbelianStructure{std::move(torsion), 0};
}

}  // namespace repmod
