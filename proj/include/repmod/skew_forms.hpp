#pragma once

#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "repmod/errors.hpp"
#include "repmod/int_matrix.hpp"

namespace repmod {

/// Alternating n x n matrix over Z/m, stored as the upper triangle in
/// lexicographic (i,j) order. The implied full matrix has a_ji = m - a_ij and
/// zero diagonal.
struct SkewMatrixZm {
  static constexpr std::int64_t kMaxModulus = (std::int64_t(1) << 31) - 1;

  int n = 1;
  std::int64_t m = 1;
  std::vector<std::int64_t> upper;

  SkewMatrixZm() : upper() {}
  SkewMatrixZm(int n_, std::int64_t m_, std::vector<std::int64_t> upper_ = {})
      : n(n_), m(m_), upper(std::move(upper_)) {
    if (n < 1) throw std::invalid_argument("matrix size must be positive");
    if (m < 1) throw std::invalid_argument("modulus must be positive");
    if (m > kMaxModulus) throw std::invalid_argument("modulus too large");
    const size_t want = size_t(n) * size_t(n - 1) / 2;
    if (upper.empty()) upper.assign(want, 0);
    if (upper.size() != want)
      throw std::invalid_argument("upper triangle entry count must be n(n-1)/2");
    for (auto& v : upper) v = ((v % m) + m) % m;
  }

  static size_t upper_index(int n, int i, int j) {  // requires i < j
    return size_t(i) * size_t(n) - size_t(i) * size_t(i + 1) / 2 + size_t(j - i - 1);
  }

  std::int64_t at(int i, int j) const {
    if (i == j) return 0;
    if (i < j) return upper[upper_index(n, i, j)];
    return (m - upper[upper_index(n, j, i)]) % m;
  }

  /// Integer lift with entries in (-m, m): a_ij in [0,m) above the diagonal
  /// and its exact negative below, so the lift is alternating over Z.
  IntMatrix lift() const {
    IntMatrix out(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        std::int64_t v = upper[upper_index(n, i, j)];
        out.at(i, j) = v;
        out.at(j, i) = -v;
      }
    return out;
  }

  std::vector<std::vector<std::int64_t>> rows_mod_m() const {
    std::vector<std::vector<std::int64_t>> rows;
    rows.assign(size_t(n), std::vector<std::int64_t>(size_t(n), 0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) rows[size_t(i)][size_t(j)] = at(i, j);
    return rows;
  }

  bool operator==(const SkewMatrixZm& o) const {
    return n == o.n && m == o.m && upper == o.upper;
  }
};

namespace detail {

inline Int row_space_order_of_lift(const std::vector<std::vector<std::int64_t>>& lift_rows,
                                   std::int64_t m) {
  const int n = int(lift_rows.size());
  try {
    Int order = 1;
    for (std::int64_t s : snf_diagonal_impl<std::int64_t>(lift_rows, n, n))
      order *= m / std::gcd(s, m);
    return order;
  } catch (const ArithmeticOverflow&) {
    IntMatrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a.at(i, j) = lift_rows[size_t(i)][size_t(j)];
    return row_space_order(a, m);
  }
}

inline std::vector<std::vector<std::int64_t>> lift_rows(const SkewMatrixZm& d) {
  std::vector<std::vector<std::int64_t>> rows;
  rows.assign(size_t(d.n), std::vector<std::int64_t>(size_t(d.n), 0));
  for (int i = 0; i < d.n; ++i)
    for (int j = i + 1; j < d.n; ++j) {
      std::int64_t v = d.upper[SkewMatrixZm::upper_index(d.n, i, j)];
      rows[size_t(i)][size_t(j)] = v;
      rows[size_t(j)][size_t(i)] = -v;
    }
  return rows;
}

}  // namespace detail

/// sigma(D) = sqrt(|R(D)|); the row space order of an alternating matrix is
/// always a perfect square, so a failed square check is an internal error.
inline Int sigma(const SkewMatrixZm& d) {
  Int order = detail::row_space_order_of_lift(detail::lift_rows(d), d.m);
  Int s = sqrt(order);
  if (s * s != order)
    throw InternalInvariantError("row space order " + order.str() +
                                 " is not a perfect square");
  return s;
}

/// Additive order in Z/m of each coordinate projection of R(D).
inline std::vector<std::int64_t> skew_coordinate_orders(const SkewMatrixZm& d) {
  std::vector<std::int64_t> r(size_t(d.n));
  for (int j = 0; j < d.n; ++j) {
    std::int64_t g = d.m;
    for (int i = 0; i < d.n; ++i) g = std::gcd(g, d.at(i, j));
    r[size_t(j)] = d.m / g;
  }
  return r;
}

/// sigma(D) | m together with r_i(D) | k_i over the leading torsion
/// coordinates. The trailing coordinates (free rank) are unconstrained.
inline bool is_admissible(const SkewMatrixZm& d, const std::vector<std::int64_t>& torsion) {
  if (int(torsion.size()) > d.n)
    throw std::invalid_argument("more torsion coefficients than matrix coordinates");
  Int s = sigma(d);
  if (d.m % s != 0) return false;
  auto r = skew_coordinate_orders(d);
  for (size_t i = 0; i < torsion.size(); ++i) {
    if (torsion[i] < 1) throw std::invalid_argument("torsion coefficients must be positive");
    if (torsion[i] % r[i] != 0) return false;
  }
  return true;
}

/// Congruence normal form of an alternating matrix over Z/m: a unimodular Q
/// with Q^T D Q congruent mod m to the block form whose only nonzero entries
/// are -c_k at (k, t+k) and c_k at (t+k, k), with the additive orders of the
/// invariants c_1..c_t forming a decreasing divisibility chain.
struct CanonicalSkewForm {
  IntMatrix Q;
  std::vector<std::int64_t> invariants;  // c_k, each in {1..m-1}
  std::vector<std::int64_t> orders;      // |c_k|; orders[k+1] divides orders[k]

  int t() const { return int(invariants.size()); }
  Int product_of_orders() const {
    Int p = 1;
    for (std::int64_t o : orders) p *= o;
    return p;
  }
};

/// Rebuild the block matrix D_n(c_1..c_t) the canonical form targets.
inline SkewMatrixZm canonical_block_matrix(int n, std::int64_t m,
                                           const std::vector<std::int64_t>& invariants) {
  SkewMatrixZm out(n, m);
  const int t = int(invariants.size());
  if (2 * t > n) throw std::invalid_argument("too many invariants for matrix size");
  for (int k = 0; k < t; ++k)
    out.upper[SkewMatrixZm::upper_index(n, k, t + k)] = ((m - invariants[size_t(k)]) % m + m) % m;
  return out;
}

namespace detail {

// t * w == c (mod m); requires gcd(w, m) | c.
inline std::int64_t solve_congruence(std::int64_t w, std::int64_t c, std::int64_t m) {
  std::int64_t g = std::gcd(w, m);
  std::int64_t m1 = m / g;
  if (m1 == 1) return 0;
  std::int64_t a = (w / g) % m1, b = (c / g) % m1;
  // modular inverse of a mod m1 by extended Euclid
  std::int64_t r0 = a, r1 = m1, x0 = 1, x1 = 0;
  while (r1 != 0) {
    std::int64_t q = r0 / r1;
    r0 -= q * r1;
    std::swap(r0, r1);
    x0 -= q * x1;
    std::swap(x0, x1);
  }
  std::int64_t inv = ((x0 % m1) + m1) % m1;
  return std::int64_t((__int128(b) * inv) % m1);
}

// State for the alternating reduction: the working matrix holds residues in
// [0, m) and stays alternating mod m under every congruence operation; Q
// accumulates the right factor so that M == Q^T * D * Q (mod m) throughout.
struct AlternatingReduction {
  int n;
  std::int64_t m;
  std::vector<std::vector<std::int64_t>> M;
  IntMatrix Q;

  explicit AlternatingReduction(const SkewMatrixZm& d)
      : n(d.n), m(d.m), M(d.rows_mod_m()), Q(IntMatrix::identity(d.n)) {}

  void op_swap(int i, int j) {
    if (i == j) return;
    std::swap(M[size_t(i)], M[size_t(j)]);
    for (int r = 0; r < n; ++r) std::swap(M[size_t(r)][size_t(i)], M[size_t(r)][size_t(j)]);
    for (int r = 0; r < n; ++r) std::swap(Q.at(r, i), Q.at(r, j));
  }

  // congruence by I + t*e(src,dst): row_dst += t*row_src, col_dst += t*col_src
  void op_add(int src, int dst, std::int64_t t) {
    t %= m;
    if (t == 0) return;
    for (int c = 0; c < n; ++c)
      M[size_t(dst)][size_t(c)] =
          ((M[size_t(dst)][size_t(c)] + t * M[size_t(src)][size_t(c)]) % m + m) % m;
    for (int r = 0; r < n; ++r)
      M[size_t(r)][size_t(dst)] =
          ((M[size_t(r)][size_t(dst)] + t * M[size_t(r)][size_t(src)]) % m + m) % m;
    for (int r = 0; r < n; ++r) Q.at(r, dst) += t * Q.at(r, src);
  }

  // Pivot with maximal additive order (minimal gcd with m) in the upper
  // triangle of [lo, hi), lexicographically smallest on ties.
  std::optional<std::pair<int, int>> find_pivot(int lo, int hi) const {
    std::optional<std::pair<int, int>> best;
    std::int64_t best_gcd = 0;
    for (int i = lo; i < hi; ++i)
      for (int j = i + 1; j < hi; ++j) {
        std::int64_t v = M[size_t(i)][size_t(j)];
        if (v == 0) continue;
        std::int64_t g = std::gcd(v, m);
        if (!best || g < best_gcd) {
          best = {i, j};
          best_gcd = g;
        }
      }
    return best;
  }

  // Clears rows pos and pos+1 beyond column pos+1 within [pos, hi). When an
  // entry is not divisible by gcd(pivot, m) the pivot is first replaced by a
  // combination of strictly larger order; termination follows because that
  // gcd strictly decreases.
  void clear_pair(int pos, int hi) {
    const int a = pos, b = pos + 1;
    while (true) {
      const std::int64_t v = M[size_t(a)][size_t(b)];
      const std::int64_t g = std::gcd(v, m);
      int improve_k = -1;
      bool improve_row_a = true;
      for (int k = pos + 2; k < hi && improve_k < 0; ++k) {
        if (M[size_t(a)][size_t(k)] % g != 0) {
          improve_k = k;
          improve_row_a = true;
        } else if (M[size_t(b)][size_t(k)] % g != 0) {
          improve_k = k;
          improve_row_a = false;
        }
      }
      if (improve_k >= 0) {
        if (improve_row_a) {
          std::int64_t e = M[size_t(a)][size_t(improve_k)];
          std::int64_t r = e % g;
          op_add(b, improve_k, solve_congruence(v, ((r - e) % m + m) % m, m));
          op_swap(improve_k, b);
        } else {
          std::int64_t f = M[size_t(b)][size_t(improve_k)];
          std::int64_t r = f % g;
          std::int64_t w = (m - v) % m;  // M[b][a]
          op_add(a, improve_k, solve_congruence(w, ((r - f) % m + m) % m, m));
          op_swap(improve_k, a);
        }
        continue;
      }
      for (int k = pos + 2; k < hi; ++k) {
        std::int64_t e = M[size_t(a)][size_t(k)];
        if (e != 0) op_add(b, k, solve_congruence(v, (m - e) % m, m));
        std::int64_t f = M[size_t(b)][size_t(k)];
        if (f != 0) op_add(a, k, solve_congruence((m - v) % m, (m - f) % m, m));
      }
      return;
    }
  }

  // Reduce [lo, hi) to consecutive hyperbolic pairs at (lo, lo+1), (lo+2,
  // lo+3), ...; returns the upper value of each pair.
  std::vector<std::int64_t> reduce_range(int lo, int hi) {
    std::vector<std::int64_t> blocks;
    int pos = lo;
    while (pos + 1 < hi) {
      auto piv = find_pivot(pos, hi);
      if (!piv) break;
      auto [pi, pj] = *piv;
      if (pi != pos) op_swap(pi, pos);
      if (pj != pos + 1) op_swap(pj, pos + 1);
      clear_pair(pos, hi);
      blocks.push_back(M[size_t(pos)][size_t(pos + 1)]);
      pos += 2;
    }
    return blocks;
  }
};

}  // namespace detail

/// Deterministic canonical form. The reduction produces adjacent hyperbolic
/// pairs; order-chain violations between neighbouring pairs are repaired by
/// coupling them with one congruence operation and re-reducing the 4x4 block,
/// which strictly increases the leading order and therefore terminates. A
/// final permutation moves pair k to coordinates (k, t+k).
inline CanonicalSkewForm canonical_form(const SkewMatrixZm& d) {
  detail::AlternatingReduction red(d);
  const std::int64_t m = d.m;
  std::vector<std::int64_t> vals = red.reduce_range(0, d.n);
  auto order_of = [m](std::int64_t v) { return m / std::gcd(v, m); };

  // Each merge strictly increases the order of the leading pair it touches and
  // orders are divisors of m, so the repair loop is bounded by t^2 * log2(m).
  long guard = long(d.n + 2) * long(d.n + 2) * (std::bit_width(std::uint64_t(m)) + 2);
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t k = 0; k + 1 < vals.size(); ++k) {
      if (order_of(vals[k]) % order_of(vals[k + 1]) == 0) continue;
      const int p = 2 * int(k);
      red.op_add(p + 2, p, 1);
      std::vector<std::int64_t> sub = red.reduce_range(p, p + 4);
      if (sub.empty() || sub.size() > 2)
        throw InternalInvariantError("pair merge produced an unexpected block count");
      if (sub.size() == 1) {
        for (size_t j = k + 2; j < vals.size(); ++j) {
          red.op_swap(2 * int(j), 2 * int(j) - 2);
          red.op_swap(2 * int(j) + 1, 2 * int(j) - 1);
        }
        vals[k] = sub[0];
        vals.erase(vals.begin() + long(k) + 1);
      } else {
        vals[k] = sub[0];
        vals[k + 1] = sub[1];
      }
      changed = true;
      if (--guard < 0) throw InternalInvariantError("order chain repair did not terminate");
    }
  }

  const int t = int(vals.size());
  CanonicalSkewForm out;
  out.Q = IntMatrix(d.n, d.n);
  // permutation sending pair k from (2k, 2k+1) to (k, t+k)
  std::vector<int> perm(size_t(d.n));
  for (int i = 0; i < d.n; ++i) perm[size_t(i)] = i;
  for (int k = 0; k < t; ++k) {
    perm[size_t(2 * k)] = k;
    perm[size_t(2 * k + 1)] = t + k;
  }
  for (int i = 0; i < d.n; ++i)
    for (int r = 0; r < d.n; ++r) out.Q.at(r, perm[size_t(i)]) = red.Q.at(r, i);
  for (std::int64_t v : vals) {
    out.invariants.push_back(m - v);  // upper value v sits at (k, t+k); c_k = -v mod m
    out.orders.push_back(order_of(v));
  }
#ifndef NDEBUG
  if (out.product_of_orders() != sigma(d))
    throw InternalInvariantError("canonical invariant orders disagree with sigma");
#endif
  return out;
}

constexpr std::uint64_t kDefaultEnumerationCap = 100'000'000;

struct WorkerPartition {
  unsigned index = 0;
  unsigned count = 1;
};

/// Number of matrices in T(n, Z/m); throws EnumerationLimitError beyond cap.
inline std::uint64_t enumeration_size(int n, std::int64_t m,
                                      std::uint64_t cap = kDefaultEnumerationCap) {
  if (n < 1 || m < 1) throw std::invalid_argument("n and m must be positive");
  const int k = n * (n - 1) / 2;
  Int total = 1;
  for (int i = 0; i < k; ++i) {
    total *= m;
    if (total > cap)
      throw EnumerationLimitError("enumeration of T(" + std::to_string(n) + ", Z/" +
                                  std::to_string(m) + ") has " + Int(pow(Int(m), k)).str() +
                                  " candidates, above the cap of " + std::to_string(cap));
  }
  return total.convert_to<std::uint64_t>();
}

/// Streams the worker's slice of T(n, Z/m) in lexicographic order of the
/// upper-triangle vector. Slices are contiguous index ranges, so concatenating
/// worker outputs in index order reproduces the single-worker stream.
template <class Filter, class Emit>
void enumerate(int n, std::int64_t m, WorkerPartition part, std::uint64_t cap,
               Filter&& keep, Emit&& emit) {
  if (part.count < 1 || part.index >= part.count)
    throw std::invalid_argument("worker index must be below worker count");
  const std::uint64_t total = enumeration_size(n, m, cap);
  const std::uint64_t lo = std::uint64_t((Int(total) * part.index / part.count).convert_to<std::uint64_t>());
  const std::uint64_t hi = std::uint64_t((Int(total) * (part.index + 1) / part.count).convert_to<std::uint64_t>());
  const int k = n * (n - 1) / 2;

  SkewMatrixZm d(n, m);
  std::uint64_t idx = lo;
  for (int pos = k - 1; pos >= 0; --pos) {
    d.upper[size_t(pos)] = std::int64_t(idx % std::uint64_t(m));
    idx /= std::uint64_t(m);
  }
  for (std::uint64_t cur = lo; cur < hi; ++cur) {
    if (keep(d)) emit(d);
    for (int pos = k - 1; pos >= 0; --pos) {
      if (++d.upper[size_t(pos)] < m) break;
      d.upper[size_t(pos)] = 0;
    }
  }
}

template <class Emit>
void enumerate_all(int n, std::int64_t m, WorkerPartition part, std::uint64_t cap, Emit&& emit) {
  enumerate(
      n, m, part, cap, [](const SkewMatrixZm&) { return true; }, emit);
}

/// N(n, m): matrices in T(n, Z/m) whose sigma divides m, for one worker slice.
inline std::uint64_t count_admissible_partition(int n, std::int64_t m, WorkerPartition part,
                                                std::uint64_t cap = kDefaultEnumerationCap) {
  std::uint64_t count = 0;
  enumerate(
      n, m, part, cap, [m](const SkewMatrixZm& d) { return Int(m) % sigma(d) == 0; },
      [&count](const SkewMatrixZm&) { ++count; });
  return count;
}

inline std::uint64_t count_admissible(int n, std::int64_t m,
                                      std::uint64_t cap = kDefaultEnumerationCap) {
  return count_admissible_partition(n, m, WorkerPartition{0, 1}, cap);
}

}  // namespace repmod
