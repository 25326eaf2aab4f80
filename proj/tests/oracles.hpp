#pragma once

// Brute-force oracles used only by the test suites. Everything here is
// deliberately independent of the library's computation paths: subgroup
// closures and orbit counts are enumerated directly.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "repmod/int_matrix.hpp"

namespace repmod::test {

// Cardinality of {x * D mod m : x in Z^n} by additive closure over the rows.
inline std::int64_t row_space_order_by_closure(const std::vector<std::vector<std::int64_t>>& rows,
                                               std::int64_t m) {
  const size_t n = rows.empty() ? 0 : rows[0].size();
  std::set<std::vector<std::int64_t>> seen;
  seen.insert(std::vector<std::int64_t>(n, 0));
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::vector<std::int64_t>> current(seen.begin(), seen.end());
    for (const auto& v : current)
      for (const auto& r : rows) {
        std::vector<std::int64_t> w(n);
        for (size_t i = 0; i < n; ++i) w[i] = ((v[i] + r[i]) % m + m) % m;
        if (seen.insert(w).second) grew = true;
      }
  }
  return std::int64_t(seen.size());
}

// Order of the subgroup of Z/k_1 + ... + Z/k_s generated by the given vectors.
inline std::int64_t subgroup_order_by_closure(const std::vector<std::vector<std::int64_t>>& gens,
                                              const std::vector<std::int64_t>& moduli) {
  std::set<std::vector<std::int64_t>> seen;
  seen.insert(std::vector<std::int64_t>(moduli.size(), 0));
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::vector<std::int64_t>> current(seen.begin(), seen.end());
    for (const auto& v : current)
      for (const auto& g : gens) {
        std::vector<std::int64_t> w(moduli.size());
        for (size_t i = 0; i < moduli.size(); ++i)
          w[i] = ((v[i] + g[i]) % moduli[i] + moduli[i]) % moduli[i];
        if (seen.insert(w).second) grew = true;
      }
  }
  return std::int64_t(seen.size());
}

// Orbit count of size-l multisets over the abelian group with the given
// torsion coefficients, under simultaneous translation. Direct enumeration.
inline std::int64_t reduced_symmetric_orbits(const std::vector<std::int64_t>& torsion,
                                             int l) {
  std::vector<std::vector<std::int64_t>> elements;
  std::vector<std::int64_t> cur(torsion.size(), 0);
  while (true) {
    elements.push_back(cur);
    size_t i = 0;
    for (; i < torsion.size(); ++i) {
      if (++cur[i] < torsion[i]) break;
      cur[i] = 0;
    }
    if (i == torsion.size()) break;
    if (torsion.empty()) break;
  }
  if (torsion.empty()) elements.assign(1, {});

  const int h = int(elements.size());
  // all multisets of size l as non-decreasing index tuples
  std::vector<std::vector<int>> multisets;
  std::vector<int> ms(size_t(l), 0);
  while (true) {
    multisets.push_back(ms);
    int i = l - 1;
    while (i >= 0 && ms[size_t(i)] == h - 1) --i;
    if (i < 0) break;
    int v = ms[size_t(i)] + 1;
    for (int j = i; j < l; ++j) ms[size_t(j)] = v;
  }

  auto translate = [&](const std::vector<int>& mset, int g) {
    std::vector<int> out;
    out.reserve(mset.size());
    for (int idx : mset) {
      std::vector<std::int64_t> w(torsion.size());
      for (size_t i = 0; i < torsion.size(); ++i)
        w[i] = (elements[size_t(idx)][i] + elements[size_t(g)][i]) % torsion[i];
      int pos = int(std::find(elements.begin(), elements.end(), w) - elements.begin());
      out.push_back(pos);
    }
    std::sort(out.begin(), out.end());
    return out;
  };

  std::set<std::vector<int>> reps;
  for (const auto& mset : multisets) {
    std::vector<int> best = mset;
    for (int g = 0; g < h; ++g) best = std::min(best, translate(mset, g));
    reps.insert(best);
  }
  return std::int64_t(reps.size());
}

// Random unimodular matrix: a bounded product of elementary shears and swaps.
inline IntMatrix random_unimodular(int n, std::mt19937& rng) {
  IntMatrix q = IntMatrix::identity(n);
  std::uniform_int_distribution<int> idx(0, n - 1), coef(-3, 3), opkind(0, 3);
  int ops = 4 + int(rng() % 8);
  for (int o = 0; o < ops; ++o) {
    int i = idx(rng), j = idx(rng);
    if (i == j) continue;
    switch (opkind(rng)) {
      case 0: {  // row_i += t*row_j
        int t = coef(rng);
        for (int c = 0; c < n; ++c) q.at(i, c) += t * q.at(j, c);
        break;
      }
      case 1: {  // col_i += t*col_j
        int t = coef(rng);
        for (int r = 0; r < n; ++r) q.at(r, i) += t * q.at(r, j);
        break;
      }
      case 2:
        for (int c = 0; c < n; ++c) std::swap(q.at(i, c), q.at(j, c));
        break;
      default:
        for (int c = 0; c < n; ++c) q.at(i, c) = -q.at(i, c);
        break;
    }
  }
  return q;
}

}  // namespace repmod::test
