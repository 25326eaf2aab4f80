#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>

#include "oracles.hpp"
#include "repmod/skew_forms.hpp"

using namespace repmod;

namespace {

SkewMatrixZm random_skew(int n, std::int64_t m, std::mt19937& rng) {
  std::vector<std::int64_t> upper(size_t(n) * size_t(n - 1) / 2);
  for (auto& v : upper) v = std::int64_t(rng() % std::uint64_t(m));
  return SkewMatrixZm(n, m, std::move(upper));
}

// Q^T * lift(D) * Q reduced into T(n, Z/m)
SkewMatrixZm congruence_mod_m(const SkewMatrixZm& d, const IntMatrix& q) {
  IntMatrix qt(q.cols, q.rows);
  for (int i = 0; i < q.rows; ++i)
    for (int j = 0; j < q.cols; ++j) qt.at(j, i) = q.at(i, j);
  IntMatrix prod = qt * d.lift() * q;
  SkewMatrixZm out(d.n, d.m);
  for (int i = 0; i < d.n; ++i)
    for (int j = i + 1; j < d.n; ++j) {
      Int v = prod.at(i, j) % d.m;
      if (v < 0) v += d.m;
      out.upper[SkewMatrixZm::upper_index(d.n, i, j)] = v.convert_to<std::int64_t>();
    }
  return out;
}

void check_canonical_contract(const SkewMatrixZm& d) {
  CanonicalSkewForm cf = canonical_form(d);
  REQUIRE(abs(determinant(cf.Q)) == 1);
  REQUIRE(congruence_mod_m(d, cf.Q) == canonical_block_matrix(d.n, d.m, cf.invariants));
  REQUIRE(2 * cf.t() <= d.n);
  for (size_t k = 0; k < cf.orders.size(); ++k) {
    REQUIRE(cf.invariants[k] >= 1);
    REQUIRE(cf.invariants[k] < d.m);
    REQUIRE(cf.orders[k] == d.m / std::gcd(cf.invariants[k], d.m));
    if (k + 1 < cf.orders.size()) REQUIRE(cf.orders[k] % cf.orders[k + 1] == 0);
  }
  REQUIRE(cf.product_of_orders() == sigma(d));
}

}  // namespace

TEST_CASE("skew matrix representation") {
  SkewMatrixZm d(3, 4, {1, 2, 3});
  REQUIRE(d.at(0, 1) == 1);
  REQUIRE(d.at(1, 0) == 3);  // 4 - 1
  REQUIRE(d.at(2, 2) == 0);
  REQUIRE(d.at(2, 1) == 1);  // 4 - 3
  SECTION("entries are reduced mod m") {
    SkewMatrixZm e(2, 4, {-1});
    REQUIRE(e.at(0, 1) == 3);
  }
  SECTION("bad shapes rejected") {
    REQUIRE_THROWS_AS(SkewMatrixZm(2, 4, {1, 2}), std::invalid_argument);
    REQUIRE_THROWS_AS(SkewMatrixZm(0, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(SkewMatrixZm(2, 0), std::invalid_argument);
  }
  SECTION("the lift is alternating over Z") {
    IntMatrix l = d.lift();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) REQUIRE(l.at(i, j) == -l.at(j, i));
  }
}

TEST_CASE("sigma on named matrices") {
  REQUIRE(sigma(SkewMatrixZm(3, 5)) == 1);
  REQUIRE(sigma(SkewMatrixZm(2, 4, {2})) == 2);
  REQUIRE(sigma(SkewMatrixZm(4, 4, {1, 0, 0, 0, 0, 2})) == 8);
  SECTION("n = 2: sigma is the additive order of the single entry") {
    for (std::int64_t m = 1; m <= 12; ++m)
      for (std::int64_t v = 0; v < m; ++v)
        REQUIRE(sigma(SkewMatrixZm(2, m, {v})) == m / std::gcd(v, m));
  }
}

TEST_CASE("sigma is invariant under unimodular congruence") {
  std::mt19937 rng(101);
  for (int n = 2; n <= 4; ++n)
    for (std::int64_t m : {2, 3, 4, 6, 9}) {
      SkewMatrixZm d = random_skew(n, m, rng);
      Int s = sigma(d);
      for (int trial = 0; trial < 100; ++trial) {
        IntMatrix q = test::random_unimodular(n, rng);
        REQUIRE(sigma(congruence_mod_m(d, q)) == s);
      }
    }
}

TEST_CASE("canonical form of named matrices") {
  SECTION("zero matrix") {
    CanonicalSkewForm cf = canonical_form(SkewMatrixZm(3, 6));
    REQUIRE(cf.t() == 0);
    REQUIRE(cf.Q == IntMatrix::identity(3));
  }
  SECTION("single class of T(2, Z/2)") {
    CanonicalSkewForm cf = canonical_form(SkewMatrixZm(2, 2, {1}));
    REQUIRE(cf.t() == 1);
    REQUIRE(cf.orders == std::vector<std::int64_t>{2});
    check_canonical_contract(SkewMatrixZm(2, 2, {1}));
  }
  SECTION("order-4 invariant despite an order-2 leading entry") {
    SkewMatrixZm d(3, 4, {2, 1, 0});
    CanonicalSkewForm cf = canonical_form(d);
    REQUIRE(cf.t() == 1);
    REQUIRE(cf.orders == std::vector<std::int64_t>{4});
    check_canonical_contract(d);
  }
  SECTION("two invariants with a genuine chain") {
    SkewMatrixZm d(4, 4, {1, 0, 0, 0, 0, 2});
    CanonicalSkewForm cf = canonical_form(d);
    REQUIRE(cf.t() == 2);
    REQUIRE(cf.orders == std::vector<std::int64_t>{4, 2});
    check_canonical_contract(d);
  }
}

TEST_CASE("canonical form contract on random matrices") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> nd(1, 6);
  std::uniform_int_distribution<std::int64_t> md(1, 16);
  for (int trial = 0; trial < 400; ++trial) {
    check_canonical_contract(random_skew(nd(rng), md(rng), rng));
  }
}

TEST_CASE("order chain repair handles incomparable orders") {
  // orders 4 and 6 over Z/12: neither divides the other
  SkewMatrixZm d(4, 12, {3, 0, 0, 0, 0, 2});
  CanonicalSkewForm cf = canonical_form(d);
  REQUIRE(cf.orders == std::vector<std::int64_t>{12, 2});
  check_canonical_contract(d);
  // orders (2, 3): the merged pair collapses into a single block
  SkewMatrixZm e(4, 12, {6, 0, 0, 0, 0, 4});
  CanonicalSkewForm ce = canonical_form(e);
  REQUIRE(ce.orders == std::vector<std::int64_t>{6});
  check_canonical_contract(e);
}

TEST_CASE("admissibility") {
  REQUIRE(is_admissible(SkewMatrixZm(4, 6), {2, 3}));
  SECTION("torsion divisibility") {
    SkewMatrixZm d(2, 2, {1});
    REQUIRE(is_admissible(d, {2, 2}));
    REQUIRE(!is_admissible(d, {1, 2}));
  }
  SECTION("sigma must divide m") {
    REQUIRE(!is_admissible(SkewMatrixZm(4, 4, {1, 0, 0, 0, 0, 2}), {}));
    REQUIRE(is_admissible(SkewMatrixZm(4, 4, {1, 0, 0, 0, 0, 0}), {}));
  }
  SECTION("too many torsion coordinates rejected") {
    REQUIRE_THROWS_AS(is_admissible(SkewMatrixZm(2, 2, {1}), {2, 2, 2}), std::invalid_argument);
  }
}

TEST_CASE("enumeration") {
  SECTION("one free entry for n = 2") {
    std::uint64_t count = 0;
    enumerate_all(2, 3, WorkerPartition{}, kDefaultEnumerationCap,
                  [&](const SkewMatrixZm&) { ++count; });
    REQUIRE(count == 3);
  }
  SECTION("2^3 matrices for n = 3, m = 2") {
    std::uint64_t count = 0;
    enumerate_all(3, 2, WorkerPartition{}, kDefaultEnumerationCap,
                  [&](const SkewMatrixZm&) { ++count; });
    REQUIRE(count == 8);
  }
  SECTION("lexicographic order within a run") {
    std::vector<std::vector<std::int64_t>> seen;
    enumerate_all(3, 3, WorkerPartition{}, kDefaultEnumerationCap,
                  [&](const SkewMatrixZm& d) { seen.push_back(d.upper); });
    REQUIRE(seen.size() == 27);
    REQUIRE(std::is_sorted(seen.begin(), seen.end()));
  }
  SECTION("cap guard") {
    REQUIRE_THROWS_AS(enumeration_size(6, 16), EnumerationLimitError);
    REQUIRE_THROWS_AS(enumerate_all(4, 4, WorkerPartition{}, 10,
                                    [](const SkewMatrixZm&) {}),
                      EnumerationLimitError);
  }
  SECTION("bad partition rejected") {
    REQUIRE_THROWS_AS(enumerate_all(2, 2, WorkerPartition{2, 2}, kDefaultEnumerationCap,
                                    [](const SkewMatrixZm&) {}),
                      std::invalid_argument);
  }
  SECTION("worker slices partition the stream exactly") {
    std::vector<std::vector<std::int64_t>> whole;
    enumerate_all(3, 4, WorkerPartition{}, kDefaultEnumerationCap,
                  [&](const SkewMatrixZm& d) { whole.push_back(d.upper); });
    for (unsigned w : {1u, 2u, 3u, 7u}) {
      std::vector<std::vector<std::int64_t>> merged;
      for (unsigned i = 0; i < w; ++i)
        enumerate_all(3, 4, WorkerPartition{i, w}, kDefaultEnumerationCap,
                      [&](const SkewMatrixZm& d) { merged.push_back(d.upper); });
      REQUIRE(merged == whole);
    }
  }
}

TEST_CASE("admissible counts") {
  SECTION("N(2, m) = m") {
    for (std::int64_t m = 1; m <= 12; ++m) REQUIRE(count_admissible(2, m) == std::uint64_t(m));
  }
  SECTION("all of T(n, Z/m) is admissible for n <= 3") {
    for (int n = 1; n <= 3; ++n)
      for (std::int64_t m = 1; m <= 8; ++m) {
        std::uint64_t expect = 1;
        for (int i = 0; i < n * (n - 1) / 2; ++i) expect *= std::uint64_t(m);
        REQUIRE(count_admissible(n, m) == expect);
      }
  }
  SECTION("N(4, 4) = 1184") { REQUIRE(count_admissible(4, 4) == 1184); }
  SECTION("admissible counts merge across workers") {
    std::uint64_t parts = 0;
    for (unsigned i = 0; i < 3; ++i)
      parts += count_admissible_partition(4, 4, WorkerPartition{i, 3});
    REQUIRE(parts == 1184);
  }
}
