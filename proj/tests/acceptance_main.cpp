// Acceptance suite: each criterion prints one PASS/FAIL line with its runtime.
// Expects the CLI binary path as argv[1] (used by the determinism criterion).

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli_runner.hpp"
#include "oracles.hpp"
#include "repmod/moduli.hpp"
#include "repmod/skew_forms.hpp"
#include "repmod/unitary.hpp"

using namespace repmod;

namespace {

std::string g_cli_path;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

template <class T, class U>
void expect_eq(const T& got, const U& want, const std::string& what) {
  if (!(got == T(want))) {
    std::ostringstream os;
    os << what << ": got " << got << ", expected " << want;
    throw Failure(os.str());
  }
}

void expect_runtime(double seconds, double bound, const std::string& what) {
  if (seconds > bound) {
    std::ostringstream os;
    os << what << " took " << seconds << "s, bound is " << bound << "s";
    throw Failure(os.str());
  }
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// closed-form component count of Rep(Z^n, PU(p^2)) and its sigma = p stratum
Int formula_count_psquared(std::int64_t p_, int n) {
  const Int p = p_;
  const Int num = (pow(p, n - 1) - 1) * (pow(p, n) - 1) *
                  (pow(p, 2 * n + 1) - pow(p, n) - pow(p, n - 1) + pow(p, 4) + pow(p, 2) - 1);
  const Int den = (p * p - 1) * (pow(p, 4) - 1);
  expect(num % den == 0, "p^2 count formula must divide exactly");
  return 1 + num / den;
}

Int formula_sigma_p_count(std::int64_t p_, int n) {
  const Int p = p_;
  const Int num = (pow(p, n - 1) - 1) * (pow(p, n) - 1);
  const Int den = p * p - 1;
  expect(num % den == 0, "u(p) formula must divide exactly");
  return num / den;
}

std::int64_t phi(std::int64_t m) {
  std::int64_t count = 0;
  for (std::int64_t a = 1; a <= m; ++a)
    if (std::gcd(a, m) == 1) ++count;
  return count;
}

double commutator_residual(const UnitaryTuple& t, const SkewMatrixZm& d) {
  double worst = 0.0;
  const CMat id = CMat::Identity(t.dim, t.dim);
  for (int i = 0; i < d.n; ++i)
    for (int j = 0; j < d.n; ++j) {
      if (i == j) continue;
      const CMat& a = t.matrices[size_t(i)];
      const CMat& b = t.matrices[size_t(j)];
      CMat k = a * b * a.adjoint() * b.adjoint();
      worst = std::max(worst,
                       (k - unit_phase(double(d.at(i, j)) / double(d.m)) * id).norm());
    }
  return worst;
}

void check_constructor_contract(const SkewMatrixZm& d) {
  const UnitaryTuple t = construct_tuple(d);
  expect(commutator_residual(t, d) <= 1e-9 * double(d.m),
         "commutator residual bound violated at m = " + std::to_string(d.m));
  expect(extract_class(t).D == d, "extract_class round trip failed");
  if (sigma(d) == d.m) {
    expect_eq(commutant_dimension(t), 1, "commutant dimension with sigma(D) = m");
    const EigenCoordinates ec = eigen_invariants(t, d, 1e-8);
    expect(ec.r == skew_coordinate_orders(d), "eigen coset orders");
  }
}

// ---------------------------------------------------------------------------

void criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  for (std::int64_t m = 1; m <= 12; ++m)
    expect_eq(count_admissible(2, m), std::uint64_t(m), "N(2," + std::to_string(m) + ")");
  expect_runtime(seconds_since(t0), 1.0, "N(2,m) sweep");
}

void criterion2() {
  auto t0 = std::chrono::steady_clock::now();
  for (std::int64_t m = 1; m <= 6; ++m)
    expect_eq(count_admissible(3, m), std::uint64_t(m * m * m), "N(3," + std::to_string(m) + ")");
  expect_runtime(seconds_since(t0), 10.0, "N(3,m) sweep");
}

void criterion3() {
  auto t0 = std::chrono::steady_clock::now();
  expect_eq(count_admissible(4, 4), std::uint64_t(1184), "N(4,4) brute force");
  expect_eq(formula_count_psquared(2, 4), Int(1184), "N(4,4) closed formula");
  std::uint64_t sigma2 = 0;
  enumerate(
      4, 4, WorkerPartition{}, kDefaultEnumerationCap,
      [](const SkewMatrixZm& d) { return sigma(d) == 2; },
      [&sigma2](const SkewMatrixZm&) { ++sigma2; });
  expect_eq(sigma2, std::uint64_t(35), "sigma = 2 stratum of T(4, Z/4)");
  expect_eq(formula_sigma_p_count(2, 4), Int(35), "u(2) closed formula");
  expect_runtime(seconds_since(t0), 5.0, "N(4,4) checks");

  auto t1 = std::chrono::steady_clock::now();
  const std::uint64_t n49 = count_admissible(4, 9);
  expect_eq(n49, std::uint64_t(63909), "N(4,9) brute force");
  expect_eq(formula_count_psquared(3, 4), Int(63909), "N(4,9) closed formula");
  expect_runtime(seconds_since(t1), 60.0, "N(4,9) checks");
}

void criterion4() {
  const std::vector<std::vector<std::int64_t>> groups = {
      {},  {2}, {3}, {4}, {2, 2}, {5}, {6}, {7}, {8}, {2, 4}, {2, 2, 2}};
  for (const auto& t : groups)
    for (int l = 1; l <= 4; ++l) {
      std::vector<Int> torsion(t.begin(), t.end());
      const AbelianStructure h(torsion, 0);
      const Int got = reduced_symmetric_count(h, l, 1, l);
      const std::int64_t want = test::reduced_symmetric_orbits(t, l);
      expect_eq(got, Int(want), "Burnside count for |H| = " + h.order().str() +
                                    ", l = " + std::to_string(l));
    }
}

void criterion5() {
  const Decomposition dec = decompose(FgAbelianGroup({2, 2}, 0), 2);
  expect_eq(dec.summand_count(), std::uint64_t(2), "summands of Rep((Z/2)^2, PU(2))");
  expect_eq(dec.total_pi0, Int(5), "total pi0 of Rep((Z/2)^2, PU(2))");

  const IrrepClassification cls =
      irreducible_projective_classes(FgAbelianGroup({2, 2}, 0), Int(2));
  expect_eq(cls.classes.size(), size_t(1), "degree-2 classes of (Z/2)^2");
  expect_eq(cls.classes[0].degree, Int(2), "Heisenberg class degree");
  expect_eq(cls.classes[0].linear_class_count, Int(1), "Heisenberg linear class count");
}

void criterion6() {
  for (std::int64_t m = 1; m <= 12; ++m) {
    const Decomposition dec = decompose(FgAbelianGroup({}, 2), m);
    std::int64_t points = 0;
    for (const auto& c : dec.summands)
      if (c.sigma == m) ++points;
    expect_eq(points, phi(m), "sigma = m summands of Rep(Z^2, PU(" + std::to_string(m) + "))");
  }
}

void criterion7() {
  auto t0 = std::chrono::steady_clock::now();
  for (int n = 1; n <= 3; ++n)
    for (std::int64_t m = 1; m <= 12; ++m)
      enumerate(
          n, m, WorkerPartition{}, kDefaultEnumerationCap,
          [m](const SkewMatrixZm& d) { return Int(m) % sigma(d) == 0; },
          [](const SkewMatrixZm& d) { check_constructor_contract(d); });

  std::mt19937 rng(20250810);
  int samples = 0;
  while (samples < 500) {
    const std::int64_t m = 1 + std::int64_t(rng() % 12);
    std::vector<std::int64_t> upper(6);
    for (auto& v : upper) v = std::int64_t(rng() % std::uint64_t(m));
    SkewMatrixZm d(4, m, std::move(upper));
    if (Int(m) % sigma(d) != 0) continue;
    check_constructor_contract(d);
    ++samples;
  }
  expect_runtime(seconds_since(t0), 300.0, "constructor contract sweep");
}

void criterion8() {
  std::mt19937 rng(424243);
  std::uniform_int_distribution<int> nd(1, 6);
  std::uniform_int_distribution<std::int64_t> md(1, 16);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = nd(rng);
    const std::int64_t m = md(rng);
    std::vector<std::int64_t> upper(size_t(n) * size_t(n - 1) / 2);
    for (auto& v : upper) v = std::int64_t(rng() % std::uint64_t(m));
    const SkewMatrixZm d(n, m, std::move(upper));
    const CanonicalSkewForm cf = canonical_form(d);

    expect(abs(determinant(cf.Q)) == 1, "det Q = +-1");
    // Q^T D Q == D_n(c) mod m
    IntMatrix qt(cf.Q.cols, cf.Q.rows);
    for (int i = 0; i < cf.Q.rows; ++i)
      for (int j = 0; j < cf.Q.cols; ++j) qt.at(j, i) = cf.Q.at(i, j);
    const IntMatrix prod = qt * d.lift() * cf.Q;
    const SkewMatrixZm block = canonical_block_matrix(n, m, cf.invariants);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Int v = prod.at(i, j) % m;
        if (v < 0) v += m;
        expect(v == block.at(i, j), "congruence round trip");
      }
    for (size_t k = 0; k + 1 < cf.orders.size(); ++k)
      expect(cf.orders[k] % cf.orders[k + 1] == 0, "order divisibility chain");
    expect(cf.product_of_orders() == sigma(d), "product of invariant orders = sigma");
  }
}

void criterion9() {
  expect(!g_cli_path.empty(), "CLI path required as argv[1]");
  const std::string base = "decompose --rank 4 --m 3 --format json --jobs ";
  const auto ref = test::run_cli(g_cli_path, base + "1");
  expect(ref.exit_code == 0, "decompose --jobs 1 must succeed");
  for (const char* jobs : {"2", "7"}) {
    const auto alt = test::run_cli(g_cli_path, base + jobs);
    expect(alt.exit_code == 0, std::string("decompose --jobs ") + jobs + " must succeed");
    expect(alt.out == ref.out,
           std::string("byte-identical output across worker counts (jobs=") + jobs + ")");
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli_path = argv[1];

  const std::vector<std::pair<std::string, std::function<void()>>> criteria = {
      {"N(2,m) = m for m <= 12, exhaustive, < 1s", criterion1},
      {"N(3,m) = m^3 for m <= 6, < 10s", criterion2},
      {"N(4,4) = 1184 with u(2) = 35, N(4,9) = 63909, formula vs brute force", criterion3},
      {"Burnside counts match direct orbit enumeration, |H| <= 8, l <= 4", criterion4},
      {"decompose((Z/2)^2, 2) and the Heisenberg irreducible class", criterion5},
      {"decompose(Z^2, m) has phi(m) point summands for m <= 12", criterion6},
      {"constructor contract: residuals, round trip, commutant, eigen cosets", criterion7},
      {"canonical form contract on 1000 random classes, n <= 6, m <= 16", criterion8},
      {"decompose output byte-identical across 1, 2, 7 workers", criterion9},
  };

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string error;
    try {
      criteria[i].second();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double dt = seconds_since(t0);
    if (error.empty()) {
      std::printf("PASS  criterion %zu: %s  (%.2fs)\n", i + 1, criteria[i].first.c_str(), dt);
    } else {
      ++failures;
      std::printf("FAIL  criterion %zu: %s  (%.2fs)\n      %s\n", i + 1,
                  criteria[i].first.c_str(), dt, error.c_str());
    }
    std::fflush(stdout);
  }
  if (failures != 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
