#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "repmod/errors.hpp"
#include "repmod/int_matrix.hpp"
#include "repmod/skew_forms.hpp"

namespace repmod {

/// Finitely generated abelian group presented as Z/k_1 + ... + Z/k_s + Z^rank.
/// Coordinates are taken literally; a divisibility-chain presentation is not
/// required and whether the input happens to be one is reported as a flag.
struct FgAbelianGroup {
  std::vector<std::int64_t> torsion;
  int rank = 0;

  FgAbelianGroup() = default;
  FgAbelianGroup(std::vector<std::int64_t> t, int r) : torsion(std::move(t)), rank(r) {
    for (std::int64_t k : torsion)
      if (k < 1) throw std::invalid_argument("torsion coefficients must be positive");
    if (rank < 0) throw std::invalid_argument("rank must be nonnegative");
  }

  int torsion_count() const { return int(torsion.size()); }
  int coordinate_count() const { return torsion_count() + rank; }
  bool finite() const { return rank == 0; }

  bool torsion_chain_normalized() const {
    for (size_t i = 0; i + 1 < torsion.size(); ++i)
      if (torsion[i + 1] % torsion[i] != 0) return false;
    return true;
  }

  Int torsion_order() const {
    Int o = 1;
    for (std::int64_t k : torsion) o *= k;
    return o;
  }

  /// lcm of the torsion coefficients (1 for free groups).
  std::int64_t exponent() const {
    Int e = 1;
    for (std::int64_t k : torsion) e = lcm(e, Int(k));
    if (e > SkewMatrixZm::kMaxModulus)
      throw EnumerationLimitError("group exponent " + e.str() + " is too large");
    return e.convert_to<std::int64_t>();
  }
};

namespace detail {

inline Int binomial(const Int& n, const Int& k) {
  if (k < 0 || n < 0 || k > n) return 0;
  Int out = 1;
  for (Int i = 1; i <= k; ++i) {
    out *= n - k + i;
    out /= i;  // exact: the partial product is a binomial coefficient
  }
  return out;
}

inline std::vector<std::int64_t> divisors_of(std::int64_t v) {
  std::vector<std::int64_t> small, large;
  for (std::int64_t i = 1; i * i <= v; ++i) {
    if (v % i != 0) continue;
    small.push_back(i);
    if (i != v / i) large.push_back(v / i);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

}  // namespace detail

/// |SP^l(H) / H| by Burnside's lemma: the translation by g fixes
/// binom((m + |H| sigma)/(|g| sigma) - 1, m/(|g| sigma)) multisets when
/// |g| sigma divides m and none otherwise. Element-order counts come from the
/// torsion coefficients, so H itself is never enumerated.
inline Int reduced_symmetric_count(const AbelianStructure& h, const Int& l, const Int& sigma_d,
                                   const Int& m) {
  if (h.free_rank != 0) throw std::invalid_argument("the translation group must be finite");
  if (l < 1 || sigma_d < 1 || l * sigma_d != m)
    throw std::invalid_argument("requires m = l * sigma");
  const Int order_h = h.order();
  if (order_h > Int(1'000'000'000'000))
    throw EnumerationLimitError("translation group is too large to analyse");
  const std::int64_t exponent = h.exponent().convert_to<std::int64_t>();

  const std::vector<std::int64_t> divs = detail::divisors_of(exponent);
  // elements of order dividing d, then exact-order counts by sieving
  std::vector<Int> dividing(divs.size()), exact(divs.size());
  for (size_t i = 0; i < divs.size(); ++i) {
    Int a = 1;
    for (const Int& t : h.torsion) a *= gcd(Int(divs[i]), t);
    dividing[i] = a;
  }
  for (size_t i = 0; i < divs.size(); ++i) {
    Int c = dividing[i];
    for (size_t j = 0; j < i; ++j)
      if (divs[i] % divs[j] == 0) c -= exact[j];
    exact[i] = c;
  }

  Int total = 0;
  for (size_t i = 0; i < divs.size(); ++i) {
    const Int dsig = Int(divs[i]) * sigma_d;
    if (m % dsig != 0) continue;
    total += exact[i] * detail::binomial((m + order_h * sigma_d) / dsig - 1, m / dsig);
  }
  if (total % order_h != 0)
    throw InternalInvariantError("Burnside sum " + total.str() +
                                 " is not divisible by the group order " + order_h.str());
  return total / order_h;
}

/// One summand of the decomposition of Rep(Gamma, PU(m)): the class label D,
/// its invariants, the torsion cokernel H, and the component count of the
/// summand.
struct ComponentDescriptor {
  SkewMatrixZm D;
  std::int64_t sigma = 1;
  std::int64_t multiplicity = 1;  // l = m / sigma
  std::vector<std::vector<std::int64_t>> rowspace_generators;
  std::vector<std::int64_t> coordinate_orders;  // r_i over all s+n coordinates
  AbelianStructure H;                           // coker(R(D) -> Tor(Gamma))
  Int pi0_count = 1;           // |SP^l(H)/H|, the summand's component count
  Int pi0_connected_reading = 1;  // value under the "connected summand" reading
  int base_free_rank = 0;

  /// True for mixed-rank summands where the two readings of the component
  /// count disagree; pi0_count follows the translation component group.
  bool pi0_readings_differ() const { return pi0_count != pi0_connected_reading; }
};

/// Builds the descriptor for an admissible class D; rejects inadmissible D
/// with the failed divisibility spelled out.
inline ComponentDescriptor describe_component(const FgAbelianGroup& gamma, std::int64_t m,
                                              const SkewMatrixZm& d) {
  const int s = gamma.torsion_count();
  if (d.n != gamma.coordinate_count())
    throw std::invalid_argument("matrix size must equal the group coordinate count");
  if (d.m != m) throw std::invalid_argument("matrix modulus must equal m");

  ComponentDescriptor out;
  out.D = d;
  out.base_free_rank = gamma.rank;

  const Int sig = sigma(d);
  if (Int(m) % sig != 0)
    throw InfeasibleError("sigma(D) = " + sig.str() + " does not divide m = " +
                          std::to_string(m) + "; the class is empty");
  out.sigma = sig.convert_to<std::int64_t>();
  out.multiplicity = m / out.sigma;
  out.coordinate_orders = skew_coordinate_orders(d);
  for (int i = 0; i < s; ++i)
    if (gamma.torsion[size_t(i)] % out.coordinate_orders[size_t(i)] != 0)
      throw InfeasibleError("r_" + std::to_string(i + 1) + "(D) = " +
                            std::to_string(out.coordinate_orders[size_t(i)]) +
                            " does not divide k_" + std::to_string(i + 1) + " = " +
                            std::to_string(gamma.torsion[size_t(i)]) +
                            "; the class is empty");
  out.rowspace_generators = d.rows_mod_m();

  // R(D) -> Tor(Gamma): coordinate i of Z/m embeds in S^1 as (1/m)Z/Z, so an
  // entry v maps to v*k_i/m in Z/k_i (an integer because r_i | k_i).
  std::vector<std::vector<Int>> images;
  std::vector<Int> moduli(gamma.torsion.begin(), gamma.torsion.begin() + s);
  for (const auto& row : out.rowspace_generators) {
    std::vector<Int> img(static_cast<size_t>(s), Int(0));
    for (int i = 0; i < s; ++i) {
      Int scaled = Int(row[size_t(i)]) * gamma.torsion[size_t(i)];
      if (scaled % m != 0)
        throw InternalInvariantError("row image is not integral despite r_i | k_i");
      img[size_t(i)] = (scaled / m) % gamma.torsion[size_t(i)];
    }
    images.push_back(std::move(img));
  }
  out.H = cokernel_structure(images, moduli);

  out.pi0_count = reduced_symmetric_count(out.H, Int(out.multiplicity), Int(out.sigma), Int(m));
  out.pi0_connected_reading = gamma.rank >= 1 ? Int(1) : out.pi0_count;
  return out;
}

/// Full decomposition of Rep(Gamma, PU(m)): one summand per admissible D, in
/// lexicographic order of the class label.
struct Decomposition {
  FgAbelianGroup gamma;
  std::int64_t m = 1;
  std::vector<ComponentDescriptor> summands;
  Int total_pi0 = 0;

  std::uint64_t summand_count() const { return summands.size(); }
};

inline std::vector<ComponentDescriptor> decompose_partition(
    const FgAbelianGroup& gamma, std::int64_t m, WorkerPartition part,
    std::uint64_t cap = kDefaultEnumerationCap) {
  std::vector<ComponentDescriptor> out;
  enumerate(
      gamma.coordinate_count(), m, part, cap,
      [&gamma](const SkewMatrixZm& d) { return is_admissible(d, gamma.torsion); },
      [&](const SkewMatrixZm& d) { out.push_back(describe_component(gamma, m, d)); });
  return out;
}

inline Decomposition assemble_decomposition(const FgAbelianGroup& gamma, std::int64_t m,
                                            std::vector<ComponentDescriptor> summands) {
  Decomposition dec;
  dec.gamma = gamma;
  dec.m = m;
  dec.summands = std::move(summands);
  for (const auto& c : dec.summands) dec.total_pi0 += c.pi0_count;
  return dec;
}

inline Decomposition decompose(const FgAbelianGroup& gamma, std::int64_t m,
                               std::uint64_t cap = kDefaultEnumerationCap) {
  return assemble_decomposition(gamma, m,
                                decompose_partition(gamma, m, WorkerPartition{0, 1}, cap));
}

/// Projective equivalence class of irreducible projective representations of
/// a finite abelian group: label D over Z/exponent, degree sigma(D), and the
/// number of linear-equivalence classes it contains.
struct IrrepClass {
  SkewMatrixZm D;
  Int degree = 1;
  Int linear_class_count = 1;
};

struct IrrepClassification {
  FgAbelianGroup gamma;
  std::int64_t enumeration_modulus = 1;  // exponent of the group
  std::vector<IrrepClass> classes;
};

/// Classifies irreducible projective representations of a finite Gamma.
/// Every relevant class is realised over Z/exponent(Gamma) because r_i | k_i
/// bounds all entry orders by the exponent. With degree_filter set, only
/// classes of that degree are returned.
inline IrrepClassification irreducible_projective_classes(
    const FgAbelianGroup& gamma, std::optional<Int> degree_filter = std::nullopt,
    std::uint64_t cap = kDefaultEnumerationCap) {
  if (!gamma.finite())
    throw std::invalid_argument("irreducible classification requires a finite group");
  // the trivial group is presented as Z/1
  const FgAbelianGroup g = gamma.torsion.empty() ? FgAbelianGroup({1}, 0) : gamma;
  IrrepClassification out;
  out.gamma = g;
  const int s = g.torsion_count();
  const std::int64_t m_eff = g.exponent();
  out.enumeration_modulus = m_eff;

  std::vector<Int> moduli(g.torsion.begin(), g.torsion.end());
  enumerate(
      s, m_eff, WorkerPartition{0, 1}, cap,
      [&g](const SkewMatrixZm& d) {
        auto r = skew_coordinate_orders(d);
        for (int i = 0; i < g.torsion_count(); ++i)
          if (g.torsion[size_t(i)] % r[size_t(i)] != 0) return false;
        return true;
      },
      [&](const SkewMatrixZm& d) {
        IrrepClass cls;
        cls.D = d;
        cls.degree = sigma(d);
        if (degree_filter && cls.degree != *degree_filter) return;
        std::vector<std::vector<Int>> images;
        for (const auto& row : d.rows_mod_m()) {
          std::vector<Int> img(static_cast<size_t>(s), Int(0));
          for (int i = 0; i < s; ++i)
            img[size_t(i)] = (Int(row[size_t(i)]) * g.torsion[size_t(i)] / m_eff) %
                             g.torsion[size_t(i)];
          images.push_back(std::move(img));
        }
        cls.linear_class_count = cokernel_structure(images, moduli).order();
        out.classes.push_back(std::move(cls));
      });
  return out;
}

/// Flat-bundle facts for spaces with fundamental group Z^n: N(n, m) flat
/// isomorphism classes always; every bundle class is flat exactly when
/// n <= 3, and non-flat bundles exist exactly when n >= 4 (for m >= 2).
struct FlatBundleReport {
  int n = 1;
  std::int64_t m = 1;
  std::uint64_t flat_classes = 1;
  bool all_bundles_flat = true;
  bool total_finite = true;
  Int total_bundle_classes = 1;  // meaningful only when total_finite
  bool nonflat_exists = false;
};

inline FlatBundleReport flat_bundle_report(int n, std::int64_t m,
                                           std::uint64_t cap = kDefaultEnumerationCap) {
  if (n < 1 || m < 1) throw std::invalid_argument("n and m must be positive");
  FlatBundleReport rep;
  rep.n = n;
  rep.m = m;
  if (m == 1) return rep;  // PU(1) is trivial: one bundle, flat
  rep.flat_classes = count_admissible(n, m, cap);
  rep.all_bundles_flat = n <= 3;
  rep.total_finite = n <= 3;
  rep.nonflat_exists = n >= 4;
  if (rep.total_finite)
    rep.total_bundle_classes = pow(Int(m), n * (n - 1) / 2);
  else
    rep.total_bundle_classes = 0;
  return rep;
}

}  // namespace repmod
