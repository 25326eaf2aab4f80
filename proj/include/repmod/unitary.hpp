#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "repmod/errors.hpp"
#include "repmod/moduli.hpp"
#include "repmod/skew_forms.hpp"

namespace repmod {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;

constexpr std::int64_t kMaxConstructDim = 4096;
constexpr std::int64_t kMaxCommutantDim = 512;
constexpr double kUnitarityTolPerDim = 1e-9;
constexpr double kDefaultVerifyTol = 1e-8;

inline Cplx unit_phase(double turns) {
  return std::polar(1.0, 2.0 * std::numbers::pi * turns);
}

/// diag(1, w, ..., w^{k-1}) with w = exp(2 pi i / k).
inline CMat clock(std::int64_t k) {
  if (k < 1) throw std::invalid_argument("clock size must be positive");
  CMat c = CMat::Zero(k, k);
  for (std::int64_t j = 0; j < k; ++j) c(j, j) = unit_phase(double(j) / double(k));
  return c;
}

/// Cyclic permutation sending basis vector e_j to e_{j+1 mod k}.
inline CMat shift(std::int64_t k) {
  if (k < 1) throw std::invalid_argument("shift size must be positive");
  CMat s = CMat::Zero(k, k);
  for (std::int64_t j = 0; j < k; ++j) s((j + 1) % k, j) = 1.0;
  return s;
}

/// Ordered tuple of unitary matrices of a common dimension.
struct UnitaryTuple {
  Eigen::Index dim = 1;
  std::vector<CMat> matrices;
  double unitarity_residual = 0.0;

  int count() const { return int(matrices.size()); }
};

inline UnitaryTuple make_unitary_tuple(std::vector<CMat> matrices) {
  if (matrices.empty()) throw std::invalid_argument("tuple must contain at least one matrix");
  UnitaryTuple t;
  t.dim = matrices[0].rows();
  double worst = 0.0;
  const CMat id = CMat::Identity(t.dim, t.dim);
  for (size_t i = 0; i < matrices.size(); ++i) {
    const CMat& a = matrices[i];
    if (a.rows() != t.dim || a.cols() != t.dim)
      throw std::invalid_argument("tuple matrices must be square of a common dimension");
    double res = (a * a.adjoint() - id).norm();
    if (res > kUnitarityTolPerDim * double(t.dim))
      throw VerificationError("matrix " + std::to_string(i + 1) + " is not unitary: residual " +
                              std::to_string(res));
    worst = std::max(worst, res);
  }
  t.matrices = std::move(matrices);
  t.unitarity_residual = worst;
  return t;
}

namespace detail {

inline CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline CMat matrix_power(const CMat& a, std::int64_t e) {
  const Eigen::Index n = a.rows();
  CMat base = e >= 0 ? a : CMat(a.adjoint());
  std::uint64_t k = e >= 0 ? std::uint64_t(e) : std::uint64_t(-(e + 1)) + 1;
  CMat out = CMat::Identity(n, n);
  while (k != 0) {
    if (k & 1) out = out * base;
    base = base * base;
    k >>= 1;
  }
  return out;
}

inline std::vector<double> eigen_phases(const CMat& a) {
  Eigen::ComplexEigenSolver<CMat> solver(a, false);
  std::vector<double> phases(size_t(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double t = std::arg(solver.eigenvalues()(i)) / (2.0 * std::numbers::pi);
    t -= std::floor(t);
    if (t >= 1.0) t = 0.0;
    phases[size_t(i)] = t;
  }
  return phases;
}

}  // namespace detail

/// D-commuting tuple in U(m), m = D.m: every commutator [A_i, A_j] equals
/// exp(2 pi i d_ij / m) I. Built as a clock/shift tensor model for the
/// canonical form, pulled back along Q^{-1} by monomial products, and for
/// l = m/sigma > 1 repeated as l diagonal blocks twisted by torus scalars
/// (phases given in turns; default: b/l on the first coordinate of block b).
/// With torsion (k_1..k_s) given, per-block scalars are adjusted so the
/// leading s coordinates have k_i-th-root eigenvalues, i.e. A_i^{k_i} = I.
inline UnitaryTuple construct_tuple(
    const SkewMatrixZm& d,
    std::optional<std::vector<std::vector<double>>> scalars = std::nullopt,
    std::optional<std::vector<std::int64_t>> torsion = std::nullopt) {
  const int q = d.n;
  const std::int64_t m = d.m;
  if (m > kMaxConstructDim)
    throw std::invalid_argument("construction supports m <= " + std::to_string(kMaxConstructDim));

  const Int sig_big = sigma(d);
  if (Int(m) % sig_big != 0)
    throw InfeasibleError("sigma(D) = " + sig_big.str() + " does not divide m = " +
                          std::to_string(m) + "; no D-commuting tuple exists in U(m)");
  const std::int64_t sig = sig_big.convert_to<std::int64_t>();
  const std::int64_t l = m / sig;

  const auto r = skew_coordinate_orders(d);
  if (torsion) {
    if (int(torsion->size()) > q)
      throw std::invalid_argument("more torsion coefficients than coordinates");
    for (size_t i = 0; i < torsion->size(); ++i) {
      if ((*torsion)[i] < 1) throw std::invalid_argument("torsion coefficients must be positive");
      if ((*torsion)[i] % r[i] != 0)
        throw InfeasibleError("r_" + std::to_string(i + 1) + "(D) = " + std::to_string(r[i]) +
                              " does not divide k_" + std::to_string(i + 1) + " = " +
                              std::to_string((*torsion)[i]) +
                              "; no such tuple satisfies A_i^{k_i} = I");
    }
  }
  if (scalars && std::int64_t(scalars->size()) != l)
    throw std::invalid_argument("expected " + std::to_string(l) + " torus scalar points");
  if (scalars)
    for (const auto& point : *scalars)
      if (int(point.size()) != q)
        throw std::invalid_argument("each torus point needs one phase per coordinate");

  const CanonicalSkewForm canon = canonical_form(d);
  const int t = canon.t();

  // tensor model for the canonical block form: factor k has dimension
  // |c_k|; coordinate k carries the shift, coordinate t+k the clock power
  // whose commutator phase is exactly c_k / m.
  std::vector<CMat> model(static_cast<size_t>(q));
  for (int j = 0; j < q; ++j) {
    CMat acc = CMat::Identity(1, 1);
    for (int k = 0; k < t; ++k) {
      const std::int64_t ord = canon.orders[size_t(k)];
      CMat factor;
      if (j == k) {
        factor = shift(ord);
      } else if (j == t + k) {
        const std::int64_t expnt = canon.invariants[size_t(k)] / (m / ord);  // c_k |c_k| / m
        factor = detail::matrix_power(clock(ord), expnt);
      } else {
        factor = CMat::Identity(ord, ord);
      }
      acc = detail::kron(acc, factor);
    }
    model[size_t(j)] = std::move(acc);
  }

  // pull back along Q^{-1}: A_j = prod_i model_i^{p_ij} realises D itself
  const IntMatrix p = unimodular_inverse(canon.Q);
  std::vector<CMat> block(static_cast<size_t>(q));
  for (int j = 0; j < q; ++j) {
    CMat acc = CMat::Identity(sig, sig);
    for (int i = 0; i < q; ++i) {
      const Int& e = p.at(i, j);
      if (e == 0) continue;
      acc = acc * detail::matrix_power(model[size_t(i)], e.convert_to<std::int64_t>());
    }
    block[size_t(j)] = std::move(acc);
  }

  std::vector<CMat> out(static_cast<size_t>(q));
  for (int j = 0; j < q; ++j) out[size_t(j)] = CMat::Zero(m, m);
  for (std::int64_t b = 0; b < l; ++b) {
    std::vector<CMat> twisted = block;
    for (int j = 0; j < q; ++j) {
      double turns = scalars ? (*scalars)[size_t(b)][size_t(j)]
                             : (j == 0 ? double(b) / double(l) : 0.0);
      if (turns != 0.0) twisted[size_t(j)] *= unit_phase(turns);
    }
    if (torsion) {
      for (size_t i = 0; i < torsion->size(); ++i) {
        const std::int64_t k_i = (*torsion)[i];
        auto phases = detail::eigen_phases(twisted[i]);
        const double base = *std::min_element(phases.begin(), phases.end());
        const double delta = base - std::round(base * double(k_i)) / double(k_i);
        if (delta != 0.0) twisted[i] *= unit_phase(-delta);
      }
    }
    for (int j = 0; j < q; ++j)
      out[size_t(j)].block(b * sig, b * sig, sig, sig) = twisted[size_t(j)];
  }
  return make_unitary_tuple(std::move(out));
}

/// Class of an almost-commuting tuple under the commutator-phase map, plus
/// the worst distance of any commutator from the root-of-unity scalar it was
/// snapped to.
struct ClassExtraction {
  SkewMatrixZm D;
  double max_commutator_residual = 0.0;
};

inline ClassExtraction extract_class(const UnitaryTuple& t, double tol = kDefaultVerifyTol) {
  const std::int64_t m = t.dim;
  const int q = t.count();
  const CMat id = CMat::Identity(t.dim, t.dim);
  SkewMatrixZm d(q, m);
  double worst = 0.0;

  std::vector<std::vector<std::int64_t>> snapped(size_t(q),
                                                 std::vector<std::int64_t>(size_t(q), 0));
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      if (i == j) continue;
      const CMat& a = t.matrices[size_t(i)];
      const CMat& b = t.matrices[size_t(j)];
      CMat k = a * b * a.adjoint() * b.adjoint();
      const Cplx gamma = k.trace() / double(t.dim);
      if (std::abs(gamma) < 0.5 || (k - gamma * id).norm() > tol)
        throw VerificationError("not almost-commuting: commutator [" + std::to_string(i + 1) +
                                "," + std::to_string(j + 1) + "] is not scalar within " +
                                std::to_string(tol));
      double turns = std::arg(gamma) / (2.0 * std::numbers::pi);
      turns -= std::floor(turns);
      const std::int64_t dij = std::llround(turns * double(m)) % m;
      const double res = (k - unit_phase(double(dij) / double(m)) * id).norm();
      if (res > tol)
        throw VerificationError(
            "indeterminate class: commutator [" + std::to_string(i + 1) + "," +
            std::to_string(j + 1) + "] is at distance " + std::to_string(res) +
            " from the nearest m-th root of unity scalar");
      worst = std::max(worst, res);
      snapped[size_t(i)][size_t(j)] = dij;
    }

  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j) {
      if ((snapped[size_t(i)][size_t(j)] + snapped[size_t(j)][size_t(i)]) % m != 0)
        throw VerificationError("indeterminate class: commutator phases of (" +
                                std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                ") are not skew-symmetric after snapping");
      if (i < j) d.upper[SkewMatrixZm::upper_index(q, i, j)] = snapped[size_t(i)][size_t(j)];
    }
  return ClassExtraction{std::move(d), worst};
}

/// Dimension of {X : X A_i = A_i X for all i}, the nullity of the stacked
/// Sylvester system on m^2 unknowns. Singular values inside [tol/10, 10 tol)
/// leave the nullity ambiguous and raise IllConditionedError instead of
/// guessing.
inline int commutant_dimension(const UnitaryTuple& t, double tol = kDefaultVerifyTol) {
  const Eigen::Index m = t.dim;
  if (m > kMaxCommutantDim)
    throw std::invalid_argument("commutant dimension supports m <= " +
                                std::to_string(kMaxCommutantDim));
  const Eigen::Index mm = m * m;
  CMat stacked(Eigen::Index(t.matrices.size()) * mm, mm);
  const CMat id = CMat::Identity(m, m);
  for (size_t i = 0; i < t.matrices.size(); ++i) {
    // vec(AX - XA) = (I (x) A - A^T (x) I) vec(X), column-major vec
    stacked.block(Eigen::Index(i) * mm, 0, mm, mm) =
        detail::kron(id, t.matrices[i]) - detail::kron(t.matrices[i].transpose(), id);
  }
  Eigen::BDCSVD<CMat> svd(stacked);
  int nullity = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    const double sv = svd.singularValues()(i);
    if (sv >= tol / 10.0 && sv < tol * 10.0)
      throw IllConditionedError("singular value " + std::to_string(sv) +
                                " is too close to the tolerance " + std::to_string(tol) +
                                " to decide the commutant dimension");
    if (sv < tol) ++nullity;
  }
  return nullity;
}

/// Eigenvalue coordinates of a tuple in the basic case sigma(D) = m: for each
/// coordinate j the spectrum of A_j is a full coset of the order-r_j root
/// subgroup with uniform multiplicities, and c_j is the smallest nonnegative
/// phase representative of that coset, in turns.
struct EigenCoordinates {
  std::vector<double> c;             // c_j in [0, 1/r_j)
  std::vector<std::int64_t> r;       // coordinate orders r_j(D)
};

inline EigenCoordinates eigen_invariants(const UnitaryTuple& t, const SkewMatrixZm& d,
                                         double tol = kDefaultVerifyTol) {
  if (d.n != t.count())
    throw std::invalid_argument("matrix count must equal the coordinate count of D");
  if (d.m != t.dim) throw std::invalid_argument("tuple dimension must equal the modulus of D");
  if (sigma(d) != d.m)
    throw std::invalid_argument("eigenvalue coordinates require sigma(D) = m");

  const std::int64_t m = d.m;
  EigenCoordinates out;
  out.r = skew_coordinate_orders(d);
  out.c.resize(size_t(d.n));
  for (int j = 0; j < d.n; ++j) {
    const std::int64_t rj = out.r[size_t(j)];
    const auto phases = detail::eigen_phases(t.matrices[size_t(j)]);

    Cplx align = 0.0;
    for (double p : phases) align += unit_phase(p * double(rj));
    if (std::abs(align) < 0.5 * double(m))
      throw VerificationError("eigenvalues of matrix " + std::to_string(j + 1) +
                              " do not lie in a single coset of the order-" +
                              std::to_string(rj) + " root subgroup");
    double c = std::arg(align) / (2.0 * std::numbers::pi * double(rj));
    c -= std::floor(c * double(rj)) / double(rj);  // representative in [0, 1/r_j)
    if (c >= 1.0 / double(rj)) c = 0.0;

    std::vector<std::int64_t> bucket(size_t(rj), 0);
    for (double p : phases) {
      const double rel = (p - c) * double(rj);
      const std::int64_t qidx = ((std::llround(rel) % rj) + rj) % rj;
      const double expected = c + double(qidx) / double(rj);
      if (std::abs(unit_phase(p) - unit_phase(expected)) > tol)
        throw VerificationError("eigenvalue of matrix " + std::to_string(j + 1) +
                                " is not within tolerance of the coset of the order-" +
                                std::to_string(rj) + " root subgroup");
      ++bucket[size_t(qidx)];
    }
    for (std::int64_t qidx = 0; qidx < rj; ++qidx)
      if (bucket[size_t(qidx)] * rj != m)
        throw VerificationError("eigenvalue multiplicities of matrix " + std::to_string(j + 1) +
                                " are not uniform across the coset");
    out.c[size_t(j)] = c;
  }
  return out;
}

}  // namespace repmod
