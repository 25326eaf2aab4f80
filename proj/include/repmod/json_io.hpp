#pragma once

#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"
#include "repmod/moduli.hpp"
#include "repmod/skew_forms.hpp"
#include "repmod/unitary.hpp"

namespace repmod {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

/// Plain number when it fits a 64-bit integer, decimal string beyond that.
inline OrderedJson int_to_json(const Int& v) {
  if (v >= 0 && v <= Int(std::numeric_limits<std::uint64_t>::max()))
    return v.convert_to<std::uint64_t>();
  if (v < 0 && v >= Int(std::numeric_limits<std::int64_t>::min()))
    return v.convert_to<std::int64_t>();
  return v.str();
}

inline OrderedJson skew_to_json(const SkewMatrixZm& d) {
  return OrderedJson{{"n", d.n}, {"m", d.m}, {"upper", d.upper}};
}

inline SkewMatrixZm skew_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("m") || !j.contains("upper"))
    throw std::invalid_argument(R"(skew matrix JSON needs fields "n", "m", "upper")");
  return SkewMatrixZm(j.at("n").get<int>(), j.at("m").get<std::int64_t>(),
                      j.at("upper").get<std::vector<std::int64_t>>());
}

/// Tuple wire format: dimension, matrix count, and per matrix a flat
/// row-major array of interleaved real/imaginary parts.
inline OrderedJson tuple_to_json(const UnitaryTuple& t) {
  OrderedJson out{{"m", t.dim}, {"count", t.count()}};
  OrderedJson mats = OrderedJson::array();
  for (const CMat& a : t.matrices) {
    OrderedJson flat = OrderedJson::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        flat.push_back(a(i, j).real());
        flat.push_back(a(i, j).imag());
      }
    mats.push_back(std::move(flat));
  }
  out["matrices"] = std::move(mats);
  return out;
}

inline UnitaryTuple tuple_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("m") || !j.contains("count") || !j.contains("matrices"))
    throw std::invalid_argument(R"(tuple JSON needs fields "m", "count", "matrices")");
  const Eigen::Index m = j.at("m").get<Eigen::Index>();
  const size_t count = j.at("count").get<size_t>();
  if (m < 1) throw std::invalid_argument("tuple dimension must be positive");
  const auto& mats = j.at("matrices");
  if (!mats.is_array() || mats.size() != count)
    throw std::invalid_argument("matrix count does not match the \"count\" field");
  std::vector<CMat> out;
  out.reserve(count);
  for (const auto& flat : mats) {
    if (!flat.is_array() || Eigen::Index(flat.size()) != 2 * m * m)
      throw std::invalid_argument("each matrix needs 2*m*m interleaved entries");
    CMat a(m, m);
    size_t pos = 0;
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index jj = 0; jj < m; ++jj) {
        double re = flat.at(pos++).get<double>();
        double im = flat.at(pos++).get<double>();
        a(i, jj) = Cplx(re, im);
      }
    out.push_back(std::move(a));
  }
  return make_unitary_tuple(std::move(out));
}

inline OrderedJson decomposition_to_json(const Decomposition& dec) {
  OrderedJson gamma{{"torsion", dec.gamma.torsion}, {"rank", dec.gamma.rank}};
  OrderedJson summands = OrderedJson::array();
  for (const ComponentDescriptor& c : dec.summands) {
    OrderedJson s;
    s["D"] = skew_to_json(c.D);
    s["sigma"] = c.sigma;
    s["l"] = c.multiplicity;
    s["r"] = c.coordinate_orders;
    OrderedJson ht = OrderedJson::array();
    for (const Int& t : c.H.torsion) ht.push_back(int_to_json(t));
    s["H"] = OrderedJson{{"torsion", std::move(ht)}};
    s["pi0"] = int_to_json(c.pi0_count);
    summands.push_back(std::move(s));
  }
  return OrderedJson{{"gamma", std::move(gamma)},
                     {"m", dec.m},
                     {"summands", std::move(summands)},
                     {"summand_count", dec.summand_count()},
                     {"total_pi0", int_to_json(dec.total_pi0)}};
}

namespace detail {

template <class Range>
std::string join_space(const Range& values) {
  std::string out;
  bool first = true;
  for (const auto& v : values) {
    if (!first) out += ' ';
    first = false;
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Int>)
      out += v.str();
    else
      out += std::to_string(v);
  }
  return out;
}

}  // namespace detail

inline std::string decomposition_to_csv(const Decomposition& dec) {
  std::string out = "D_upper,sigma,l,r,H_torsion,pi0\n";
  for (const ComponentDescriptor& c : dec.summands) {
    out += detail::join_space(c.D.upper);
    out += ',' + std::to_string(c.sigma);
    out += ',' + std::to_string(c.multiplicity);
    out += ',' + detail::join_space(c.coordinate_orders);
    out += ',' + detail::join_space(c.H.torsion);
    out += ',' + c.pi0_count.str();
    out += '\n';
  }
  return out;
}

inline OrderedJson irreps_to_json(const IrrepClassification& cls) {
  OrderedJson classes = OrderedJson::array();
  for (const IrrepClass& c : cls.classes)
    classes.push_back(OrderedJson{{"D", skew_to_json(c.D)},
                                  {"degree", int_to_json(c.degree)},
                                  {"linear_classes", int_to_json(c.linear_class_count)}});
  return OrderedJson{{"gamma", OrderedJson{{"torsion", cls.gamma.torsion}}},
                     {"modulus", cls.enumeration_modulus},
                     {"classes", std::move(classes)},
                     {"class_count", cls.classes.size()}};
}

inline std::string irreps_to_csv(const IrrepClassification& cls) {
  std::string out = "D_upper,degree,linear_classes\n";
  for (const IrrepClass& c : cls.classes) {
    out += detail::join_space(c.D.upper);
    out += ',' + c.degree.str();
    out += ',' + c.linear_class_count.str();
    out += '\n';
  }
  return out;
}

inline OrderedJson bundle_report_to_json(const FlatBundleReport& r) {
  OrderedJson out{{"n", r.n},
                  {"m", r.m},
                  {"flat_classes", r.flat_classes},
                  {"all_bundles_flat", r.all_bundles_flat}};
  if (r.total_finite)
    out["total_bundle_classes"] = int_to_json(r.total_bundle_classes);
  else
    out["total_bundle_classes"] = "infinite";
  out["nonflat_exists"] = r.nonflat_exists;
  return out;
}

}  // namespace repmod
