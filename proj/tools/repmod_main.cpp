// Command-line surface over the representation-moduli library: invariants of
// skew classes, component decompositions, projective irreducibles, flat-bundle
// counts, and construction/verification of almost-commuting unitary tuples.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "repmod/json_io.hpp"
#include "repmod/moduli.hpp"
#include "repmod/skew_forms.hpp"
#include "repmod/unitary.hpp"

namespace {

using namespace repmod;

enum ExitCode : int {
  kOk = 0,
  kBadInput = 1,
  kInfeasible = 2,
  kVerificationFailed = 3,
};

struct GlobalOptions {
  std::string format = "table";
  unsigned jobs = 1;
  std::uint64_t cap = kDefaultEnumerationCap;
  std::string cache_path;
  double tol = kDefaultVerifyTol;
};

struct SkewInput {
  std::string file;
  int n = 0;
  std::int64_t m = 0;
  std::vector<std::int64_t> upper;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--file", file, "skew matrix as a JSON file");
    cmd->add_option("--n", n, "matrix size for an inline matrix");
    cmd->add_option("--m", m, "modulus for an inline matrix");
    cmd->add_option("--upper", upper, "upper-triangle entries, lexicographic (i,j) order")
        ->delimiter(',');
  }

  SkewMatrixZm resolve() const {
    if (!file.empty()) {
      std::ifstream in(file);
      if (!in) throw std::invalid_argument("cannot open " + file);
      Json j = Json::parse(in);
      return skew_from_json(j);
    }
    if (n == 0) throw std::invalid_argument("provide either --file or --n/--m/--upper");
    return SkewMatrixZm(n, m, upper);
  }
};

std::string format_int_list(const std::vector<std::int64_t>& v) {
  std::string out = "(";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(v[i]);
  }
  return out + ")";
}

void emit(const OrderedJson& doc) { std::cout << doc.dump(2) << "\n"; }

std::string key_value_csv(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string out = "key,value\n";
  for (const auto& [k, v] : rows) out += k + ',' + v + '\n';
  return out;
}

// ---------------------------------------------------------------------------
// result cache for enumeration-backed counts

class CountCache {
 public:
  static constexpr int kSchemaVersion = 1;

  explicit CountCache(std::string path) : path_(std::move(path)) {
    if (path_.empty()) return;
    std::ifstream in(path_);
    if (!in) return;
    try {
      Json j = Json::parse(in);
      if (j.value("schema_version", 0) == kSchemaVersion && j.contains("counts"))
        counts_ = j.at("counts");
    } catch (const Json::exception&) {
      // unreadable cache: start fresh
    }
  }

  std::optional<std::uint64_t> lookup(const std::string& key) const {
    if (path_.empty() || !counts_.contains(key)) return std::nullopt;
    return counts_.at(key).get<std::uint64_t>();
  }

  void store(const std::string& key, std::uint64_t value) {
    if (path_.empty()) return;
    counts_[key] = value;
    OrderedJson out{{"schema_version", kSchemaVersion}, {"counts", counts_}};
    std::ofstream of(path_);
    of << out.dump(2) << "\n";
  }

 private:
  std::string path_;
  Json counts_ = Json::object();
};

// ---------------------------------------------------------------------------
// worker fan-out; merging is ordered by worker index, so the output is
// independent of the worker count

std::uint64_t parallel_count(int n, std::int64_t m, const GlobalOptions& opt) {
  const unsigned jobs = std::max(1u, opt.jobs);
  if (jobs == 1) return count_admissible(n, m, opt.cap);
  std::vector<std::uint64_t> partial(jobs, 0);
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> threads;
  for (unsigned w = 0; w < jobs; ++w)
    threads.emplace_back([&, w] {
      try {
        partial[w] = count_admissible_partition(n, m, WorkerPartition{w, jobs}, opt.cap);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : threads) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::uint64_t total = 0;
  for (std::uint64_t p : partial) total += p;
  return total;
}

Decomposition parallel_decompose(const FgAbelianGroup& gamma, std::int64_t m,
                                 const GlobalOptions& opt) {
  const unsigned jobs = std::max(1u, opt.jobs);
  if (jobs == 1) return decompose(gamma, m, opt.cap);
  std::vector<std::vector<ComponentDescriptor>> partial(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> threads;
  for (unsigned w = 0; w < jobs; ++w)
    threads.emplace_back([&, w] {
      try {
        partial[w] = decompose_partition(gamma, m, WorkerPartition{w, jobs}, opt.cap);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : threads) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<ComponentDescriptor> merged;
  for (auto& p : partial) merged.insert(merged.end(), std::make_move_iterator(p.begin()),
                                        std::make_move_iterator(p.end()));
  return assemble_decomposition(gamma, m, std::move(merged));
}

// ---------------------------------------------------------------------------
// subcommands

void run_sigma(const SkewInput& input, const GlobalOptions& opt) {
  const SkewMatrixZm d = input.resolve();
  const Int rorder = row_space_order(d.lift(), d.m);
  const Int sig = sigma(d);
  const auto r = skew_coordinate_orders(d);
  const CanonicalSkewForm canon = canonical_form(d);
  const bool admissible = Int(d.m) % sig == 0;

  if (opt.format == "json") {
    OrderedJson out{{"n", d.n},       {"m", d.m},
                    {"sigma", int_to_json(sig)},
                    {"r", r},
                    {"row_space_order", int_to_json(rorder)},
                    {"canonical", OrderedJson{{"t", canon.t()},
                                              {"c", canon.invariants},
                                              {"orders", canon.orders}}},
                    {"admissible", admissible}};
    emit(out);
  } else if (opt.format == "csv") {
    std::cout << key_value_csv({{"sigma", sig.str()},
                                {"r", repmod::detail::join_space(r)},
                                {"row_space_order", rorder.str()},
                                {"canonical_c", repmod::detail::join_space(canon.invariants)},
                                {"canonical_orders", repmod::detail::join_space(canon.orders)},
                                {"admissible", admissible ? "true" : "false"}});
  } else {
    std::cout << "sigma(D)   = " << sig << "\n"
              << "r_i(D)     = " << format_int_list(r) << "\n"
              << "|R(D)|     = " << rorder << "\n"
              << "canonical  : t = " << canon.t() << ", c = " << format_int_list(canon.invariants)
              << ", orders = " << format_int_list(canon.orders) << "\n"
              << "admissible for m = " << d.m << ": " << (admissible ? "yes" : "no") << "\n";
  }
}

void run_canon(const SkewInput& input, const GlobalOptions& opt) {
  const SkewMatrixZm d = input.resolve();
  const CanonicalSkewForm canon = canonical_form(d);
  OrderedJson qrows = OrderedJson::array();
  for (int i = 0; i < canon.Q.rows; ++i) {
    OrderedJson row = OrderedJson::array();
    for (int j = 0; j < canon.Q.cols; ++j) row.push_back(int_to_json(canon.Q.at(i, j)));
    qrows.push_back(std::move(row));
  }
  if (opt.format == "json") {
    emit(OrderedJson{{"n", d.n},
                     {"m", d.m},
                     {"t", canon.t()},
                     {"c", canon.invariants},
                     {"orders", canon.orders},
                     {"sigma", int_to_json(canon.product_of_orders())},
                     {"Q", std::move(qrows)}});
  } else if (opt.format == "csv") {
    std::cout << key_value_csv({{"t", std::to_string(canon.t())},
                                {"c", repmod::detail::join_space(canon.invariants)},
                                {"orders", repmod::detail::join_space(canon.orders)},
                                {"sigma", canon.product_of_orders().str()}});
  } else {
    std::cout << "t = " << canon.t() << ", c = " << format_int_list(canon.invariants)
              << ", orders = " << format_int_list(canon.orders) << "\n"
              << "Q =\n";
    for (int i = 0; i < canon.Q.rows; ++i) {
      for (int j = 0; j < canon.Q.cols; ++j) std::cout << "  " << canon.Q.at(i, j);
      std::cout << "\n";
    }
  }
}

void run_count(int n, std::int64_t m, const GlobalOptions& opt) {
  CountCache cache(opt.cache_path);
  const std::string key = "N(" + std::to_string(n) + "," + std::to_string(m) + ")";
  std::uint64_t value;
  if (auto hit = cache.lookup(key)) {
    value = *hit;
  } else {
    value = parallel_count(n, m, opt);
    cache.store(key, value);
  }
  if (opt.format == "json")
    emit(OrderedJson{{"n", n}, {"m", m}, {"N", value}});
  else if (opt.format == "csv")
    std::cout << key_value_csv({{key, std::to_string(value)}});
  else
    std::cout << key << " = " << value << "\n";
}

void run_decompose(const std::vector<std::int64_t>& torsion, int rank, std::int64_t m,
                   const GlobalOptions& opt) {
  const FgAbelianGroup gamma(torsion, rank);
  const Decomposition dec = parallel_decompose(gamma, m, opt);
  if (opt.format == "json") {
    emit(decomposition_to_json(dec));
  } else if (opt.format == "csv") {
    std::cout << decomposition_to_csv(dec);
  } else {
    std::cout << "Rep(Gamma, PU(" << m << ")) with torsion " << format_int_list(gamma.torsion)
              << " and rank " << gamma.rank << ":\n"
              << "  summands  : " << dec.summand_count() << "\n"
              << "  total pi0 : " << dec.total_pi0 << "\n";
    for (const ComponentDescriptor& c : dec.summands) {
      std::cout << "  D = " << format_int_list(c.D.upper) << "  sigma = " << c.sigma
                << "  l = " << c.multiplicity << "  pi0 = " << c.pi0_count;
      if (c.pi0_readings_differ())
        std::cout << "  [mixed rank: connected-base reading would give "
                  << c.pi0_connected_reading << "]";
      std::cout << "\n";
    }
  }
}

void run_irreps(const std::vector<std::int64_t>& torsion, std::optional<std::int64_t> degree,
                const GlobalOptions& opt) {
  std::optional<Int> filter;
  if (degree) filter = Int(*degree);
  const IrrepClassification cls =
      irreducible_projective_classes(FgAbelianGroup(torsion, 0), filter, opt.cap);
  if (opt.format == "json") {
    emit(irreps_to_json(cls));
  } else if (opt.format == "csv") {
    std::cout << irreps_to_csv(cls);
  } else {
    std::cout << "irreducible projective classes of the group with torsion "
              << format_int_list(cls.gamma.torsion) << " (enumerated over Z/"
              << cls.enumeration_modulus << "):\n";
    for (const IrrepClass& c : cls.classes)
      std::cout << "  D = " << format_int_list(c.D.upper) << "  degree = " << c.degree
                << "  linear classes = " << c.linear_class_count << "\n";
    std::cout << "  total: " << cls.classes.size() << "\n";
  }
}

void run_bundles(int n, std::int64_t m, const GlobalOptions& opt) {
  const FlatBundleReport rep = flat_bundle_report(n, m, opt.cap);
  if (opt.format == "json") {
    emit(bundle_report_to_json(rep));
  } else if (opt.format == "csv") {
    std::cout << key_value_csv(
        {{"flat_classes", std::to_string(rep.flat_classes)},
         {"all_bundles_flat", rep.all_bundles_flat ? "true" : "false"},
         {"total_bundle_classes",
          rep.total_finite ? rep.total_bundle_classes.str() : std::string("infinite")},
         {"nonflat_exists", rep.nonflat_exists ? "true" : "false"}});
  } else {
    std::cout << "flat PU(" << m << ") bundle classes over spaces with fundamental group Z^" << n
              << ": " << rep.flat_classes << "\n"
              << "all bundle classes flat: " << (rep.all_bundles_flat ? "yes" : "no") << "\n"
              << "total bundle classes   : "
              << (rep.total_finite ? rep.total_bundle_classes.str() : std::string("infinite"))
              << "\n"
              << "non-flat bundles exist : " << (rep.nonflat_exists ? "yes" : "no") << "\n";
  }
}

std::vector<std::vector<double>> parse_scalars(const std::string& text) {
  std::vector<std::vector<double>> out;
  std::stringstream points(text);
  std::string point;
  while (std::getline(points, point, ';')) {
    std::vector<double> turns;
    std::stringstream fields(point);
    std::string field;
    while (std::getline(fields, field, ',')) turns.push_back(std::stod(field));
    out.push_back(std::move(turns));
  }
  return out;
}

void run_construct(const SkewInput& input, const std::string& scalars_text,
                   const std::vector<std::int64_t>& torsion, const std::string& out_path) {
  const SkewMatrixZm d = input.resolve();
  std::optional<std::vector<std::vector<double>>> scalars;
  if (!scalars_text.empty()) scalars = parse_scalars(scalars_text);
  std::optional<std::vector<std::int64_t>> tors;
  if (!torsion.empty()) tors = torsion;
  const UnitaryTuple t = construct_tuple(d, scalars, tors);
  const OrderedJson doc = tuple_to_json(t);
  if (out_path.empty() || out_path == "-") {
    emit(doc);
  } else {
    std::ofstream of(out_path);
    if (!of) throw std::invalid_argument("cannot write " + out_path);
    of << doc.dump(2) << "\n";
    std::cout << "wrote " << t.count() << " matrices of dimension " << t.dim << " to " << out_path
              << "\n";
  }
}

void run_verify(const std::string& tuple_path, const GlobalOptions& opt) {
  std::ifstream in(tuple_path);
  if (!in) throw std::invalid_argument("cannot open " + tuple_path);
  const Json j = Json::parse(in);
  const UnitaryTuple t = tuple_from_json(j);

  const ClassExtraction ext = extract_class(t, opt.tol);
  const Int sig = sigma(ext.D);
  const bool basic_case = sig == Int(t.dim);

  std::optional<int> commutant;
  if (t.dim <= kMaxCommutantDim) {
    commutant = commutant_dimension(t, opt.tol);
    if (basic_case && *commutant != 1)
      throw VerificationError("commutant dimension " + std::to_string(*commutant) +
                              " contradicts the scalar commutant required when sigma(D) = m");
  }
  std::optional<EigenCoordinates> eigen;
  if (basic_case) eigen = eigen_invariants(t, ext.D, opt.tol);

  if (opt.format == "json") {
    OrderedJson out{{"m", t.dim},
                    {"count", t.count()},
                    {"unitarity_residual", t.unitarity_residual},
                    {"class", skew_to_json(ext.D)},
                    {"max_commutator_residual", ext.max_commutator_residual},
                    {"sigma", int_to_json(sig)}};
    out["commutant_dimension"] = commutant ? OrderedJson(*commutant) : OrderedJson(nullptr);
    if (eigen)
      out["eigen"] = OrderedJson{{"r", eigen->r}, {"c", eigen->c}};
    else
      out["eigen"] = nullptr;
    out["pass"] = true;
    emit(out);
  } else {
    std::cout << "class D                : " << format_int_list(ext.D.upper) << " over Z/"
              << t.dim << "\n"
              << "sigma(D)               : " << sig << "\n"
              << "unitarity residual     : " << t.unitarity_residual << "\n"
              << "commutator residual    : " << ext.max_commutator_residual << "\n";
    if (commutant) std::cout << "commutant dimension    : " << *commutant << "\n";
    if (eigen)
      std::cout << "eigen coset orders     : " << format_int_list(eigen->r) << "\n";
    std::cout << "verdict                : pass\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moduli of projective unitary representations of finitely generated abelian groups"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions opt;
  app.add_option("--format", opt.format, "output format")
      ->check(CLI::IsMember({"json", "csv", "table"}))
      ->capture_default_str();
  app.add_option("--jobs", opt.jobs, "worker count for enumeration-backed commands")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--cap", opt.cap, "enumeration candidate cap")->capture_default_str();
  app.add_option("--cache", opt.cache_path, "JSON cache file for counts");
  app.add_option("--tol", opt.tol, "numerical tolerance for verification")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  SkewInput sigma_input, canon_input, construct_input;
  int count_n = 0, bundles_n = 0, decompose_rank = 0;
  std::int64_t count_m = 0, bundles_m = 0, decompose_m = 0;
  std::vector<std::int64_t> decompose_torsion, irreps_torsion, construct_torsion;
  std::int64_t irreps_degree = 0;
  std::string construct_scalars, construct_out = "-", verify_file;

  CLI::App* c_sigma = app.add_subcommand("sigma", "invariants of a skew class");
  sigma_input.add_options(c_sigma);

  CLI::App* c_canon = app.add_subcommand("canon", "canonical form of a skew class");
  canon_input.add_options(c_canon);

  CLI::App* c_count = app.add_subcommand("count", "N(n, m), the admissible class count");
  c_count->add_option("n", count_n, "free rank")->required();
  c_count->add_option("m", count_m, "PU(m) dimension")->required();

  CLI::App* c_dec = app.add_subcommand("decompose", "component decomposition of Rep(Gamma, PU(m))");
  c_dec->add_option("--torsion", decompose_torsion, "torsion coefficients of Gamma")
      ->delimiter(',');
  c_dec->add_option("--rank", decompose_rank, "free rank of Gamma");
  c_dec->add_option("--m", decompose_m, "PU(m) dimension")->required();

  CLI::App* c_irr = app.add_subcommand("irreps", "irreducible projective classes of a finite group");
  c_irr->add_option("--torsion", irreps_torsion, "torsion coefficients of Gamma")->delimiter(',');
  CLI::Option* degree_opt = c_irr->add_option("--degree", irreps_degree, "restrict to one degree");

  CLI::App* c_bun = app.add_subcommand("bundles", "flat bundle classes over a space with pi_1 = Z^n");
  c_bun->add_option("n", bundles_n, "free rank")->required();
  c_bun->add_option("m", bundles_m, "PU(m) dimension")->required();

  CLI::App* c_con = app.add_subcommand("construct", "build a D-commuting unitary tuple");
  construct_input.add_options(c_con);
  c_con->add_option("--scalars", construct_scalars,
                    "torus twists in turns: per-block lists 'a,b;c,d'");
  c_con->add_option("--torsion", construct_torsion, "group torsion constraint A_i^{k_i} = I")
      ->delimiter(',');
  c_con->add_option("--out", construct_out, "output file, '-' for stdout");

  CLI::App* c_ver = app.add_subcommand("verify", "verify a tuple file and extract its class");
  c_ver->add_option("file", verify_file, "tuple JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    if (*c_sigma) run_sigma(sigma_input, opt);
    if (*c_canon) run_canon(canon_input, opt);
    if (*c_count) run_count(count_n, count_m, opt);
    if (*c_dec) run_decompose(decompose_torsion, decompose_rank, decompose_m, opt);
    if (*c_irr)
      run_irreps(irreps_torsion,
                 degree_opt->count() ? std::optional<std::int64_t>(irreps_degree) : std::nullopt,
                 opt);
    if (*c_bun) run_bundles(bundles_n, bundles_m, opt);
    if (*c_con) run_construct(construct_input, construct_scalars, construct_torsion, construct_out);
    if (*c_ver) run_verify(verify_file, opt);
  } catch (const EnumerationLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInfeasible;
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInfeasible;
  } catch (const VerificationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerificationFailed;
  } catch (const IllConditionedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerificationFailed;
  } catch (const Json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
  return kOk;
}
