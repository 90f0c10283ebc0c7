#include "entlen/scan.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "entlen/araki.hpp"
#include "entlen/certificate_io.hpp"
#include "entlen/model_io.hpp"
#include "json_matrix.hpp"

namespace entlen {
namespace {

using detail::json;

// a <= b with the same relative slack used by the partition-ratio checks.
bool leq(double a, double b) { return a <= b + 1e-12 * (1.0 + std::abs(b)); }

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError("complex values are numbers or [re, im] pairs");
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

std::vector<int> int_list(const json& j, const char* name) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(std::string("'") + name + "' must be a nonempty list of integers");
  }
  std::vector<int> out;
  for (const json& v : j) {
    if (!v.is_number_integer()) throw ConfigError(std::string("'") + name + "' must hold integers");
    out.push_back(v.get<int>());
  }
  return out;
}

void require_only(const json& j, std::initializer_list<std::string_view> keys, const char* where) {
  for (const auto& [k, v] : j.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      throw ConfigError(std::string("unknown key '") + k + "' in " + where);
    }
  }
}

std::string model_id(const ModelSpec& spec) {
  std::ostringstream os;
  os << spec.family;
  if (spec.family == "random") os << "-s" << spec.seed;
  return os.str();
}

Matrix random_complex(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex{normal(rng), normal(rng)};
  return m;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const ScanConfig& cfg, std::string_view command)
      : path_(path), out_(path) {
    if (!out_) throw ResourceError("cannot open output file " + path.string());
    out_ << "# entlen " << version() << "\n"
         << "# command: " << command << "\n"
         << "# config_hash: " << config_hash(cfg) << "\n"
         << "# seed: " << cfg.seed << "\n";
  }

  void comment(const std::string& line) { out_ << "# " << line << "\n"; }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::string fd(double v) { return format_double(v); }
std::string fi(long long v) { return std::to_string(v); }

std::filesystem::path prepare(const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ResourceError("cannot create output directory " + out_dir.string());
  return out_dir;
}

// Groups geometry indices by (|A|, |C|) in grid order.
std::map<std::pair<int, int>, std::vector<std::size_t>> by_ac(const std::vector<Geometry>& grid) {
  std::map<std::pair<int, int>, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < grid.size(); ++i) out[{grid[i].a, grid[i].c}].push_back(i);
  return out;
}

}  // namespace

const char* version() {
#ifdef ENTLEN_VERSION
  return ENTLEN_VERSION;
#else
  return "unknown";
#endif
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const ResourceError*>(&e)) return kExitResource;
  return kExitProperty;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Config

ScanConfig parse_scan_config(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  require_only(j,
               {"model", "model_file", "geometry", "k_range", "k0", "s", "s_grid", "g_sizes",
                "tolerances", "seed", "jobs", "budget", "suite", "output"},
               "config");
  ScanConfig cfg;
  try {
    if (j.contains("model") == j.contains("model_file")) {
      throw ConfigError("config needs exactly one of 'model' and 'model_file'");
    }
    if (j.contains("model")) {
      json m = j.at("model");
      if (!m.is_object()) throw ConfigError("'model' must be an object");
      if (!m.contains("sites")) m["sites"] = 1;  // replaced per grid point
      cfg.model = parse_model_spec(m.dump());
    } else {
      std::filesystem::path p = j.at("model_file").get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      cfg.model = load_model_file(p);
    }

    if (j.contains("geometry")) {
      const json& g = j.at("geometry");
      require_only(g, {"A", "B", "C"}, "geometry");
      if (g.contains("A")) cfg.sizes_a = int_list(g.at("A"), "geometry.A");
      if (g.contains("B")) cfg.sizes_b = int_list(g.at("B"), "geometry.B");
      if (g.contains("C")) cfg.sizes_c = int_list(g.at("C"), "geometry.C");
    }
    if (j.contains("k_range")) {
      const std::vector<int> kr = int_list(j.at("k_range"), "k_range");
      if (kr.size() != 2) throw ConfigError("'k_range' is [k_min, k_max]");
      cfg.k_range = std::pair{kr[0], kr[1]};
    }
    if (j.contains("k0") && !j.at("k0").is_null()) {
      if (!j.at("k0").is_number_integer()) throw ConfigError("'k0' must be an integer");
      cfg.k0 = j.at("k0").get<int>();
    }
    if (j.contains("s")) cfg.s = complex_from_json(j.at("s"));
    if (j.contains("s_grid")) {
      if (!j.at("s_grid").is_array() || j.at("s_grid").empty()) {
        throw ConfigError("'s_grid' must be a nonempty list");
      }
      cfg.s_grid.clear();
      for (const json& v : j.at("s_grid")) cfg.s_grid.push_back(complex_from_json(v));
    }
    if (j.contains("g_sizes")) cfg.g_sizes = int_list(j.at("g_sizes"), "g_sizes");
    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      if (!t.is_object()) throw ConfigError("'tolerances' must be an object");
      for (const auto& [k, v] : t.items()) {
        if (!cfg.tolerances.count(k)) throw ConfigError("unknown tolerance '" + k + "'");
        if (!v.is_number()) throw ConfigError("tolerance '" + k + "' must be a number");
        cfg.tolerances[k] = v.get<double>();
      }
    }
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned()) throw ConfigError("'seed' must be a nonnegative integer");
      cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("jobs")) {
      if (!j.at("jobs").is_number_integer()) throw ConfigError("'jobs' must be an integer");
      cfg.jobs = j.at("jobs").get<int>();
    }
    if (j.contains("budget")) {
      if (!j.at("budget").is_number_unsigned()) throw ConfigError("'budget' must be a positive integer");
      cfg.budget = j.at("budget").get<std::size_t>();
    }
    if (j.contains("suite")) {
      const json& s = j.at("suite");
      require_only(s, {"instances", "max_sites"}, "suite");
      if (s.contains("instances")) cfg.suite.instances = s.at("instances").get<int>();
      if (s.contains("max_sites")) cfg.suite.max_sites = s.at("max_sites").get<int>();
    }
    if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

ScanConfig load_scan_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scan_config(ss.str(), path.parent_path());
}

void validate(const ScanConfig& cfg) {
  for (const auto* sizes : {&cfg.sizes_a, &cfg.sizes_b, &cfg.sizes_c}) {
    if (sizes->empty()) throw ConfigError("geometry lists must be nonempty");
    for (int v : *sizes) {
      if (v < 1) throw ConfigError("all region sizes must be >= 1");
    }
  }
  for (const auto& [k, v] : cfg.tolerances) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError("tolerance '" + k + "' must be positive and finite");
    }
  }
  if (cfg.jobs < 1) throw ConfigError("'jobs' must be >= 1");
  if (cfg.budget < 1) throw ConfigError("'budget' must be >= 1");
  if (std::abs(cfg.s) > 1.0) throw ConfigError("'s' must satisfy |s| <= 1");
  for (Complex s : cfg.s_grid) {
    if (std::abs(s) > 1.0) throw ConfigError("'s_grid' entries must satisfy |s| <= 1");
  }
  for (int v : cfg.g_sizes) {
    if (v < 1) throw ConfigError("'g_sizes' entries must be >= 1");
  }
  if (cfg.k_range && (cfg.k_range->first < 0 || cfg.k_range->second < cfg.k_range->first)) {
    throw ConfigError("'k_range' needs 0 <= k_min <= k_max");
  }
  if (cfg.k0 && *cfg.k0 < 1) throw ConfigError("'k0' must be >= 1");
  if (cfg.suite.instances < 0) throw ConfigError("'suite.instances' must be >= 0");
  if (cfg.suite.instances > 0) {
    if (cfg.suite.max_sites < 4) throw ConfigError("'suite.max_sites' must be >= 4");
    check_budget(2, static_cast<std::size_t>(cfg.suite.max_sites), cfg.budget);
  }
  for (const Geometry& g : geometry_grid(cfg)) {
    if (cfg.model.family == "explicit" && g.sites() != cfg.model.sites) {
      throw ConfigError("explicit models fix the chain length: every grid point needs " +
                        std::to_string(cfg.model.sites) + " sites");
    }
    check_budget(cfg.model.local_dim, static_cast<std::size_t>(g.sites()), cfg.budget);
  }
  // Surfaces bad family parameters as config errors before any work starts.
  (void)instance_for(cfg, geometry_grid(cfg).front());
}

std::string canonical_json(const ScanConfig& cfg) {
  json j;
  j["model"] = json::parse(to_canonical_json(cfg.model));
  j["geometry"] = {{"A", cfg.sizes_a}, {"B", cfg.sizes_b}, {"C", cfg.sizes_c}};
  j["k_range"] = cfg.k_range ? json::array({cfg.k_range->first, cfg.k_range->second}) : json();
  j["k0"] = cfg.k0 ? json(*cfg.k0) : json();
  j["s"] = complex_to_json(cfg.s);
  json grid = json::array();
  for (Complex s : cfg.s_grid) grid.push_back(complex_to_json(s));
  j["s_grid"] = std::move(grid);
  j["g_sizes"] = cfg.g_sizes;
  j["tolerances"] = cfg.tolerances;
  j["seed"] = cfg.seed;
  j["budget"] = cfg.budget;
  j["suite"] = {{"instances", cfg.suite.instances}, {"max_sites", cfg.suite.max_sites}};
  return j.dump(2);
}

std::string config_hash(const ScanConfig& cfg) { return fnv1a_hex(canonical_json(cfg)); }

std::vector<Geometry> geometry_grid(const ScanConfig& cfg) {
  std::vector<Geometry> out;
  for (int a : cfg.sizes_a)
    for (int c : cfg.sizes_c)
      for (int b : cfg.sizes_b) out.push_back({a, b, c});
  return out;
}

CorpusInstance instance_for(const ScanConfig& cfg, const Geometry& g) {
  try {
    return make_instance(model_id(cfg.model), cfg.model, g.a, g.b, g.c);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("model cannot be built: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Inequality suite

std::vector<LemmaRow> lemma_checks(const CorpusInstance& inst, std::uint64_t seed,
                                   std::size_t budget) {
  const Interaction& ia = inst.ia;
  const RegionsABC& reg = inst.regions;
  std::mt19937_64 rng(seed);
  std::vector<LemmaRow> rows;
  auto add = [&](std::string name, double lhs, double rhs) {
    rows.push_back({inst.id, std::move(name), lhs, rhs, leq(lhs, rhs)});
  };

  // Partition-function ratios for the split A | BC.
  const Interval bc{reg.B().begin, reg.C().end};
  const PartitionRatioReport pr = check_partition_ratios(ia, reg.A(), bc, budget);
  const double log_sum = pr.log_Z_A + pr.log_Z_B;
  add("Z1_forward", pr.log_Z_AB - log_sum, pr.boundary_norm);
  add("Z1_backward", log_sum - pr.log_Z_AB, pr.boundary_norm);
  const double log_d = std::log(static_cast<double>(ia.local_dim()));
  const double j = pr.strength;
  auto z2 = [&](const char* tag, double log_z, int size) {
    add(std::string("Z2_lower_") + tag, (log_d - j) * size, log_z);
    add(std::string("Z2_upper_") + tag, log_z, (log_d + j) * size);
  };
  z2("A", pr.log_Z_A, reg.A().size());
  z2("BC", pr.log_Z_B, bc.size());
  z2("ABC", pr.log_Z_AB, reg.all().size());
  add("Z3_lower", -pr.range * j, log_sum - pr.log_Z_AB);
  add("Z3_upper", log_sum - pr.log_Z_AB, pr.range * j);

  // Pinsker and norm ordering on the A:C marginal.
  const AcMarginals m = ac_marginals(ia, reg, budget);
  const FactorizationError fe = factorization_error(m);
  const double mi = mutual_information(m.rho_AC, reg.A().sites(), reg.C().sites());
  add("pinsker", fe.trace_norm_err * fe.trace_norm_err, 2.0 * mi);
  add("norm_ordering", fe.op_norm_err, fe.trace_norm_err);

  // Partial-trace contraction with a random X on A ∪ B.
  const GibbsEnsemble g = gibbs(ia, reg.all(), budget);
  const LocalOperator rho_b = marginal(g, reg.B().sites());
  const Sites ab = part_sites(reg, Part::AB);
  const auto dim_ab = static_cast<Eigen::Index>(hilbert_dim(ia.local_dim(), ab.size()));
  const LocalOperator x(ia.local_dim(), ab, random_complex(rng, dim_ab));
  const ContractionReport cr = contraction_check(rho_b, x);
  add("contraction", cr.lhs, cr.rhs);

  // Marginal-inverse bound with 𝒢 measured on the covering grid.
  const double G = estimate_G(ia, covering_grid(reg, {Complex{0.5, 0.0}})).value;
  const MarginalInverseReport mr = marginal_inverse_norm(ia, reg, G, budget);
  add("marginal_inverse", mr.inverse_norm, mr.bound);

  // Expansional identities at a random s in the unit disk.
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Complex s{unit(rng), unit(rng)};
  if (std::abs(s) > 1.0) s /= std::abs(s);
  const ExpansionalReport er = expansional(ia, reg.A(), bc, s);
  add("expansional_reconstruction", er.reconstruction_defect, 1e-10);
  add("expansional_inverse", er.inverse_defect, 1e-9);
  add("G_at_least_one", 1.0, G);

  // Gurvits ball: 1 + Δ with ||Δ|| <= 1/sqrt(d_A d_C) on 2x2 or 2x3.
  const std::size_t da = 2;
  const std::size_t dc = (seed % 2 == 0) ? 2 : 3;
  const auto dim = static_cast<Eigen::Index>(da * dc);
  Matrix delta = random_complex(rng, dim);
  delta = (delta + delta.adjoint()).eval() * 0.5;
  const double norm = Eigen::SelfAdjointEigenSolver<Matrix>(delta, Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .cwiseAbs()
                          .maxCoeff();
  const double radius = 1.0 / std::sqrt(static_cast<double>(da * dc));
  delta *= std::uniform_real_distribution<double>(0.0, 1.0)(rng) * radius / norm;
  Matrix state = delta;
  state.diagonal().array() += Complex{1.0, 0.0};
  state /= state.trace().real();
  const Certificate cert = exact_sep_test(state, da, dc);
  add("gurvits_ball", cert.negativity, kNegativityZeroTol);
  return rows;
}

// ---------------------------------------------------------------------------
// Commands

CommandResult cmd_check_config(const ScanConfig& cfg) {
  validate(cfg);
  CommandResult r;
  std::ostringstream os;
  os << "config ok: " << geometry_grid(cfg).size() << " grid points, hash " << config_hash(cfg);
  r.summary = os.str();
  return r;
}

CommandResult cmd_verify_lemmas(const ScanConfig& cfg, const std::filesystem::path& out_dir) {
  validate(cfg);
  prepare(out_dir);
  std::vector<CorpusInstance> instances;
  for (const Geometry& g : geometry_grid(cfg)) {
    CorpusInstance inst = instance_for(cfg, g);
    inst.id += "-A" + std::to_string(g.a) + "B" + std::to_string(g.b) + "C" + std::to_string(g.c);
    instances.push_back(std::move(inst));
  }
  if (cfg.suite.instances > 0) {
    for (auto& inst : suite_corpus(cfg.seed, cfg.suite.instances, cfg.suite.max_sites)) {
      instances.push_back(std::move(inst));
    }
  }
  const auto results = parallel_map<std::vector<LemmaRow>>(
      instances.size(), cfg.jobs, [&](std::size_t i) {
        return lemma_checks(instances[i], cfg.seed + i, cfg.budget);
      });

  CsvWriter csv(out_dir / "lemmas.csv", cfg, "verify-lemmas");
  std::map<std::string, std::pair<int, int>> tally;  // inequality -> (pass, total)
  for (const auto& rows : results) {
    for (const LemmaRow& r : rows) {
      auto& t = tally[r.inequality];
      t.first += r.pass ? 1 : 0;
      t.second += 1;
    }
  }
  for (const auto& [name, t] : tally) {
    csv.comment(name + ": " + std::to_string(t.first) + "/" + std::to_string(t.second) + " pass");
  }
  csv.row({"instance", "inequality", "lhs", "rhs", "pass"});
  int failures = 0;
  for (const auto& rows : results) {
    for (const LemmaRow& r : rows) {
      csv.row({r.instance, r.inequality, fd(r.lhs), fd(r.rhs), r.pass ? "1" : "0"});
      failures += r.pass ? 0 : 1;
    }
  }
  CommandResult out;
  out.files.push_back(csv.path());
  out.exit_code = failures == 0 ? kExitOk : kExitProperty;
  out.summary = std::to_string(instances.size()) + " instances, " + std::to_string(failures) +
                " failed checks";
  return out;
}

CommandResult cmd_scan_negativity(const ScanConfig& cfg, const std::filesystem::path& out_dir) {
  validate(cfg);
  prepare(out_dir);
  const std::vector<Geometry> grid = geometry_grid(cfg);
  struct Row {
    NegativityResult neg;
    double mi = 0.0, fact = 0.0;
    std::string verdict;
    bool exact = false;
  };
  const auto rows = parallel_map<Row>(grid.size(), cfg.jobs, [&](std::size_t i) {
    const CorpusInstance inst = instance_for(cfg, grid[i]);
    const AcMarginals m = ac_marginals(inst.ia, inst.regions, cfg.budget);
    const Cut cut{inst.regions.A().sites(), inst.regions.C().sites()};
    Row r;
    r.neg = negativity(m.rho_AC, cut);
    r.mi = mutual_information(m.rho_AC, cut.A, cut.C);
    r.fact = factorization_error(m).op_norm_err;
    const std::size_t dims = hilbert_dim(inst.ia.local_dim(), cut.A.size() + cut.C.size());
    r.exact = dims <= 6;
    const bool ppt = r.neg.negativity <= cfg.tol("negativity_zero");
    r.verdict = std::string(to_string(ppt ? Verdict::PPTConsistent : Verdict::Entangled));
    return r;
  });

  CsvWriter csv(out_dir / "negativity.csv", cfg, "scan-negativity");
  csv.comment("negativity_zero: " + fd(cfg.tol("negativity_zero")));
  int violations = 0;
  for (const auto& [ac, idx] : by_ac(grid)) {
    // Smallest |B| from which every larger scanned |B| is PPT.
    std::vector<std::size_t> order = idx;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return grid[x].b < grid[y].b; });
    std::optional<int> ell;
    bool seen_ppt = false;
    for (std::size_t i : order) {
      const bool ppt = rows[i].neg.negativity <= cfg.tol("negativity_zero");
      if (ppt && !ell) ell = grid[i].b;
      if (!ppt) {
        if (seen_ppt) ++violations;
        ell.reset();
      }
      seen_ppt = seen_ppt || ppt;
    }
    csv.comment("l_emp A=" + std::to_string(ac.first) + " C=" + std::to_string(ac.second) + ": " +
                (ell ? std::to_string(*ell) : std::string("none")));
  }
  csv.comment("monotonicity_violations: " + std::to_string(violations));
  csv.row({"model_id", "A", "B", "C", "negativity", "min_pt_eig", "mutual_information",
           "factorization_op_norm", "certificate_verdict", "ppt_exact"});
  const std::string id = model_id(cfg.model);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Row& r = rows[i];
    csv.row({id, fi(grid[i].a), fi(grid[i].b), fi(grid[i].c), fd(r.neg.negativity),
             fd(r.neg.min_pt_eig), fd(r.mi), fd(r.fact), r.verdict, r.exact ? "1" : "0"});
  }
  CommandResult out;
  out.files.push_back(csv.path());
  out.exit_code = violations == 0 ? kExitOk : kExitProperty;
  out.summary = std::to_string(grid.size()) + " grid points, " + std::to_string(violations) +
                " sudden-death monotonicity violations";
  return out;
}

CommandResult cmd_scan_decay(const ScanConfig& cfg, const std::filesystem::path& out_dir) {
  validate(cfg);
  prepare(out_dir);
  const std::vector<Geometry> grid = geometry_grid(cfg);
  struct DeltaRow {
    int k = 0;
    double norm = 0.0, bound = 0.0;
    int support = 0;
  };
  struct Point {
    double G = 1.0;
    std::vector<DeltaRow> deltas;
    FactorizationError fe;
    double mi = 0.0;
  };
  const auto points = parallel_map<Point>(grid.size(), cfg.jobs, [&](std::size_t i) {
    const CorpusInstance inst = instance_for(cfg, grid[i]);
    Point p;
    GGrid gg = covering_grid(inst.regions, {cfg.s});
    if (!cfg.g_sizes.empty()) gg = merge(gg, size_grid(inst.ia.chain(), cfg.g_sizes, {cfg.s}));
    p.G = estimate_G(inst.ia, gg).value;
    const int K = inst.regions.saturation_radius();
    const int k_lo = cfg.k_range ? cfg.k_range->first : 0;
    const int k_hi = cfg.k_range ? cfg.k_range->second : K;
    for (int k = k_lo; k <= k_hi; ++k) {
      const DeltaK dk = delta_k(inst.ia, inst.regions, k, cfg.s, cfg.budget);
      p.deltas.push_back({k, dk.norm, delta_k_bound(p.G, k, inst.ia.range()), dk.support_size});
    }
    const AcMarginals m = ac_marginals(inst.ia, inst.regions, cfg.budget);
    p.fe = factorization_error(m);
    p.mi = mutual_information(m.rho_AC, inst.regions.A().sites(), inst.regions.C().sites());
    return p;
  });

  const std::string id = model_id(cfg.model);
  int violations = 0;
  CsvWriter dcsv(out_dir / "decay_delta.csv", cfg, "scan-decay");
  double g_max = 1.0;
  for (const Point& p : points) g_max = std::max(g_max, p.G);
  dcsv.comment("G_emp (max over grid): " + fd(g_max));
  dcsv.comment("s: " + fd(cfg.s.real()) + " " + fd(cfg.s.imag()));
  dcsv.row({"model_id", "A", "B", "C", "k", "delta_norm", "bound", "G_emp", "support_size",
            "holds"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const int K = std::max(grid[i].a, grid[i].c);
    for (const DeltaRow& r : points[i].deltas) {
      const bool holds = r.k >= K ? r.norm <= 1e-12 : r.norm <= r.bound;
      violations += holds ? 0 : 1;
      dcsv.row({id, fi(grid[i].a), fi(grid[i].b), fi(grid[i].c), fi(r.k), fd(r.norm),
                fd(r.bound), fd(points[i].G), fi(r.support), holds ? "1" : "0"});
    }
  }

  CsvWriter ccsv(out_dir / "decay_clustering.csv", cfg, "scan-decay");
  for (const auto& [ac, idx] : by_ac(grid)) {
    std::vector<double> bs, mis, errs;
    for (std::size_t i : idx) {
      bs.push_back(grid[i].b);
      mis.push_back(points[i].mi);
      errs.push_back(points[i].fe.op_norm_err);
    }
    const DecayFit fm = fit_exponential_decay(bs, mis);
    const DecayFit fe = fit_exponential_decay(bs, errs);
    const std::string tag = "A=" + std::to_string(ac.first) + " C=" + std::to_string(ac.second);
    ccsv.comment("fit " + tag + " mutual_information: C''=" + fd(fm.C) + " alpha''=" +
                 fd(fm.alpha) + " points=" + std::to_string(fm.points));
    ccsv.comment("fit " + tag + " factorization_op_norm: C=" + fd(fe.C) + " alpha=" +
                 fd(fe.alpha) + " points=" + std::to_string(fe.points));
  }
  ccsv.comment("G_emp (max over grid): " + fd(g_max));
  ccsv.row({"model_id", "A", "B", "C", "factorization_op_norm", "factorization_trace_norm",
            "mutual_information"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ccsv.row({id, fi(grid[i].a), fi(grid[i].b), fi(grid[i].c), fd(points[i].fe.op_norm_err),
              fd(points[i].fe.trace_norm_err), fd(points[i].mi)});
  }

  CommandResult out;
  out.files = {dcsv.path(), ccsv.path()};
  out.exit_code = violations == 0 ? kExitOk : kExitProperty;
  out.summary = std::to_string(grid.size()) + " grid points, " + std::to_string(violations) +
                " Delta_k rows above their bound";
  return out;
}

CommandResult cmd_certify(const ScanConfig& cfg, const std::filesystem::path& out_dir) {
  validate(cfg);
  prepare(out_dir);
  const std::vector<Geometry> grid = geometry_grid(cfg);
  struct Point {
    std::optional<DecompositionReport> report;
    std::string note;
  };
  const auto points = parallel_map<Point>(grid.size(), cfg.jobs, [&](std::size_t i) {
    const CorpusInstance inst = instance_for(cfg, grid[i]);
    Point p;
    if (inst.regions.B().size() < inst.ia.range()) {
      p.note = "B_below_range";
      return p;
    }
    PipelineOptions opt;
    opt.k0 = cfg.k0;
    if (opt.k0 && *opt.k0 > inst.regions.saturation_radius()) opt.k0.reset();
    opt.budget = cfg.budget;
    p.report = theorem_pipeline(inst.ia, inst.regions, opt);
    return p;
  });

  const std::string id = model_id(cfg.model);
  std::vector<std::filesystem::path> files;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!points[i].report) continue;
    const auto path = out_dir / ("report_A" + std::to_string(grid[i].a) + "_B" +
                                 std::to_string(grid[i].b) + "_C" + std::to_string(grid[i].c) +
                                 ".json");
    std::ofstream f(path);
    if (!f) throw ResourceError("cannot open output file " + path.string());
    f << report_to_json(*points[i].report) << "\n";
    files.push_back(path);
  }

  auto certified = [&](std::size_t i) {
    return points[i].report && points[i].report->verdict == Verdict::SeparableByConstruction;
  };
  int failures = 0;
  CsvWriter csv(out_dir / "certify.csv", cfg, "certify");
  for (const auto& [ac, idx] : by_ac(grid)) {
    int worst_infeasible = 0;
    bool any_certified = false;
    for (std::size_t i : idx) {
      if (!certified(i)) worst_infeasible = std::max(worst_infeasible, grid[i].b);
    }
    for (std::size_t i : idx) {
      if (grid[i].b > worst_infeasible && certified(i)) any_certified = true;
    }
    if (!any_certified) ++failures;
    csv.comment("l_emp A=" + std::to_string(ac.first) + " C=" + std::to_string(ac.second) + ": " +
                (any_certified ? std::to_string(worst_infeasible + 1) : std::string("none")));
  }
  int unsound = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (certified(i) && points[i].report->negativity > 100.0 * cfg.tol("negativity_zero")) {
      ++unsound;
    }
  }
  csv.comment("certified_with_negative_partial_transpose: " + std::to_string(unsound));
  csv.row({"model_id", "A", "B", "C", "verdict", "k0", "reconstruction_rel_err",
           "prop_ball_margin", "worst_relative_ball_margin", "identity_mass", "negativity", "G_emp",
           "k0_closed_form", "note"});
  CsvWriter mcsv(out_dir / "certify_margins.csv", cfg, "certify");
  mcsv.row({"model_id", "A", "B", "C", "k0", "k", "delta_norm", "identity_budget", "ball_radius",
            "ball_margin", "factorial_bound"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Geometry& g = grid[i];
    if (!points[i].report) {
      csv.row({id, fi(g.a), fi(g.b), fi(g.c), std::string(to_string(Verdict::Withheld)), "", "",
               "", "", "", "", "", "", points[i].note});
      continue;
    }
    const DecompositionReport& r = *points[i].report;
    csv.row({id, fi(g.a), fi(g.b), fi(g.c), std::string(to_string(r.verdict)), fi(r.k0),
             fd(r.reconstruction_rel_err), fd(r.prop_ball_margin),
             fd(r.certificate.ball_margin.value_or(0.0)), fd(r.identity_mass), fd(r.negativity),
             fd(r.constants_used.G_emp), fd(r.constants_used.k0_closed_form), ""});
    for (const PerKEntry& e : r.per_k) {
      mcsv.row({id, fi(g.a), fi(g.b), fi(g.c), fi(r.k0), fi(e.k), fd(e.delta_norm),
                fd(e.identity_budget), fd(e.ball_radius), fd(e.ball_margin),
                fd(e.factorial_bound)});
    }
  }
  CommandResult out;
  out.files = {csv.path(), mcsv.path()};
  out.files.insert(out.files.end(), files.begin(), files.end());
  out.exit_code = (failures == 0 && unsound == 0) ? kExitOk : kExitProperty;
  out.summary = std::to_string(grid.size()) + " grid points, " + std::to_string(failures) +
                " (A,C) groups without a certified tail, " + std::to_string(unsound) +
                " certificates failing PPT";
  return out;
}

CommandResult cmd_estimate_g(const ScanConfig& cfg, const std::filesystem::path& out_dir) {
  validate(cfg);
  prepare(out_dir);
  const std::vector<Geometry> grid = geometry_grid(cfg);
  struct Entry {
    Interval x, y;
    Complex s;
    double norm_e = 0.0, norm_e_inv = 0.0;
  };
  const auto points = parallel_map<std::vector<Entry>>(grid.size(), cfg.jobs, [&](std::size_t i) {
    const CorpusInstance inst = instance_for(cfg, grid[i]);
    GGrid gg = covering_grid(inst.regions, cfg.s_grid);
    if (!cfg.g_sizes.empty()) gg = merge(gg, size_grid(inst.ia.chain(), cfg.g_sizes, cfg.s_grid));
    std::vector<Entry> out;
    for (const auto& [x, y] : gg.pairs) {
      for (Complex s : gg.s_values) {
        const ExpansionalReport rep = expansional(inst.ia, x, y, s);
        out.push_back({x, y, s, rep.norm_E, rep.norm_E_inv});
      }
    }
    return out;
  });

  double g_all = 1.0;
  std::vector<double> per_point;
  for (const auto& entries : points) {
    double g = 1.0;
    for (const Entry& e : entries) g = std::max({g, e.norm_e, e.norm_e_inv});
    per_point.push_back(g);
    g_all = std::max(g_all, g);
  }
  CsvWriter csv(out_dir / "estimate_g.csv", cfg, "estimate-g");
  csv.comment("G_emp: " + fd(g_all));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv.comment("G_emp A=" + fi(grid[i].a) + " B=" + fi(grid[i].b) + " C=" + fi(grid[i].c) +
                ": " + fd(per_point[i]));
  }
  csv.row({"model_id", "A", "B", "C", "x_begin", "x_end", "y_begin", "y_end", "s_re", "s_im",
           "norm_E", "norm_E_inv"});
  const std::string id = model_id(cfg.model);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (const Entry& e : points[i]) {
      csv.row({id, fi(grid[i].a), fi(grid[i].b), fi(grid[i].c), fi(e.x.begin), fi(e.x.end),
               fi(e.y.begin), fi(e.y.end), fd(e.s.real()), fd(e.s.imag()), fd(e.norm_e),
               fd(e.norm_e_inv)});
    }
  }
  CommandResult out;
  out.files.push_back(csv.path());
  out.summary = "G_emp = " + fd(g_all) + " over " + std::to_string(grid.size()) + " grid points";
  return out;
}

}  // namespace entlen
