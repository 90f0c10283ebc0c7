#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "entlen/corpus.hpp"
#include "entlen/gibbs_state.hpp"
#include "entlen/separability.hpp"
#include "entlen/spin_model.hpp"

namespace entlen {

const char* version();

// Exit-code contract of the command-line driver.
enum ExitCode : int { kExitOk = 0, kExitProperty = 1, kExitConfig = 2, kExitResource = 3 };

/// Maps ConfigError -> 2, ResourceError -> 3, anything else -> 1.
int exit_code_for(const std::exception& e);

struct Geometry {
  int a = 1, b = 1, c = 1;
  int sites() const { return a + b + c; }
  friend bool operator==(const Geometry&, const Geometry&) = default;
};

struct SuiteSettings {
  int instances = 100;
  int max_sites = 10;
};

/// Scan configuration (docs/config_schema.md).
struct ScanConfig {
  ModelSpec model;
  std::vector<int> sizes_a{1}, sizes_b{1}, sizes_c{1};
  std::optional<std::pair<int, int>> k_range;
  std::optional<int> k0;
  Complex s{0.5, 0.0};
  std::vector<Complex> s_grid{Complex{0.5, 0.0}};
  std::vector<int> g_sizes;
  std::map<std::string, double> tolerances{{"negativity_zero", kNegativityZeroTol},
                                           {"reconstruction", kReconstructionTol},
                                           {"factor_psd", kFactorPsdTol}};
  std::uint64_t seed = 0;
  int jobs = 1;
  std::size_t budget = kDefaultBudget;
  SuiteSettings suite;
  std::filesystem::path output = "entlen-out";

  double tol(const std::string& key) const { return tolerances.at(key); }
};

/// Strict parse; unknown keys and bad values raise ConfigError. Relative
/// "model_file" paths resolve against `base_dir`.
ScanConfig parse_scan_config(std::string_view text, const std::filesystem::path& base_dir = {});
ScanConfig load_scan_config(const std::filesystem::path& path);

/// Checks sizes, tolerances and that every grid point fits the budget
/// (ResourceError otherwise).
void validate(const ScanConfig& cfg);

/// Canonical JSON of every field that affects results (not jobs or output).
std::string canonical_json(const ScanConfig& cfg);
/// FNV-1a of canonical_json.
std::string config_hash(const ScanConfig& cfg);

/// Cartesian product in (A, C, B) order so each |B| sweep is contiguous.
std::vector<Geometry> geometry_grid(const ScanConfig& cfg);

CorpusInstance instance_for(const ScanConfig& cfg, const Geometry& g);

/// Runs fn(0..n-1) on up to `jobs` threads; results come back in index order
/// and the first exception (by index) is rethrown.
template <class T>
std::vector<T> parallel_map(std::size_t n, int jobs, const std::function<T(std::size_t)>& fn);

/// 17 significant digits; "nan"/"inf" for non-finite values.
std::string format_double(double v);

// ---------------------------------------------------------------------------
// Inequality suites

struct LemmaRow {
  std::string instance;
  std::string inequality;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// Partition-function ratios, Pinsker, partial-trace contraction, the
/// marginal-inverse bound, norm ordering, expansional identities and a random
/// Gurvits-ball trial on one instance. `seed` drives the random operators.
std::vector<LemmaRow> lemma_checks(const CorpusInstance& inst, std::uint64_t seed,
                                   std::size_t budget = kDefaultBudget);

// ---------------------------------------------------------------------------
// Commands. Each writes its files under `out_dir` and returns an exit code.

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> files;
  std::string summary;
};

CommandResult cmd_check_config(const ScanConfig& cfg);
CommandResult cmd_verify_lemmas(const ScanConfig& cfg, const std::filesystem::path& out_dir);
CommandResult cmd_scan_negativity(const ScanConfig& cfg, const std::filesystem::path& out_dir);
CommandResult cmd_scan_decay(const ScanConfig& cfg, const std::filesystem::path& out_dir);
CommandResult cmd_certify(const ScanConfig& cfg, const std::filesystem::path& out_dir);
CommandResult cmd_estimate_g(const ScanConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace entlen

#include "entlen/detail/parallel_map.hpp"
