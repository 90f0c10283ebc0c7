#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "entlen/tensor_linalg.hpp"

namespace entlen {

/// Half-open site interval [begin, end).
struct Interval {
  int begin = 0;
  int end = 0;

  int size() const noexcept { return end > begin ? end - begin : 0; }
  bool empty() const noexcept { return end <= begin; }
  bool contains(int site) const noexcept { return site >= begin && site < end; }
  Sites sites() const;

  friend bool operator==(const Interval&, const Interval&) = default;
};

Interval intersect(const Interval& a, const Interval& b);

/// Finite-range potential: support -> Hermitian block.
///
/// Range is diam(X) = max(X) - min(X), so a nearest-neighbour bond has range 1.
/// Strength is J = sup_i sum_{X containing i} ||Phi(X)||, recomputed from the terms.
class Interaction {
 public:
  struct TermNorm {
    Sites support;
    double norm;
  };

  /// Terms sharing a support are summed. Throws DomainError on non-Hermitian
  /// terms, terms wider than `range`, or mismatched local dimension.
  Interaction(int local_dim, int range, int num_sites, std::vector<LocalOperator> terms);

  int local_dim() const noexcept { return local_dim_; }
  int range() const noexcept { return range_; }
  int num_sites() const noexcept { return num_sites_; }
  Interval chain() const noexcept { return {0, num_sites_}; }
  double strength() const noexcept { return strength_; }
  const std::map<Sites, LocalOperator>& terms() const noexcept { return terms_; }
  std::vector<TermNorm> term_norms() const;

 private:
  int local_dim_;
  int range_;
  int num_sites_;
  std::map<Sites, LocalOperator> terms_;
  double strength_ = 0.0;
};

/// Sum of two interactions on the same chain; range is the larger of the two.
Interaction operator+(const Interaction& a, const Interaction& b);

/// Adjacent intervals A | B | C in order, all nonempty.
class RegionsABC {
 public:
  RegionsABC(Interval a, Interval b, Interval c);
  static RegionsABC from_sizes(int size_a, int size_b, int size_c, int offset = 0);

  const Interval& A() const noexcept { return a_; }
  const Interval& B() const noexcept { return b_; }
  const Interval& C() const noexcept { return c_; }
  Interval all() const noexcept { return {a_.begin, c_.end}; }
  /// max(|A|, |C|): every k-truncation at or beyond this radius covers ABC.
  int saturation_radius() const noexcept { return std::max(a_.size(), c_.size()); }

 private:
  Interval a_, b_, c_;
};

enum class Part { A, C, AC, AB, B, ABC };

Sites part_sites(const RegionsABC& regions, Part part);

/// H_X = sum of all terms with support inside `region`, on `region`.
/// Throws DomainError for an empty region.
LocalOperator hamiltonian(const Interaction& ia, const Sites& region);
LocalOperator hamiltonian(const Interaction& ia, const Interval& region);

/// B widened by min(k,|A|) sites on the left and min(k,|C|) on the right.
Interval k_neighborhood(const RegionsABC& regions, int k);

/// H_{X ∩ ∂^k B}; std::nullopt when the intersection is empty.
std::optional<LocalOperator> truncated_hamiltonian(const Interaction& ia,
                                                   const RegionsABC& regions, Part part,
                                                   int k);

/// Description of a model: one of the built-in families plus its parameters.
struct ModelSpec {
  std::string family;
  std::map<std::string, double> params;
  int sites = 0;
  std::uint64_t seed = 0;
  int local_dim = 2;
  // Only for family "explicit".
  std::vector<LocalOperator> explicit_terms;
  int explicit_range = 1;
};

/// Families: zero, field, tfi, classical_ising, heisenberg_xxz, random, explicit.
/// Throws ConfigError for unknown names or invalid parameters.
Interaction build_model(const ModelSpec& spec);

/// Convenience wrapper over build_model.
Interaction builtin_model(const std::string& name, const std::map<std::string, double>& params,
                          int sites, std::uint64_t seed = 0, int local_dim = 2);

}  // namespace entlen
