#pragma once

#include <span>
#include <vector>

#include "entlen/spin_model.hpp"
#include "entlen/tensor_linalg.hpp"

namespace entlen {

/// Default cap on the dense dimension d^{|region|}.
inline constexpr std::size_t kDefaultBudget = 4096;

/// Throws ResourceError when d^{num_sites} exceeds `budget`.
void check_budget(int local_dim, std::size_t num_sites, std::size_t budget);

/// Gibbs state exp(-H_Λ)/Z_Λ at inverse temperature 1.
class GibbsEnsemble {
 public:
  GibbsEnsemble(const Interaction& ia, const Sites& region,
                std::size_t budget = kDefaultBudget);

  const Sites& region() const noexcept { return region_; }
  double log_Z() const noexcept { return log_z_; }
  double Z() const;
  const LocalOperator& rho() const noexcept { return rho_; }
  const LocalOperator& hamiltonian() const noexcept { return hamiltonian_; }
  const HermitianEigen& spectrum() const noexcept { return spectrum_; }

 private:
  Sites region_;
  LocalOperator hamiltonian_;
  HermitianEigen spectrum_;
  double log_z_ = 0.0;
  LocalOperator rho_;
};

GibbsEnsemble gibbs(const Interaction& ia, const Interval& region,
                    std::size_t budget = kDefaultBudget);

/// ρ_X = tr_{Λ\X}[ρ]. Throws DomainError unless X ⊆ Λ.
LocalOperator marginal(const GibbsEnsemble& g, const Sites& x);

/// log Tr[exp(-H)] with spectral shift.
double log_partition(const LocalOperator& h);

struct PartitionRatioReport {
  double log_Z_A = 0, log_Z_B = 0, log_Z_AB = 0;
  double boundary_norm = 0;  // ||H_A + H_B - H_AB||
  double strength = 0;       // J
  int range = 0;             // r
  // Tr e^{-H'}/Tr e^{-H} <= e^{||H-H'||}, both orderings of (H_A+H_B, H_AB).
  bool z1_forward = false, z1_backward = false;
  // e^{(log d - J)|X|} <= Z_X <= e^{(log d + J)|X|} for X in {A, B, AB}.
  bool z2_A = false, z2_B = false, z2_AB = false;
  // e^{-rJ} <= Z_A Z_B / Z_AB <= e^{rJ}.
  bool z3 = false;
  bool all() const { return z1_forward && z1_backward && z2_A && z2_B && z2_AB && z3; }
};

/// A must immediately precede B.
PartitionRatioReport check_partition_ratios(const Interaction& ia, const Interval& a,
                                            const Interval& b,
                                            std::size_t budget = kDefaultBudget);

struct FactorizationError {
  double op_norm_err = 0.0;
  double trace_norm_err = 0.0;
};

/// Marginals of the ABC Gibbs state needed by the correlation quantities.
struct AcMarginals {
  LocalOperator rho_AC, rho_A, rho_C;
};
AcMarginals ac_marginals(const Interaction& ia, const RegionsABC& regions,
                         std::size_t budget = kDefaultBudget);

FactorizationError factorization_error(const AcMarginals& m);
FactorizationError factorization_error(const Interaction& ia, const RegionsABC& regions,
                                       std::size_t budget = kDefaultBudget);

/// -Tr ρ log ρ, eigenvalues clamped at 1e-300 before the log.
double von_neumann_entropy(const LocalOperator& rho);
/// Tr ρ (log ρ - log σ); σ must be full rank.
double relative_entropy(const LocalOperator& rho, const LocalOperator& sigma);
/// D(ρ_AC || ρ_A ⊗ ρ_C) for a state on A ∪ C.
double mutual_information(const LocalOperator& rho_ac, const Sites& a, const Sites& c);
double mutual_information(const Interaction& ia, const RegionsABC& regions,
                          std::size_t budget = kDefaultBudget);

struct MarginalInverseReport {
  double inverse_norm = 0.0;  // ||ρ_B^{-1}|| = 1 / λ_min(ρ_B)
  double bound = 0.0;         // G^4 e^{2rJ} e^{(2J + log d)|B|}
  double G_emp = 0.0;
  bool holds = false;
};

MarginalInverseReport marginal_inverse_norm(const Interaction& ia, const RegionsABC& regions,
                                            double G_emp, std::size_t budget = kDefaultBudget);

/// Tr[(X^A ⊗ X^C) ρ_AC] - Tr[X^A ρ_A] Tr[X^C ρ_C].
double correlation(const AcMarginals& m, const LocalOperator& obs_a, const LocalOperator& obs_c);
double correlation(const Interaction& ia, const RegionsABC& regions, const LocalOperator& obs_a,
                   const LocalOperator& obs_c, std::size_t budget = kDefaultBudget);

/// Least-squares fit of log y = log C - alpha x over points with y > 0.
struct DecayFit {
  double C = 0.0;
  double alpha = 0.0;
  int points = 0;
};
DecayFit fit_exponential_decay(std::span<const double> x, std::span<const double> y);

}  // namespace entlen
