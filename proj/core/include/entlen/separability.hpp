#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "entlen/araki.hpp"
#include "entlen/gibbs_state.hpp"
#include "entlen/spin_model.hpp"
#include "entlen/tensor_linalg.hpp"

namespace entlen {

// Tolerance ladder: one decade between each dependent check.
inline constexpr double kFactorPsdTol = 1e-10;
inline constexpr double kReconstructionTol = 1e-9;
inline constexpr double kNegativityZeroTol = 1e-12;

enum class Verdict { SeparableByConstruction, PPTConsistent, Entangled, Withheld };

std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view s);

/// Bipartition of a support into an A side and a C side.
struct Cut {
  Sites A;
  Sites C;
};

struct ProductTerm {
  double weight = 0.0;
  LocalOperator factor_A;
  LocalOperator factor_C;
};

/// sum_i w_i F_i^A ⊗ F_i^C + c·1 with PSD factors and nonnegative weights.
class SeparableDecomposition {
 public:
  SeparableDecomposition() = default;
  SeparableDecomposition(Cut cut, int local_dim);

  /// Factors are embedded onto cut.A / cut.C; weight must be >= 0.
  void add_term(double weight, const LocalOperator& factor_a, const LocalOperator& factor_c);
  void add_identity(double coeff);

  const Cut& cut() const noexcept { return cut_; }
  int local_dim() const noexcept { return local_dim_; }
  const std::vector<ProductTerm>& terms() const noexcept { return terms_; }
  double residual_identity_coeff() const noexcept { return identity_; }

  /// (d_A d_C)^2.
  std::size_t caratheodory_bound() const;
  LocalOperator reconstruct() const;

  struct Validation {
    bool factors_psd = false;
    bool weights_nonnegative = false;
    bool term_count_ok = false;
    double reconstruction_rel_err = 0.0;
    // min over factors of λ_min / max(1, ||F||); >= -kFactorPsdTol when PSD.
    double worst_factor_margin = 0.0;
    bool ok(double reconstruction_tol = kReconstructionTol) const {
      return factors_psd && weights_nonnegative && term_count_ok &&
             reconstruction_rel_err <= reconstruction_tol;
    }
  };
  Validation validate(const LocalOperator& target, double psd_tol = kFactorPsdTol) const;

  /// Certifies (Y_A ⊗ Y_C) X (Y_A ⊗ Y_C)^† given that *this certifies X.
  SeparableDecomposition conjugated(const LocalOperator& y_a, const LocalOperator& y_c) const;

  /// wa·a + wb·b for wa, wb >= 0 on the same cut.
  static SeparableDecomposition combine(const SeparableDecomposition& a, double wa,
                                        const SeparableDecomposition& b, double wb);

 private:
  Cut cut_;
  int local_dim_ = 2;
  std::vector<ProductTerm> terms_;
  double identity_ = 0.0;
};

/// c·1 + Δ, separable when ||Δ|| <= c / sqrt(d_A d_C) with the dimensions of
/// Δ's own support on each side of the cut.
struct BallBlock {
  double identity_coeff = 0.0;
  Matrix delta;    // site order of `support`; A⊗C order for a raw bipartite block
  Sites support;   // empty for a raw bipartite block
  std::size_t dim_A = 1, dim_C = 1;
  double delta_norm = 0.0;

  double radius() const;  // identity_coeff / sqrt(d_A d_C)
  double margin() const { return radius() - delta_norm; }
};

/// supp(Δ) must lie inside cut.A ∪ cut.C.
BallBlock make_ball_block(double identity_coeff, const LocalOperator& delta, const Cut& cut);

struct Certificate {
  Verdict verdict = Verdict::Withheld;
  Cut cut;  // empty sides for a raw bipartite operator
  int local_dim = 2;
  std::size_t dim_A = 1, dim_C = 1;
  // Explicit product part; ball blocks cover the identity-dominated remainder.
  std::optional<SeparableDecomposition> decomposition;
  std::vector<BallBlock> ball_blocks;
  // Operator being certified: on cut.A ∪ cut.C, or dim_A·dim_C square in A⊗C order.
  std::optional<Matrix> target;
  double negativity = 0.0;
  double min_pt_eig = 0.0;
  std::optional<double> ball_margin;
  std::map<std::string, double> tolerances;
  std::map<std::string, double> constants;

  /// True for SeparableByConstruction, and for PPTConsistent when
  /// d_A d_C <= 6 where PPT is sufficient.
  bool implies_separable() const;
};

struct NegativityResult {
  double negativity = 0.0;  // sum of |negative eigenvalues| of ρ^{T_C}
  double min_pt_eig = 0.0;
};

/// Transpose of the second tensor factor of a d_A·d_C square matrix.
Matrix partial_transpose_bipartite(const Matrix& m, std::size_t dim_a, std::size_t dim_c);

/// Reorders an operator on cut.A ∪ cut.C into A⊗C order.
Matrix to_bipartite(const LocalOperator& op, const Cut& cut);

/// The cut must partition supp(rho).
NegativityResult negativity(const LocalOperator& rho, const Cut& cut);
NegativityResult negativity(const Matrix& rho, std::size_t dim_a, std::size_t dim_c);

/// Separability of 1 + Δ from the operator-norm ball ||Δ|| <= 1/sqrt(d_A d_C),
/// with PPT run as an oracle. Δ must be Hermitian with supp(Δ) ⊆ A ∪ C.
Certificate gurvits_check(const LocalOperator& delta, const Cut& cut);
Certificate gurvits_check(const Matrix& delta, std::size_t dim_a, std::size_t dim_c);

/// PPT test where it is exact (d_A d_C <= 6); DomainError otherwise.
Certificate exact_sep_test(const LocalOperator& rho, const Cut& cut);
Certificate exact_sep_test(const Matrix& rho, std::size_t dim_a, std::size_t dim_c);

/// Constant-size decomposition on the truncated region ∂^k B:
///   ρ̃_AC = e^{H_AC/2} ρ^k_AC e^{H_AC/2} = ρ̃_A ⊗ ρ̃_C + Δ
///        = (ρ̃_A - a)⊗(ρ̃_C - c) + a·1⊗(ρ̃_C - c) + c·(ρ̃_A - a)⊗1 + γ1 + (γ1 + Δ)
/// with a = λ_min(ρ̃_A), c = λ_min(ρ̃_C), γ = ac/2.
struct Prop31Result {
  int k = 0;
  Interval region;  // ∂^k B
  Interval A_k, C_k;
  double log_Z_k = 0.0;
  LocalOperator rho_AC;  // ρ^k_AC
  LocalOperator rho_tilde_AC, rho_tilde_A, rho_tilde_C;
  double min_eig_A = 0.0, min_eig_C = 0.0;
  double gamma = 0.0;
  // λ_min(ρ_X)/||e^{-H_X}|| for X = A_k, C_k: the faithfulness-chain lower bounds.
  double faithfulness_A = 0.0, faithfulness_C = 0.0;
  SeparableDecomposition gamma_terms;  // three products + γ·1
  LocalOperator delta;
  double delta_norm = 0.0;
  double ball_ratio = 0.0;          // ||Δ|| / γ
  double ball_threshold = 0.0;      // 1/sqrt(d_{A_k} d_{C_k})
  double uniform_threshold = 0.0;   // d^{-k}
  double reconstruction_rel_err = 0.0;
  bool factors_psd = false;

  bool ball_holds() const { return ball_ratio <= ball_threshold; }
  bool uniform_ball_holds() const { return ball_ratio <= uniform_threshold; }
};

/// Requires k >= 1 and |B| >= r (PreconditionError as DomainError).
Prop31Result prop31_decompose(const Interaction& ia, const RegionsABC& regions, int k,
                              std::size_t budget = kDefaultBudget);

/// tr_B[ρ^B E^{k†}_{A,B} E^{k†}_{AB,C} E^k_{AB,C} E^k_{A,B}] on W \ B, where the
/// workspace W defaults to ∂^k B and must contain it. k = 0 gives the identity.
LocalOperator expansional_bracket(const Interaction& ia, const RegionsABC& regions, int k,
                                  Complex s = 0.5, std::optional<Interval> workspace = {},
                                  std::size_t budget = kDefaultBudget);

struct DeltaK {
  int k = 0;
  LocalOperator op;  // on ∂^{k+1}B ∩ (A ∪ C)
  double norm = 0.0;
  int support_size = 0;
};

/// Δ_k = bracket(k+1) - bracket(k).
DeltaK delta_k(const Interaction& ia, const RegionsABC& regions, int k, Complex s = 0.5,
               std::size_t budget = kDefaultBudget);

/// 4 G^3 G^k / (floor(k/r)+1)!.
double delta_k_bound(double G, int k, int range);

/// (Z_ABC/Z_B) e^{H_AC/2} ρ_AC e^{H_AC/2}, computed from the Gibbs state.
LocalOperator sandwiched_marginal(const Interaction& ia, const RegionsABC& regions,
                                  std::size_t budget = kDefaultBudget);

struct TelescopeReport {
  int k0 = 0;
  int saturation = 0;  // max(|A|,|C|)
  LocalOperator lhs;   // bracket at saturation
  std::vector<DeltaK> deltas;
  double telescope_rel_err = 0.0;  // lhs vs bracket(k0) + sum Δ_k
  // Only at s = 1/2, where the brackets equal Gibbs sandwiches:
  std::optional<double> sandwich_rel_err;     // Gibbs-route LHS vs bracket(max)
  std::optional<double> k0_identity_rel_err;  // bracket(k0) vs (Z_k0/Z_B) ρ̃^{k0}_AC
  std::optional<double> total_rel_err;        // Gibbs-route LHS vs bracket(k0) + sum Δ_k
};

TelescopeReport telescope_verify(const Interaction& ia, const RegionsABC& regions, int k0,
                                 Complex s = 0.5, std::size_t budget = kDefaultBudget);

struct PerKEntry {
  int k = 0;
  double delta_norm = 0.0;
  double identity_budget = 0.0;  // I · 2^{-(k-k0+1)}
  double ball_radius = 0.0;      // budget / sqrt(d_A d_C) on supp Δ_k
  double ball_margin = 0.0;
  double factorial_bound = 0.0;  // 4 G^3 G^k / (floor(k/r)+1)!
  int support_size = 0;
};

struct PipelineConstants {
  double C = 0.0;       // measured identity mass fit I(k0) ≈ C e^{-α k0}
  double alpha = 0.0;
  double C_prime = 0.0;  // condition C' e^{α' k + α0 k0} <= (floor(k/r)+1)!
  double alpha_prime = 0.0;
  double alpha0 = 0.0;
  double G_emp = 1.0;
  double k0_closed_form = 0.0;       // r e exp(r(log C' + α0 + α')), logged only
  double z_ratio_lower_bound = 0.0;  // d^{m} e^{-||H_k0 - H_B||}
  double gamma_lower_bound = 0.0;    // ½ (faithfulness_A · faithfulness_C)
};

struct DecompositionReport {
  Verdict verdict = Verdict::Withheld;
  int k0 = 0;
  double gamma_k0 = 0.0;
  double Z_ratio = 0.0;         // Z_{k0} / Z_B
  double identity_mass = 0.0;   // Z_ratio · γ(k0)
  double leftover_identity = 0.0;
  double reconstruction_rel_err = 0.0;
  double prop_ball_ratio = 0.0;
  double prop_ball_threshold = 0.0;
  double prop_ball_margin = 0.0;  // ratio margin: threshold - ratio
  bool factors_psd = false;
  std::vector<PerKEntry> per_k;
  PipelineConstants constants_used;
  double negativity = 0.0;  // of ρ_AC across A:C
  std::vector<int> tried_k0;
  Certificate certificate;
};

struct PipelineOptions {
  std::optional<int> k0;      // search 1..max(|A|,|C|) when absent
  std::optional<double> G_emp;  // measured on the covering grid when absent
  std::size_t budget = kDefaultBudget;
};

/// Full decomposition of ρ_AC into explicit separable products plus
/// Gurvits-ball blocks. Requires |B| >= r.
DecompositionReport theorem_pipeline(const Interaction& ia, const RegionsABC& regions,
                                     const PipelineOptions& options = {});

}  // namespace entlen
