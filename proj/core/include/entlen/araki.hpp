#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "entlen/spin_model.hpp"
#include "entlen/tensor_linalg.hpp"

namespace entlen {

/// E_{X,Y}(s) = e^{-s H_{XY}} e^{s(H_X + H_Y)} for adjacent intervals X | Y.
struct ExpansionalReport {
  Complex s;
  Interval X, Y;
  LocalOperator E;
  LocalOperator E_inv;  // e^{-s(H_X + H_Y)} e^{s H_{XY}}
  double norm_E = 0.0;
  double norm_E_inv = 0.0;
  // ||E E_inv - 1|| / ||1||, Frobenius.
  double inverse_defect = 0.0;
  // ||e^{-s H_XY} - E e^{-s(H_X+H_Y)}||_F / ||e^{-s H_XY}||_F.
  double reconstruction_defect = 0.0;
};

/// Throws DomainError unless X immediately precedes Y, both are nonempty,
/// and |s| <= 1.
ExpansionalReport expansional(const Interaction& ia, const Interval& x, const Interval& y,
                              Complex s);

/// Just the operator E_{X,Y}(s) without norms or defect checks.
LocalOperator expansional_operator(const Interaction& ia, const Interval& x, const Interval& y,
                                   Complex s);

enum class ExpansionalPair { A_B, AB_C };

/// E^k: the pair's intervals clipped to ∂^k B. std::nullopt if a clipped
/// interval is empty.
std::optional<ExpansionalReport> truncated_expansional(const Interaction& ia,
                                                       const RegionsABC& regions,
                                                       ExpansionalPair pair, int k, Complex s);

/// Clipped intervals (X ∩ ∂^k B, Y ∩ ∂^k B) for the pair.
std::pair<Interval, Interval> truncated_pair(const RegionsABC& regions, ExpansionalPair pair,
                                             int k);

/// Grid of (X, Y, s) points for the empirical uniform bound.
struct GGrid {
  std::vector<std::pair<Interval, Interval>> pairs;
  std::vector<Complex> s_values;
};

/// All X | Y with |X|, |Y| in `sizes` placed around every cut of the chain
/// where they fit.
GGrid size_grid(const Interval& chain, std::span<const int> sizes, std::vector<Complex> s_values);

/// The pairs (A∩∂^kB, B) and ((AB)∩∂^kB, C∩∂^kB) for k = 1..max(|A|,|C|),
/// i.e. every expansional that enters the decomposition of ρ_AC.
GGrid covering_grid(const RegionsABC& regions, std::vector<Complex> s_values);

GGrid merge(GGrid a, const GGrid& b);

struct GEstimate {
  double value = 1.0;  // max(1, ||E||, ||E^{-1}||) over the grid
  GGrid grid;
};

GEstimate estimate_G(const Interaction& ia, const GGrid& grid);

/// G^ell / (floor(ell/r) + 1)!; r = 0 is treated as r = 1.
double factorial_bound(double G, int ell, int range);

struct DifferenceDecayReport {
  int ell = 0;  // min(|X|, |Y|)
  double diff_norm = 0.0;
  double diff_inv_norm = 0.0;
  double bound = 0.0;
  bool holds = false;
};

/// ||E_{X,Y}(s) - E_{X̃X, YỸ}(s)|| (and the same for inverses) against the
/// factorial bound with ell = min(|X|,|Y|). X̃ must end where X begins and Ỹ
/// start where Y ends; either may be empty.
DifferenceDecayReport difference_decay(const Interaction& ia, const Interval& x,
                                       const Interval& y, const Interval& x_ext,
                                       const Interval& y_ext, Complex s, double G_emp);

struct ContractionReport {
  LocalOperator image;  // tr_B[(1 ⊗ ρ_B) X]
  double lhs = 0.0;     // ||image||
  double rhs = 0.0;     // ||X||
  bool holds = false;
};

/// rho_b must be a normalized state; X may be supported anywhere that includes
/// supp(rho_b).
ContractionReport contraction_check(const LocalOperator& rho_b, const LocalOperator& x);

}  // namespace entlen
