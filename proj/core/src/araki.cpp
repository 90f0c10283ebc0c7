#include "entlen/araki.hpp"

#include <cmath>

namespace entlen {
namespace {

void require_adjacent(const Interval& x, const Interval& y) {
  if (x.empty() || y.empty()) throw DomainError("expansional needs nonempty intervals");
  if (x.end != y.begin) throw DomainError("expansional needs X immediately preceding Y");
}

void require_s(Complex s) {
  if (std::abs(s) > 1.0 + 1e-15) throw DomainError("expansional requires |s| <= 1");
}

bool has_cross_terms(const Interaction& ia, const Interval& x, const Interval& y) {
  for (const auto& [support, op] : ia.terms()) {
    bool in_x = false, in_y = false;
    for (int i : support) {
      in_x = in_x || x.contains(i);
      in_y = in_y || y.contains(i);
    }
    if (in_x && in_y) return true;
  }
  return false;
}

struct Factors {
  LocalOperator coupled;    // e^{-s H_XY}
  LocalOperator decoupled;  // e^{s (H_X + H_Y)}
  LocalOperator coupled_inv;
  LocalOperator decoupled_inv;
};

Factors factors(const Interaction& ia, const Interval& x, const Interval& y, Complex s) {
  const Interval xy{x.begin, y.end};
  const LocalOperator h_xy = hamiltonian(ia, xy);
  const HermitianEigen eig_xy = eigh(h_xy);
  const LocalOperator h_x = hamiltonian(ia, x);
  const LocalOperator h_y = hamiltonian(ia, y);
  const HermitianEigen eig_x = eigh(h_x);
  const HermitianEigen eig_y = eigh(h_y);
  auto ex = [](Complex t) { return [t](double v) { return std::exp(t * v); }; };
  // H_X and H_Y act on disjoint sites, so e^{s(H_X+H_Y)} = e^{sH_X} ⊗ e^{sH_Y}.
  return {herm_fn(h_xy, eig_xy, ex(-s)),
          kron(herm_fn(h_x, eig_x, ex(s)), herm_fn(h_y, eig_y, ex(s))),
          herm_fn(h_xy, eig_xy, ex(s)),
          kron(herm_fn(h_x, eig_x, ex(-s)), herm_fn(h_y, eig_y, ex(-s)))};
}

}  // namespace

LocalOperator expansional_operator(const Interaction& ia, const Interval& x, const Interval& y,
                                   Complex s) {
  require_adjacent(x, y);
  require_s(s);
  const Sites xy = Interval{x.begin, y.end}.sites();
  if (s == Complex{0.0, 0.0} || !has_cross_terms(ia, x, y)) {
    return LocalOperator::identity(ia.local_dim(), xy);
  }
  const Factors f = factors(ia, x, y, s);
  return f.coupled * f.decoupled;
}

ExpansionalReport expansional(const Interaction& ia, const Interval& x, const Interval& y,
                              Complex s) {
  require_adjacent(x, y);
  require_s(s);
  const Sites xy = Interval{x.begin, y.end}.sites();
  const int d = ia.local_dim();

  if (s == Complex{0.0, 0.0} || !has_cross_terms(ia, x, y)) {
    // H_XY = H_X + H_Y (or s = 0): the expansional is exactly the identity.
    LocalOperator one = LocalOperator::identity(d, xy);
    return {s, x, y, one, one, 1.0, 1.0, 0.0, 0.0};
  }

  const Factors f = factors(ia, x, y, s);
  LocalOperator e = f.coupled * f.decoupled;
  LocalOperator e_inv = f.decoupled_inv * f.coupled_inv;

  ExpansionalReport rep{s, x, y, e, e_inv, operator_norm(e), operator_norm(e_inv), 0.0, 0.0};
  const LocalOperator one = LocalOperator::identity(d, xy);
  rep.inverse_defect = (e * e_inv - one).frobenius() / one.frobenius();
  rep.reconstruction_defect = relative_frobenius_error(e * f.decoupled_inv, f.coupled);
  return rep;
}

std::pair<Interval, Interval> truncated_pair(const RegionsABC& regions, ExpansionalPair pair,
                                             int k) {
  const Interval nb = k_neighborhood(regions, k);
  const Interval a = intersect(regions.A(), nb);
  const Interval c = intersect(regions.C(), nb);
  if (pair == ExpansionalPair::A_B) return {a, intersect(regions.B(), nb)};
  const Interval ab = intersect(Interval{regions.A().begin, regions.B().end}, nb);
  return {ab, c};
}

std::optional<ExpansionalReport> truncated_expansional(const Interaction& ia,
                                                       const RegionsABC& regions,
                                                       ExpansionalPair pair, int k, Complex s) {
  const auto [x, y] = truncated_pair(regions, pair, k);
  if (x.empty() || y.empty()) return std::nullopt;
  return expansional(ia, x, y, s);
}

GGrid size_grid(const Interval& chain, std::span<const int> sizes, std::vector<Complex> s_values) {
  GGrid grid;
  grid.s_values = std::move(s_values);
  for (int sx : sizes) {
    for (int sy : sizes) {
      if (sx < 1 || sy < 1) throw DomainError("grid sizes must be positive");
      for (int cut = chain.begin + sx; cut + sy <= chain.end; ++cut) {
        grid.pairs.push_back({{cut - sx, cut}, {cut, cut + sy}});
      }
    }
  }
  return grid;
}

GGrid covering_grid(const RegionsABC& regions, std::vector<Complex> s_values) {
  GGrid grid;
  grid.s_values = std::move(s_values);
  for (int k = 1; k <= regions.saturation_radius(); ++k) {
    for (auto pair : {ExpansionalPair::A_B, ExpansionalPair::AB_C}) {
      auto xy = truncated_pair(regions, pair, k);
      if (xy.first.empty() || xy.second.empty()) continue;
      if (std::find(grid.pairs.begin(), grid.pairs.end(), xy) == grid.pairs.end()) {
        grid.pairs.push_back(xy);
      }
    }
  }
  return grid;
}

GGrid merge(GGrid a, const GGrid& b) {
  for (const auto& p : b.pairs) {
    if (std::find(a.pairs.begin(), a.pairs.end(), p) == a.pairs.end()) a.pairs.push_back(p);
  }
  for (const auto& s : b.s_values) {
    if (std::find(a.s_values.begin(), a.s_values.end(), s) == a.s_values.end()) {
      a.s_values.push_back(s);
    }
  }
  return a;
}

GEstimate estimate_G(const Interaction& ia, const GGrid& grid) {
  GEstimate out;
  out.grid = grid;
  for (const auto& [x, y] : grid.pairs) {
    for (const Complex s : grid.s_values) {
      const ExpansionalReport rep = expansional(ia, x, y, s);
      out.value = std::max({out.value, rep.norm_E, rep.norm_E_inv});
    }
  }
  return out;
}

double factorial_bound(double G, int ell, int range) {
  const int r = std::max(range, 1);
  const int n = ell / r + 1;
  return std::exp(ell * std::log(G) - std::lgamma(n + 1.0));
}

DifferenceDecayReport difference_decay(const Interaction& ia, const Interval& x,
                                       const Interval& y, const Interval& x_ext,
                                       const Interval& y_ext, Complex s, double G_emp) {
  require_adjacent(x, y);
  if (!x_ext.empty() && x_ext.end != x.begin) {
    throw DomainError("left extension must end where X begins");
  }
  if (!y_ext.empty() && y_ext.begin != y.end) {
    throw DomainError("right extension must start where Y ends");
  }
  const Interval big_x{x_ext.empty() ? x.begin : x_ext.begin, x.end};
  const Interval big_y{y.begin, y_ext.empty() ? y.end : y_ext.end};
  const Sites big = Interval{big_x.begin, big_y.end}.sites();

  const ExpansionalReport small_rep = expansional(ia, x, y, s);
  const ExpansionalReport big_rep = expansional(ia, big_x, big_y, s);

  DifferenceDecayReport rep;
  rep.ell = std::min(x.size(), y.size());
  rep.diff_norm = operator_norm(embed(small_rep.E, big) - big_rep.E);
  rep.diff_inv_norm = operator_norm(embed(small_rep.E_inv, big) - big_rep.E_inv);
  rep.bound = factorial_bound(G_emp, rep.ell, ia.range());
  rep.holds = std::max(rep.diff_norm, rep.diff_inv_norm) <= rep.bound;
  return rep;
}

ContractionReport contraction_check(const LocalOperator& rho_b, const LocalOperator& x) {
  if (!is_subset(rho_b.support(), x.support())) {
    throw DomainError("X must act on the support of rho_B");
  }
  if (!rho_b.is_hermitian() || std::abs(rho_b.trace() - Complex{1.0, 0.0}) > 1e-10 ||
      !is_psd(rho_b)) {
    throw DomainError("rho_B must be a normalized state");
  }
  LocalOperator image = partial_trace(embed(rho_b, x.support()) * x, rho_b.support());
  const double lhs = operator_norm(image);
  const double rhs = operator_norm(x);
  return {std::move(image), lhs, rhs, lhs <= rhs * (1.0 + 1e-12) + 1e-300};
}

}  // namespace entlen
