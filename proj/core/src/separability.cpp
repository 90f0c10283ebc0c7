#include "entlen/separability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace entlen {
namespace {

constexpr double kHalf = 0.5;

void require_cut(const Cut& cut) {
  if (!is_strictly_increasing(cut.A) || !is_strictly_increasing(cut.C)) {
    throw DomainError("cut sides must be strictly increasing site lists");
  }
  if (!site_intersection(cut.A, cut.C).empty()) throw DomainError("cut sides overlap");
}

void require_partition(const Sites& support, const Cut& cut) {
  require_cut(cut);
  if (site_union(cut.A, cut.C) != support) {
    throw DomainError("cut does not partition the operator support");
  }
}

void require_b_range(const Interaction& ia, const RegionsABC& regions) {
  if (regions.B().size() < ia.range()) {
    std::ostringstream os;
    os << "|B| = " << regions.B().size() << " is smaller than the interaction range "
       << ia.range() << " (H_AC would not split as H_A + H_C)";
    throw PreconditionError(os.str());
  }
}

Cut restrict_cut(const Cut& cut, const Sites& support) {
  return {site_intersection(support, cut.A), site_intersection(support, cut.C)};
}

std::size_t side_dim(int d, const Sites& s) { return hilbert_dim(d, s.size()); }

double factor_margin(const LocalOperator& f) {
  const RealVector ev = eigenvalues(f);
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  return ev.minCoeff() / scale;
}

NegativityResult negativity_of_pt(const Matrix& pt) {
  const Matrix h = (pt + pt.adjoint()) * kHalf;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  const RealVector& ev = es.eigenvalues();
  NegativityResult out;
  out.min_pt_eig = ev.minCoeff();
  for (Eigen::Index i = 0; i < ev.size(); ++i) out.negativity += std::max(-ev(i), 0.0);
  return out;
}

// PPT verdict for 1 + Δ normalized to a state. Non-positive traces are kept
// unnormalized; such operators are not states and fail PPT anyway.
NegativityResult shifted_ppt(const Matrix& delta_bip, std::size_t da, std::size_t dc) {
  Matrix op = delta_bip;
  op.diagonal().array() += Complex{1.0, 0.0};
  const double tr = op.trace().real();
  if (tr > 0.0) op /= tr;
  return negativity_of_pt(partial_transpose_bipartite(op, da, dc));
}

Certificate gurvits_core(const Matrix& delta_bip, std::size_t da, std::size_t dc) {
  const Matrix h = (delta_bip + delta_bip.adjoint()) * kHalf;
  Certificate cert;
  cert.dim_A = da;
  cert.dim_C = dc;
  cert.tolerances = {{"negativity_zero", kNegativityZeroTol}};

  BallBlock block;
  block.identity_coeff = 1.0;
  block.delta = h;
  block.dim_A = da;
  block.dim_C = dc;
  block.delta_norm = Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly)
                         .eigenvalues()
                         .cwiseAbs()
                         .maxCoeff();
  cert.ball_margin = block.margin();

  const NegativityResult ppt = shifted_ppt(h, da, dc);
  cert.negativity = ppt.negativity;
  cert.min_pt_eig = ppt.min_pt_eig;

  Matrix target = h;
  target.diagonal().array() += Complex{1.0, 0.0};
  cert.target = std::move(target);

  if (block.margin() >= 0.0) {
    if (ppt.negativity > kNegativityZeroTol) {
      std::ostringstream os;
      os << "operator inside the separable ball fails PPT (negativity " << ppt.negativity
         << ")";
      throw InternalConsistencyError(os.str());
    }
    cert.verdict = Verdict::SeparableByConstruction;
  } else {
    cert.verdict = ppt.negativity <= kNegativityZeroTol ? Verdict::PPTConsistent
                                                        : Verdict::Entangled;
  }
  cert.ball_blocks.push_back(std::move(block));
  return cert;
}

Certificate exact_core(const Matrix& rho_bip, std::size_t da, std::size_t dc) {
  if (da * dc > 6) {
    std::ostringstream os;
    os << "PPT is only exact for d_A d_C <= 6 (got " << da << "x" << dc
       << "); use gurvits_check or theorem_pipeline";
    throw DomainError(os.str());
  }
  const NegativityResult nr = negativity(rho_bip, da, dc);
  Certificate cert;
  cert.dim_A = da;
  cert.dim_C = dc;
  cert.negativity = nr.negativity;
  cert.min_pt_eig = nr.min_pt_eig;
  cert.target = rho_bip;
  cert.tolerances = {{"negativity_zero", kNegativityZeroTol}};
  cert.verdict =
      nr.negativity <= kNegativityZeroTol ? Verdict::PPTConsistent : Verdict::Entangled;
  return cert;
}

// (Z_k / Z_B)-free sandwich e^{H_AC/2} ρ^k_AC e^{H_AC/2} and its ingredients.
struct Sandwich {
  Interval region, a, c;
  double log_Z = 0.0;
  LocalOperator rho_ac, rho_a, rho_c;
  LocalOperator half_a, half_c;  // e^{H_A/2}, e^{H_C/2}
  double min_h_a = 0.0, min_h_c = 0.0;
  LocalOperator tilde_ac, tilde_a, tilde_c;
};

Sandwich sandwich(const Interaction& ia, const RegionsABC& regions, int k, std::size_t budget) {
  Sandwich w;
  w.region = k_neighborhood(regions, k);
  w.a = intersect(regions.A(), w.region);
  w.c = intersect(regions.C(), w.region);
  const GibbsEnsemble g(ia, w.region.sites(), budget);
  w.log_Z = g.log_Z();
  w.rho_ac = marginal(g, site_union(w.a.sites(), w.c.sites()));
  w.rho_a = reduce_to(w.rho_ac, w.a.sites());
  w.rho_c = reduce_to(w.rho_ac, w.c.sites());

  const LocalOperator h_a = hamiltonian(ia, w.a);
  const LocalOperator h_c = hamiltonian(ia, w.c);
  const HermitianEigen ea = eigh(h_a);
  const HermitianEigen ec = eigh(h_c);
  w.min_h_a = ea.values.minCoeff();
  w.min_h_c = ec.values.minCoeff();
  auto half = [](double v) { return Complex{std::exp(kHalf * v), 0.0}; };
  w.half_a = herm_fn(h_a, ea, half);
  w.half_c = herm_fn(h_c, ec, half);

  w.tilde_a = (w.half_a * w.rho_a * w.half_a).hermitian_part();
  w.tilde_c = (w.half_c * w.rho_c * w.half_c).hermitian_part();
  const LocalOperator half_ac = kron(w.half_a, w.half_c);
  w.tilde_ac = (half_ac * w.rho_ac * half_ac).hermitian_part();
  return w;
}

LocalOperator embed_on(const LocalOperator& op, const Sites& target) {
  return op.support() == target ? op : embed(op, target);
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::SeparableByConstruction: return "SeparableByConstruction";
    case Verdict::PPTConsistent: return "PPTConsistent";
    case Verdict::Entangled: return "Entangled";
    case Verdict::Withheld: return "Withheld";
  }
  return "Withheld";
}

Verdict verdict_from_string(std::string_view s) {
  for (Verdict v : {Verdict::SeparableByConstruction, Verdict::PPTConsistent,
                    Verdict::Entangled, Verdict::Withheld}) {
    if (to_string(v) == s) return v;
  }
  throw ConfigError("unknown verdict '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// SeparableDecomposition

SeparableDecomposition::SeparableDecomposition(Cut cut, int local_dim)
    : cut_(std::move(cut)), local_dim_(local_dim) {
  require_cut(cut_);
}

void SeparableDecomposition::add_term(double weight, const LocalOperator& factor_a,
                                      const LocalOperator& factor_c) {
  if (!(weight >= 0.0)) throw DomainError("separable terms need nonnegative weights");
  if (!is_subset(factor_a.support(), cut_.A) || !is_subset(factor_c.support(), cut_.C)) {
    throw DomainError("product factor is not supported on its side of the cut");
  }
  terms_.push_back({weight, embed_on(factor_a, cut_.A), embed_on(factor_c, cut_.C)});
}

void SeparableDecomposition::add_identity(double coeff) {
  if (!(coeff >= 0.0)) throw DomainError("identity coefficient must be nonnegative");
  identity_ += coeff;
}

std::size_t SeparableDecomposition::caratheodory_bound() const {
  const std::size_t d = side_dim(local_dim_, cut_.A) * side_dim(local_dim_, cut_.C);
  return d * d;
}

LocalOperator SeparableDecomposition::reconstruct() const {
  const Sites all = site_union(cut_.A, cut_.C);
  LocalOperator out = LocalOperator::identity(local_dim_, all);
  out *= identity_;
  for (const ProductTerm& t : terms_) {
    LocalOperator p = kron(t.factor_A, t.factor_C);
    p *= t.weight;
    out += p;
  }
  return out;
}

SeparableDecomposition::Validation SeparableDecomposition::validate(const LocalOperator& target,
                                                                   double psd_tol) const {
  Validation v;
  v.weights_nonnegative = identity_ >= 0.0;
  v.worst_factor_margin = std::numeric_limits<double>::infinity();
  for (const ProductTerm& t : terms_) {
    v.weights_nonnegative = v.weights_nonnegative && t.weight >= 0.0;
    v.worst_factor_margin =
        std::min({v.worst_factor_margin, factor_margin(t.factor_A), factor_margin(t.factor_C)});
  }
  v.factors_psd = terms_.empty() || v.worst_factor_margin >= -psd_tol;
  if (terms_.empty()) v.worst_factor_margin = 0.0;
  v.term_count_ok = terms_.size() <= caratheodory_bound();
  const Sites all = site_union(cut_.A, cut_.C);
  if (!is_subset(target.support(), all)) {
    throw DomainError("target is not supported on the cut");
  }
  v.reconstruction_rel_err = relative_frobenius_error(reconstruct(), embed_on(target, all));
  return v;
}

SeparableDecomposition SeparableDecomposition::conjugated(const LocalOperator& y_a,
                                                          const LocalOperator& y_c) const {
  if (!is_subset(y_a.support(), cut_.A) || !is_subset(y_c.support(), cut_.C)) {
    throw DomainError("conjugating operators must act on their own side of the cut");
  }
  const LocalOperator ya = embed_on(y_a, cut_.A);
  const LocalOperator yc = embed_on(y_c, cut_.C);
  SeparableDecomposition out(cut_, local_dim_);
  for (const ProductTerm& t : terms_) {
    out.terms_.push_back({t.weight, (ya * t.factor_A * ya.adjoint()).hermitian_part(),
                          (yc * t.factor_C * yc.adjoint()).hermitian_part()});
  }
  if (identity_ > 0.0) {
    out.terms_.push_back({identity_, (ya * ya.adjoint()).hermitian_part(),
                          (yc * yc.adjoint()).hermitian_part()});
  }
  return out;
}

SeparableDecomposition SeparableDecomposition::combine(const SeparableDecomposition& a,
                                                       double wa,
                                                       const SeparableDecomposition& b,
                                                       double wb) {
  if (a.cut_.A != b.cut_.A || a.cut_.C != b.cut_.C || a.local_dim_ != b.local_dim_) {
    throw DomainError("combined decompositions must share the cut");
  }
  if (!(wa >= 0.0) || !(wb >= 0.0)) throw DomainError("conic weights must be nonnegative");
  SeparableDecomposition out(a.cut_, a.local_dim_);
  for (const ProductTerm& t : a.terms_) out.terms_.push_back({wa * t.weight, t.factor_A, t.factor_C});
  for (const ProductTerm& t : b.terms_) out.terms_.push_back({wb * t.weight, t.factor_A, t.factor_C});
  out.identity_ = wa * a.identity_ + wb * b.identity_;
  return out;
}

// ---------------------------------------------------------------------------
// Ball blocks, certificates, PPT

double BallBlock::radius() const {
  return identity_coeff / std::sqrt(static_cast<double>(dim_A) * static_cast<double>(dim_C));
}

BallBlock make_ball_block(double identity_coeff, const LocalOperator& delta, const Cut& cut) {
  require_cut(cut);
  if (!is_subset(delta.support(), site_union(cut.A, cut.C))) {
    throw DomainError("ball block operator is not supported on the cut");
  }
  const Cut local = restrict_cut(cut, delta.support());
  BallBlock b;
  b.identity_coeff = identity_coeff;
  b.delta = delta.hermitian_part().matrix();
  b.support = delta.support();
  b.dim_A = side_dim(delta.local_dim(), local.A);
  b.dim_C = side_dim(delta.local_dim(), local.C);
  b.delta_norm = operator_norm(LocalOperator(delta.local_dim(), b.support, b.delta));
  return b;
}

bool Certificate::implies_separable() const {
  if (verdict == Verdict::SeparableByConstruction) return true;
  return verdict == Verdict::PPTConsistent && dim_A * dim_C <= 6;
}

Matrix partial_transpose_bipartite(const Matrix& m, std::size_t dim_a, std::size_t dim_c) {
  const auto da = static_cast<Eigen::Index>(dim_a);
  const auto dc = static_cast<Eigen::Index>(dim_c);
  if (m.rows() != da * dc || m.cols() != da * dc) {
    throw DomainError("matrix size does not match d_A * d_C");
  }
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index a = 0; a < da; ++a)
    for (Eigen::Index c = 0; c < dc; ++c)
      for (Eigen::Index a2 = 0; a2 < da; ++a2)
        for (Eigen::Index c2 = 0; c2 < dc; ++c2)
          out(a * dc + c, a2 * dc + c2) = m(a * dc + c2, a2 * dc + c);
  return out;
}

Matrix to_bipartite(const LocalOperator& op, const Cut& cut) {
  require_partition(op.support(), cut);
  const int d = op.local_dim();
  const Sites& sup = op.support();
  const std::size_t n = sup.size();
  // Site-order stride of every site; the A⊗C order lists A's sites then C's.
  std::vector<Eigen::Index> stride(n);
  Eigen::Index acc = 1;
  for (std::size_t i = n; i-- > 0;) {
    stride[i] = acc;
    acc *= d;
  }
  std::vector<Eigen::Index> order_strides;
  for (const Sites* side : {&cut.A, &cut.C}) {
    for (int s : *side) {
      const auto pos = std::lower_bound(sup.begin(), sup.end(), s) - sup.begin();
      order_strides.push_back(stride[static_cast<std::size_t>(pos)]);
    }
  }
  const Eigen::Index dim = op.dim();
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(dim));
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    Eigen::Index rest = idx;
    Eigen::Index site_idx = 0;
    for (std::size_t j = n; j-- > 0;) {
      site_idx += (rest % d) * order_strides[j];
      rest /= d;
    }
    perm[static_cast<std::size_t>(idx)] = site_idx;
  }
  Matrix out(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      out(i, j) = op.matrix()(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  return out;
}

NegativityResult negativity(const Matrix& rho, std::size_t dim_a, std::size_t dim_c) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol * std::max(1.0, rho.norm())) {
    throw DomainError("negativity needs a Hermitian operator");
  }
  return negativity_of_pt(partial_transpose_bipartite(rho, dim_a, dim_c));
}

NegativityResult negativity(const LocalOperator& rho, const Cut& cut) {
  require_partition(rho.support(), cut);
  if (!rho.is_hermitian()) throw DomainError("negativity needs a Hermitian operator");
  return negativity_of_pt(partial_transpose(rho, cut.C).matrix());
}

Certificate gurvits_check(const Matrix& delta, std::size_t dim_a, std::size_t dim_c) {
  if ((delta - delta.adjoint()).cwiseAbs().maxCoeff() >
      kHermitianTol * std::max(1.0, delta.norm())) {
    throw DomainError("gurvits_check needs a Hermitian perturbation");
  }
  if (delta.rows() != static_cast<Eigen::Index>(dim_a * dim_c)) {
    throw DomainError("perturbation size does not match d_A * d_C");
  }
  return gurvits_core(delta, dim_a, dim_c);
}

Certificate gurvits_check(const LocalOperator& delta, const Cut& cut) {
  if (!delta.is_hermitian()) throw DomainError("gurvits_check needs a Hermitian perturbation");
  require_cut(cut);
  if (!is_subset(delta.support(), site_union(cut.A, cut.C))) {
    throw DomainError("perturbation is not supported on the cut");
  }
  const Cut local = restrict_cut(cut, delta.support());
  const int d = delta.local_dim();
  Certificate cert =
      gurvits_core(to_bipartite(delta, local), side_dim(d, local.A), side_dim(d, local.C));
  cert.cut = local;
  cert.local_dim = d;
  // Keep site order for the stored block and target so they embed directly.
  BallBlock& b = cert.ball_blocks.front();
  b.delta = delta.hermitian_part().matrix();
  b.support = delta.support();
  Matrix target = b.delta;
  target.diagonal().array() += Complex{1.0, 0.0};
  cert.target = std::move(target);
  cert.decomposition = SeparableDecomposition(local, d);
  return cert;
}

Certificate exact_sep_test(const Matrix& rho, std::size_t dim_a, std::size_t dim_c) {
  return exact_core(rho, dim_a, dim_c);
}

Certificate exact_sep_test(const LocalOperator& rho, const Cut& cut) {
  require_partition(rho.support(), cut);
  const int d = rho.local_dim();
  Certificate cert = exact_core(to_bipartite(rho, cut), side_dim(d, cut.A), side_dim(d, cut.C));
  cert.cut = cut;
  cert.local_dim = d;
  cert.target = rho.matrix();
  return cert;
}

// ---------------------------------------------------------------------------
// Constant-size decomposition

Prop31Result prop31_decompose(const Interaction& ia, const RegionsABC& regions, int k,
                              std::size_t budget) {
  if (k < 1) throw DomainError("the constant-size decomposition needs k >= 1");
  require_b_range(ia, regions);
  const int d = ia.local_dim();
  Sandwich w = sandwich(ia, regions, k, budget);

  Prop31Result p;
  p.k = k;
  p.region = w.region;
  p.A_k = w.a;
  p.C_k = w.c;
  p.log_Z_k = w.log_Z;
  p.min_eig_A = min_eigenvalue(w.tilde_a);
  p.min_eig_C = min_eigenvalue(w.tilde_c);
  if (!(p.min_eig_A > 0.0) || !(p.min_eig_C > 0.0)) {
    throw InternalConsistencyError("sandwiched marginal is not strictly positive");
  }
  p.gamma = kHalf * p.min_eig_A * p.min_eig_C;
  // λ_min(e^{H/2} ρ e^{H/2}) >= λ_min(ρ) / ||e^{-H}|| with ||e^{-H}|| = e^{-λ_min(H)}.
  p.faithfulness_A = min_eigenvalue(w.rho_a) * std::exp(w.min_h_a);
  p.faithfulness_C = min_eigenvalue(w.rho_c) * std::exp(w.min_h_c);

  const Sites sa = w.a.sites();
  const Sites sc = w.c.sites();
  const LocalOperator one_a = LocalOperator::identity(d, sa);
  const LocalOperator one_c = LocalOperator::identity(d, sc);
  const LocalOperator f_a = w.tilde_a - Complex{p.min_eig_A, 0.0} * one_a;
  const LocalOperator f_c = w.tilde_c - Complex{p.min_eig_C, 0.0} * one_c;
  if (factor_margin(f_a) < -kFactorPsdTol || factor_margin(f_c) < -kFactorPsdTol) {
    throw InternalConsistencyError("shifted factor has a negative eigenvalue");
  }

  p.gamma_terms = SeparableDecomposition(Cut{sa, sc}, d);
  p.gamma_terms.add_term(1.0, f_a, f_c);
  p.gamma_terms.add_term(p.min_eig_A, one_a, f_c);
  p.gamma_terms.add_term(p.min_eig_C, f_a, one_c);
  p.gamma_terms.add_identity(p.gamma);

  p.delta = (w.tilde_ac - kron(w.tilde_a, w.tilde_c)).hermitian_part();
  p.delta_norm = operator_norm(p.delta);
  p.ball_ratio = p.delta_norm / p.gamma;
  p.ball_threshold = 1.0 / std::sqrt(static_cast<double>(side_dim(d, sa)) *
                                     static_cast<double>(side_dim(d, sc)));
  p.uniform_threshold = std::pow(static_cast<double>(d), -k);

  LocalOperator assembled = p.gamma_terms.reconstruct();
  assembled += Complex{p.gamma, 0.0} * LocalOperator::identity(d, site_union(sa, sc));
  assembled += p.delta;
  p.reconstruction_rel_err = relative_frobenius_error(assembled, w.tilde_ac);
  p.factors_psd = p.gamma_terms.validate(p.gamma_terms.reconstruct()).factors_psd;
  p.rho_AC = std::move(w.rho_ac);
  p.rho_tilde_AC = std::move(w.tilde_ac);
  p.rho_tilde_A = std::move(w.tilde_a);
  p.rho_tilde_C = std::move(w.tilde_c);
  return p;
}

// ---------------------------------------------------------------------------
// Expansional brackets and the telescoping sum

LocalOperator expansional_bracket(const Interaction& ia, const RegionsABC& regions, int k,
                                  Complex s, std::optional<Interval> workspace,
                                  std::size_t budget) {
  if (k < 0) throw DomainError("bracket index must be nonnegative");
  const int d = ia.local_dim();
  const Interval nb = k_neighborhood(regions, k);
  const Interval w = workspace.value_or(nb);
  if (w.begin > nb.begin || w.end < nb.end) {
    throw DomainError("bracket workspace must contain the k-neighbourhood of B");
  }
  if (w.begin < 0 || w.end > ia.num_sites()) throw DomainError("workspace leaves the chain");
  check_budget(d, static_cast<std::size_t>(w.size()), budget);

  const Sites ws = w.sites();
  const Sites b = regions.B().sites();
  const Sites out_sites = site_difference(ws, b);

  const auto [x1, y1] = truncated_pair(regions, ExpansionalPair::A_B, k);
  const auto [x2, y2] = truncated_pair(regions, ExpansionalPair::AB_C, k);
  const bool e1_trivial = x1.empty() || y1.empty();
  const bool e2_trivial = x2.empty() || y2.empty();
  if (e1_trivial && e2_trivial) return LocalOperator::identity(d, out_sites);

  LocalOperator p = LocalOperator::identity(d, ws);
  if (!e1_trivial) p = expansional_operator(ia, x1, y1, s) * p;
  if (!e2_trivial) p = expansional_operator(ia, x2, y2, s) * p;
  const LocalOperator m = p.adjoint() * p;

  const GibbsEnsemble g_b(ia, b, budget);
  const LocalOperator weighted = embed_on(g_b.rho(), ws) * m;
  return embed_on(partial_trace(weighted, b), out_sites).hermitian_part();
}

DeltaK delta_k(const Interaction& ia, const RegionsABC& regions, int k, Complex s,
               std::size_t budget) {
  if (k < 0) throw DomainError("delta_k needs k >= 0");
  const LocalOperator hi = expansional_bracket(ia, regions, k + 1, s, {}, budget);
  const LocalOperator lo = expansional_bracket(ia, regions, k, s, {}, budget);
  DeltaK out;
  out.k = k;
  out.op = embed_on((hi - lo).hermitian_part(), hi.support());
  out.norm = operator_norm(out.op);
  out.support_size = static_cast<int>(out.op.support().size());
  return out;
}

double delta_k_bound(double G, int k, int range) {
  return 4.0 * G * G * G * factorial_bound(G, k, range);
}

LocalOperator sandwiched_marginal(const Interaction& ia, const RegionsABC& regions,
                                  std::size_t budget) {
  require_b_range(ia, regions);
  const int K = regions.saturation_radius();
  const Sandwich w = sandwich(ia, regions, K, budget);
  const double log_zb = log_partition(hamiltonian(ia, regions.B()));
  return Complex{std::exp(w.log_Z - log_zb), 0.0} * w.tilde_ac;
}

TelescopeReport telescope_verify(const Interaction& ia, const RegionsABC& regions, int k0,
                                 Complex s, std::size_t budget) {
  require_b_range(ia, regions);
  if (k0 < 0) throw DomainError("telescope start k0 must be nonnegative");
  const int d = ia.local_dim();
  const int K = regions.saturation_radius();
  const int top = std::max(k0, K);
  const Sites ac = part_sites(regions, Part::AC);

  std::vector<LocalOperator> brackets;
  for (int k = k0; k <= top; ++k) {
    brackets.push_back(expansional_bracket(ia, regions, k, s, {}, budget));
  }

  TelescopeReport rep;
  rep.k0 = k0;
  rep.saturation = K;
  rep.lhs = embed_on(brackets.back(), ac);
  LocalOperator assembled = embed_on(brackets.front(), ac);
  for (int k = k0; k < K; ++k) {
    const LocalOperator& hi = brackets[static_cast<std::size_t>(k + 1 - k0)];
    const LocalOperator& lo = brackets[static_cast<std::size_t>(k - k0)];
    DeltaK dk;
    dk.k = k;
    dk.op = embed_on((hi - lo).hermitian_part(), hi.support());
    dk.norm = operator_norm(dk.op);
    dk.support_size = static_cast<int>(dk.op.support().size());
    assembled += dk.op;
    rep.deltas.push_back(std::move(dk));
  }
  rep.telescope_rel_err = relative_frobenius_error(assembled, rep.lhs);

  if (s == Complex{kHalf, 0.0}) {
    const LocalOperator gibbs_lhs = sandwiched_marginal(ia, regions, budget);
    rep.sandwich_rel_err = relative_frobenius_error(rep.lhs, gibbs_lhs);
    rep.total_rel_err = relative_frobenius_error(assembled, gibbs_lhs);
    if (k0 == 0) {
      rep.k0_identity_rel_err =
          relative_frobenius_error(brackets.front(), LocalOperator::identity(d, {}));
    } else {
      const Sandwich w = sandwich(ia, regions, k0, budget);
      const double log_zb = log_partition(hamiltonian(ia, regions.B()));
      const LocalOperator term = Complex{std::exp(w.log_Z - log_zb), 0.0} * w.tilde_ac;
      rep.k0_identity_rel_err = relative_frobenius_error(brackets.front(), term);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Full pipeline

namespace {

struct Candidate {
  int k0 = 0;
  bool certified = false;
  double worst_relative_margin = -std::numeric_limits<double>::infinity();
  DecompositionReport report;
};

}  // namespace

DecompositionReport theorem_pipeline(const Interaction& ia, const RegionsABC& regions,
                                     const PipelineOptions& options) {
  require_b_range(ia, regions);
  const int d = ia.local_dim();
  const int r = std::max(ia.range(), 1);
  const int K = regions.saturation_radius();
  const std::size_t budget = options.budget;
  check_budget(d, static_cast<std::size_t>(regions.all().size()), budget);
  if (options.k0 && (*options.k0 < 1 || *options.k0 > K)) {
    throw DomainError("k0 must lie in 1..max(|A|,|C|)");
  }

  const double G = options.G_emp ? *options.G_emp
                                 : estimate_G(ia, covering_grid(regions, {Complex{kHalf, 0.0}})).value;
  const double log_zb = log_partition(hamiltonian(ia, regions.B()));
  const Sites sa = regions.A().sites();
  const Sites sc = regions.C().sites();
  const Sites ac = site_union(sa, sc);
  const Cut cut{sa, sc};

  const LocalOperator lhs = sandwiched_marginal(ia, regions, budget);
  const AcMarginals marg = ac_marginals(ia, regions, budget);
  const double neg = negativity(marg.rho_AC, cut).negativity;

  std::vector<DeltaK> deltas;  // Δ_k for k = 1..K-1
  {
    LocalOperator lo = expansional_bracket(ia, regions, 1, kHalf, {}, budget);
    for (int k = 1; k < K; ++k) {
      LocalOperator hi = expansional_bracket(ia, regions, k + 1, kHalf, {}, budget);
      DeltaK dk;
      dk.k = k;
      dk.op = embed_on((hi - lo).hermitian_part(), hi.support());
      dk.norm = operator_norm(dk.op);
      dk.support_size = static_cast<int>(dk.op.support().size());
      deltas.push_back(std::move(dk));
      lo = std::move(hi);
    }
  }

  std::vector<Prop31Result> props;
  std::vector<double> ks, masses;
  for (int k = 1; k <= K; ++k) {
    props.push_back(prop31_decompose(ia, regions, k, budget));
    const Prop31Result& p = props.back();
    ks.push_back(k);
    masses.push_back(std::exp(p.log_Z_k - log_zb) * p.gamma);
  }

  PipelineConstants constants;
  constants.G_emp = G;
  const DecayFit fit = fit_exponential_decay(ks, masses);
  if (fit.points >= 2) {
    constants.C = fit.C;
    constants.alpha = fit.alpha;
  } else {
    constants.C = masses.front();
    constants.alpha = 0.0;
  }
  constants.C_prime = std::max(1.0, 8.0 * d * G * G * G / constants.C);
  constants.alpha_prime = std::log(2.0 * d * G);
  constants.alpha0 = constants.alpha - std::log(2.0);
  constants.k0_closed_form =
      r * std::exp(1.0) *
      std::exp(r * (std::log(constants.C_prime) + constants.alpha0 + constants.alpha_prime));

  std::vector<int> candidates;
  if (options.k0) {
    candidates.push_back(*options.k0);
  } else {
    for (int k = 1; k <= K; ++k) candidates.push_back(k);
  }

  std::optional<Candidate> best;
  std::vector<int> tried;
  for (int k0 : candidates) {
    tried.push_back(k0);
    const Prop31Result& p = props[static_cast<std::size_t>(k0 - 1)];
    const double zratio = std::exp(p.log_Z_k - log_zb);
    const double mass = zratio * p.gamma;

    Candidate cand;
    cand.k0 = k0;
    DecompositionReport& rep = cand.report;
    rep.k0 = k0;
    rep.gamma_k0 = p.gamma;
    rep.Z_ratio = zratio;
    rep.identity_mass = mass;
    rep.prop_ball_ratio = p.ball_ratio;
    rep.prop_ball_threshold = p.ball_threshold;
    rep.prop_ball_margin = p.ball_threshold - p.ball_ratio;
    rep.negativity = neg;

    SeparableDecomposition dec(cut, d);
    for (const ProductTerm& t : p.gamma_terms.terms()) {
      dec.add_term(zratio * t.weight, t.factor_A, t.factor_C);
    }
    rep.leftover_identity = mass * std::ldexp(1.0, -(K - k0));
    dec.add_identity(rep.leftover_identity);

    std::vector<BallBlock> blocks;
    blocks.push_back(make_ball_block(mass, Complex{zratio, 0.0} * p.delta, cut));
    double worst = blocks.back().margin() / std::max(blocks.back().radius(), 1e-300);
    for (int k = k0; k < K; ++k) {
      const DeltaK& dk = deltas[static_cast<std::size_t>(k - 1)];
      const double share = mass * std::ldexp(1.0, -(k - k0 + 1));
      blocks.push_back(make_ball_block(share, dk.op, cut));
      const BallBlock& b = blocks.back();
      PerKEntry e;
      e.k = k;
      e.delta_norm = b.delta_norm;
      e.identity_budget = share;
      e.ball_radius = b.radius();
      e.ball_margin = b.margin();
      e.factorial_bound = delta_k_bound(G, k, r);
      e.support_size = dk.support_size;
      rep.per_k.push_back(e);
      worst = std::min(worst, b.margin() / std::max(b.radius(), 1e-300));
    }

    LocalOperator assembled = dec.reconstruct();
    for (const BallBlock& b : blocks) {
      Matrix m = b.delta;
      m.diagonal().array() += Complex{b.identity_coeff, 0.0};
      assembled += embed(LocalOperator(d, b.support, m), ac);
    }
    rep.reconstruction_rel_err = relative_frobenius_error(assembled, lhs);
    const auto validation = dec.validate(dec.reconstruct());
    rep.factors_psd = validation.factors_psd;

    PipelineConstants cst = constants;
    const double m_sites = static_cast<double>(p.A_k.size() + p.C_k.size());
    const LocalOperator h_k = hamiltonian(ia, p.region);
    const LocalOperator h_b = hamiltonian(ia, regions.B());
    cst.z_ratio_lower_bound =
        std::exp(m_sites * std::log(static_cast<double>(d)) - operator_norm(h_k - h_b));
    cst.gamma_lower_bound = kHalf * p.faithfulness_A * p.faithfulness_C;
    rep.constants_used = cst;

    const bool margins_ok = std::all_of(blocks.begin(), blocks.end(),
                                        [](const BallBlock& b) { return b.margin() >= 0.0; });
    cand.certified =
        margins_ok && rep.factors_psd && rep.reconstruction_rel_err <= kReconstructionTol;
    cand.worst_relative_margin = worst;
    rep.verdict = cand.certified ? Verdict::SeparableByConstruction : Verdict::Withheld;

    Certificate& cert = rep.certificate;
    cert.verdict = rep.verdict;
    cert.cut = cut;
    cert.local_dim = d;
    cert.dim_A = side_dim(d, sa);
    cert.dim_C = side_dim(d, sc);
    cert.decomposition = std::move(dec);
    cert.ball_blocks = std::move(blocks);
    cert.target = lhs.matrix();
    cert.negativity = neg;
    cert.ball_margin = worst;
    cert.tolerances = {{"factor_psd", kFactorPsdTol},
                       {"reconstruction", kReconstructionTol},
                       {"negativity_zero", kNegativityZeroTol}};
    cert.constants = {{"G_emp", G},
                      {"k0", static_cast<double>(k0)},
                      {"gamma_k0", p.gamma},
                      {"Z_ratio", zratio},
                      {"identity_mass", mass},
                      {"C", cst.C},
                      {"alpha", cst.alpha},
                      {"C_prime", cst.C_prime},
                      {"alpha_prime", cst.alpha_prime},
                      {"alpha0", cst.alpha0},
                      {"k0_closed_form", cst.k0_closed_form}};

    const bool better = !best || (cand.certified && !best->certified) ||
                        (!best->certified && cand.worst_relative_margin > best->worst_relative_margin);
    if (better) best = std::move(cand);
    if (best->certified) break;
  }

  DecompositionReport out = std::move(best->report);
  out.tried_k0 = std::move(tried);
  return out;
}

}  // namespace entlen
