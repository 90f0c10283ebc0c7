#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "entlen/gibbs_state.hpp"
#include "entlen/separability.hpp"
#include "oracles.hpp"

using namespace entlen;

namespace {

Interaction tfi(int n) { return builtin_model("tfi", {{"coupling", 1.0}, {"field", 1.0}}, n); }

Matrix bell() {
  Matrix phi = Matrix::Zero(4, 4);
  phi(0, 0) = phi(0, 3) = phi(3, 0) = phi(3, 3) = 0.5;
  return phi;
}

// |01><10| + |10><01|
Matrix swap_flip() {
  Matrix m = Matrix::Zero(4, 4);
  m(1, 2) = m(2, 1) = 1.0;
  return m;
}

double min_pt_eig_oracle(const Matrix& m) {
  const Matrix pt = oracle::partial_transpose(m, 2, {0, 1}, {1});
  return Eigen::SelfAdjointEigenSolver<Matrix>(pt).eigenvalues()(0);
}

}  // namespace

TEST(Negativity, AnalyticStates) {
  const Cut cut{{0}, {1}};
  const auto b = negativity(LocalOperator(2, {0, 1}, bell()), cut);
  EXPECT_NEAR(b.negativity, 0.5, 1e-14);
  EXPECT_NEAR(b.min_pt_eig, -0.5, 1e-14);

  std::mt19937_64 rng(1);
  const Matrix prod = oracle::kron(oracle::random_state(rng, 2), oracle::random_state(rng, 2));
  EXPECT_LT(negativity(LocalOperator(2, {0, 1}, prod), cut).negativity, 1e-14);

  const auto g = gibbs(builtin_model("classical_ising", {{"coupling", 1.0}, {"field", 0.0}}, 2),
                       Interval{0, 2});
  EXPECT_EQ(negativity(g.rho(), cut).negativity, 0.0);
}

TEST(Negativity, RawMatrixTwoByThree) {
  std::mt19937_64 rng(6);
  const Matrix rho = oracle::random_state(rng, 6);
  const auto raw = negativity(rho, 2, 3);
  // Transposing the 3-dimensional factor by hand.
  Matrix pt(6, 6);
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 3; ++c)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int c2 = 0; c2 < 3; ++c2) pt(a * 3 + c, a2 * 3 + c2) = rho(a * 3 + c2, a2 * 3 + c);
  EXPECT_LT((partial_transpose_bipartite(rho, 2, 3) - pt).norm(), 1e-15);
  const RealVector ev = Eigen::SelfAdjointEigenSolver<Matrix>(pt).eigenvalues();
  EXPECT_NEAR(raw.min_pt_eig, ev(0), 1e-13);
  double neg = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) neg += std::max(0.0, -ev(i));
  EXPECT_NEAR(raw.negativity, neg, 1e-13);
}

TEST(Negativity, CutOrderIsHonoured) {
  std::mt19937_64 rng(7);
  const Matrix x0 = oracle::random_matrix(rng, 2);
  const Matrix x1 = oracle::random_matrix(rng, 2);
  const LocalOperator op(2, {0, 1}, oracle::kron(x0, x1));
  EXPECT_LT((to_bipartite(op, Cut{{1}, {0}}) - oracle::kron(x1, x0)).norm(), 1e-15);
  EXPECT_LT((to_bipartite(op, Cut{{0}, {1}}) - op.matrix()).norm(), 1e-15);
}

TEST(Gurvits, ZeroPerturbationCertified) {
  const Certificate c = gurvits_check(Matrix::Zero(4, 4), 2, 2);
  EXPECT_EQ(c.verdict, Verdict::SeparableByConstruction);
  EXPECT_TRUE(c.implies_separable());
}

TEST(Gurvits, BoundaryOfBall) {
  const Certificate in = gurvits_check(0.5 * swap_flip(), 2, 2);
  EXPECT_EQ(in.verdict, Verdict::SeparableByConstruction);
  ASSERT_TRUE(in.ball_margin.has_value());
  EXPECT_GE(*in.ball_margin, -1e-15);
  EXPECT_GE(min_pt_eig_oracle(Matrix::Identity(4, 4) + 0.5 * swap_flip()), -1e-14);

  const Certificate out = gurvits_check(0.9 * swap_flip(), 2, 2);
  EXPECT_EQ(out.verdict, Verdict::PPTConsistent);
  ASSERT_TRUE(out.ball_margin.has_value());
  EXPECT_LT(*out.ball_margin, 0.0);
  EXPECT_TRUE(out.implies_separable());
}

TEST(Gurvits, SiteBasedBlock) {
  const LocalOperator delta(2, {0, 3}, 0.4 * swap_flip());
  const Certificate c = gurvits_check(delta, Cut{{0}, {3}});
  EXPECT_EQ(c.verdict, Verdict::SeparableByConstruction);
  ASSERT_EQ(c.ball_blocks.size(), 1u);
  EXPECT_NEAR(c.ball_blocks[0].radius(), 0.5, 1e-15);
  EXPECT_THROW(gurvits_check(LocalOperator(2, {0}, pauli_x() * Complex(0, 1)), Cut{{0}, {1}}),
               DomainError);
}

TEST(ExactSep, BellAndMixed) {
  const Certificate b = exact_sep_test(bell(), 2, 2);
  EXPECT_EQ(b.verdict, Verdict::Entangled);
  EXPECT_NEAR(b.negativity, 0.5, 1e-14);
  const Certificate m = exact_sep_test(Matrix(Matrix::Identity(4, 4) / 4.0), 2, 2);
  EXPECT_EQ(m.verdict, Verdict::PPTConsistent);
  EXPECT_TRUE(m.implies_separable());
  EXPECT_THROW(exact_sep_test(Matrix(Matrix::Identity(9, 9)), 3, 3), DomainError);
}

TEST(ExactSep, TransverseIsingMarginalAtLargeB) {
  const auto reg = RegionsABC::from_sizes(1, 6, 1);
  const auto m = ac_marginals(tfi(8), reg);
  const Certificate c = exact_sep_test(m.rho_AC, Cut{{0}, {7}});
  EXPECT_TRUE(c.implies_separable());
}

TEST(Decomposition, ConjugationPreservesCertificate) {
  std::mt19937_64 rng(12);
  const Cut cut{{0}, {1}};
  SeparableDecomposition dec(cut, 2);
  LocalOperator target = LocalOperator::zero(2, {0, 1});
  for (int i = 0; i < 3; ++i) {
    const LocalOperator fa(2, {0}, oracle::random_state(rng, 2));
    const LocalOperator fc(2, {1}, oracle::random_state(rng, 2));
    dec.add_term(0.3 + i, fa, fc);
    target += Complex(0.3 + i) * kron(fa, fc);
  }
  dec.add_identity(0.2);
  target += Complex(0.2) * LocalOperator::identity(2, {0, 1});
  EXPECT_TRUE(dec.validate(target).ok());

  const LocalOperator ya(2, {0}, oracle::random_matrix(rng, 2));
  const LocalOperator yc(2, {1}, oracle::random_matrix(rng, 2));
  const LocalOperator y = kron(ya, yc);
  const LocalOperator conj_target = y * target * y.adjoint();
  const SeparableDecomposition conj = dec.conjugated(ya, yc);
  const auto v = conj.validate(conj_target);
  EXPECT_TRUE(v.ok()) << v.reconstruction_rel_err;
  EXPECT_EQ(conj.residual_identity_coeff(), 0.0);
}

TEST(Decomposition, ConicClosure) {
  std::mt19937_64 rng(13);
  const Cut cut{{0}, {1}};
  SeparableDecomposition a(cut, 2), b(cut, 2);
  a.add_term(1.0, LocalOperator(2, {0}, oracle::random_state(rng, 2)),
             LocalOperator(2, {1}, oracle::random_state(rng, 2)));
  b.add_term(2.0, LocalOperator(2, {0}, oracle::random_state(rng, 2)),
             LocalOperator(2, {1}, oracle::random_state(rng, 2)));
  b.add_identity(0.5);
  const auto sum = SeparableDecomposition::combine(a, 0.25, b, 3.0);
  const LocalOperator expected =
      Complex(0.25) * a.reconstruct() + Complex(3.0) * b.reconstruct();
  EXPECT_TRUE(sum.validate(expected).ok());
  EXPECT_THROW(SeparableDecomposition::combine(a, -1.0, b, 1.0), DomainError);
  EXPECT_THROW(a.add_term(-0.1, LocalOperator::identity(2, {0}), LocalOperator::identity(2, {1})),
               DomainError);
}

TEST(Decomposition, ValidationCatchesNonPsdFactor) {
  const Cut cut{{0}, {1}};
  SeparableDecomposition dec(cut, 2);
  dec.add_term(1.0, LocalOperator(2, {0}, pauli_z()), LocalOperator::identity(2, {1}));
  const auto v = dec.validate(dec.reconstruct());
  EXPECT_FALSE(v.factors_psd);
  EXPECT_LT(v.worst_factor_margin, -0.1);
  EXPECT_EQ(dec.caratheodory_bound(), 16u);
}

TEST(ConstantSizeDecomposition, ZeroInteractionIsExact) {
  const auto ia = builtin_model("zero", {{"range", 1}}, 5);
  const auto p = prop31_decompose(ia, RegionsABC::from_sizes(2, 1, 2), 1);
  EXPECT_EQ(p.delta_norm, 0.0);
  EXPECT_LT(p.reconstruction_rel_err, 1e-15);
  EXPECT_TRUE(p.factors_psd);
  EXPECT_GT(p.gamma, 0.0);
  EXPECT_TRUE(p.ball_holds());
}

TEST(ConstantSizeDecomposition, TransverseIsingWideB) {
  const auto p = prop31_decompose(tfi(8), RegionsABC::from_sizes(1, 6, 1), 1);
  EXPECT_LT(p.reconstruction_rel_err, 1e-10);
  EXPECT_TRUE(p.factors_psd);
  EXPECT_TRUE(p.ball_holds());
  EXPECT_TRUE(p.gamma_terms.validate(p.gamma_terms.reconstruct()).factors_psd);
}

TEST(ConstantSizeDecomposition, TransverseIsingNarrowBFailsBall) {
  const auto p = prop31_decompose(tfi(3), RegionsABC::from_sizes(1, 1, 1), 1);
  EXPECT_FALSE(p.ball_holds());
  EXPECT_TRUE(p.factors_psd);
}

TEST(ConstantSizeDecomposition, Preconditions) {
  const auto ia = builtin_model("random", {{"range", 2}, {"strength", 1.0}}, 5, 1);
  EXPECT_THROW(prop31_decompose(ia, RegionsABC::from_sizes(2, 1, 2), 1), PreconditionError);
  EXPECT_THROW(prop31_decompose(tfi(5), RegionsABC::from_sizes(2, 1, 2), 0), DomainError);
}

TEST(DeltaK, ZeroInteractionAndSaturation) {
  const auto zero = builtin_model("zero", {{"range", 1}}, 6);
  const auto reg = RegionsABC::from_sizes(2, 2, 2);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(delta_k(zero, reg, k).norm, 0.0);

  const auto ia = builtin_model("random", {{"range", 1}, {"strength", 2.0}}, 7, 5);
  const auto reg2 = RegionsABC::from_sizes(3, 2, 2);
  EXPECT_LE(delta_k(ia, reg2, 3).norm, 1e-12);
  EXPECT_LE(delta_k(ia, reg2, 4).norm, 1e-12);
  EXPECT_GT(delta_k(ia, reg2, 1).norm, 1e-8);
}

TEST(DeltaK, SupportContainment) {
  const auto ia = tfi(8);
  const auto reg = RegionsABC::from_sizes(3, 2, 3);
  for (int k = 0; k < 3; ++k) {
    const DeltaK d = delta_k(ia, reg, k);
    const Interval nb = k_neighborhood(reg, k + 1);
    for (int s : d.op.support()) {
      EXPECT_TRUE(nb.contains(s));
      EXPECT_FALSE(reg.B().contains(s));
    }
    EXPECT_EQ(d.support_size, static_cast<int>(d.op.support().size()));
  }
}

TEST(DeltaK, TransverseIsingBoundAndDecay) {
  const auto ia = tfi(9);
  const auto reg = RegionsABC::from_sizes(4, 1, 4);
  const double g = estimate_G(ia, covering_grid(reg, {0.5})).value;
  std::vector<double> norms;
  for (int k = 1; k <= 3; ++k) {
    const DeltaK d = delta_k(ia, reg, k);
    EXPECT_LE(d.norm, delta_k_bound(g, k, 1));
    norms.push_back(d.norm);
  }
  EXPECT_LT(norms[2] / norms[1], norms[1] / norms[0]);
}

TEST(Bracket, ZeroIsIdentity) {
  const auto ia = tfi(5);
  const auto reg = RegionsABC::from_sizes(2, 1, 2);
  const LocalOperator b0 = expansional_bracket(ia, reg, 0);
  EXPECT_LT((b0.matrix() - Matrix::Identity(b0.dim(), b0.dim())).norm(), 1e-15);
}

TEST(Telescope, EndpointAndZeroModel) {
  const auto ia = builtin_model("random", {{"range", 1}, {"strength", 1.0}}, 6, 3);
  const auto reg = RegionsABC::from_sizes(2, 2, 2);
  const auto t = telescope_verify(ia, reg, 2);
  EXPECT_TRUE(t.deltas.empty());
  EXPECT_LT(t.telescope_rel_err, 1e-15);
  ASSERT_TRUE(t.total_rel_err.has_value());
  EXPECT_LT(*t.total_rel_err, 1e-10);

  const auto z = telescope_verify(builtin_model("zero", {{"range", 1}}, 6), reg, 1);
  for (const auto& d : z.deltas) EXPECT_EQ(d.norm, 0.0);
  EXPECT_LT(*z.sandwich_rel_err, 1e-14);
}

TEST(Telescope, TransverseIsingNineSites) {
  const auto t = telescope_verify(tfi(9), RegionsABC::from_sizes(2, 5, 2), 1);
  EXPECT_LT(t.telescope_rel_err, 1e-10);
  EXPECT_LT(*t.sandwich_rel_err, 1e-10);
  EXPECT_LT(*t.k0_identity_rel_err, 1e-10);
  EXPECT_LT(*t.total_rel_err, 1e-10);
}

TEST(Telescope, GeneralSSkipsGibbsRoute) {
  const auto t = telescope_verify(tfi(6), RegionsABC::from_sizes(2, 2, 2), 1, Complex(0.3, 0.2));
  EXPECT_LT(t.telescope_rel_err, 1e-10);
  EXPECT_FALSE(t.sandwich_rel_err.has_value());
}

TEST(Pipeline, ZeroInteractionCertifiedAtFirstRadius) {
  const auto ia = builtin_model("zero", {{"range", 1}}, 7);
  const auto rep = theorem_pipeline(ia, RegionsABC::from_sizes(3, 1, 3));
  EXPECT_EQ(rep.verdict, Verdict::SeparableByConstruction);
  EXPECT_EQ(rep.k0, 1);
  EXPECT_TRUE(rep.certificate.implies_separable());
}

TEST(Pipeline, ClassicalIsingCertifiedWithZeroNegativity) {
  const std::map<std::string, double> p{{"coupling", 1.0}, {"field", 0.2}};
  for (int b : {1, 3}) {
    const auto rep = theorem_pipeline(builtin_model("classical_ising", p, b + 4),
                                      RegionsABC::from_sizes(2, b, 2));
    EXPECT_EQ(rep.negativity, 0.0);
  }
  // First |B| at which the margins turn positive for these couplings.
  const auto rep = theorem_pipeline(builtin_model("classical_ising", p, 11),
                                    RegionsABC::from_sizes(2, 7, 2));
  EXPECT_EQ(rep.negativity, 0.0);
  EXPECT_EQ(rep.verdict, Verdict::SeparableByConstruction);
  EXPECT_LE(rep.reconstruction_rel_err, kReconstructionTol);
}

TEST(Pipeline, TransverseIsingPersistsOnceCertified) {
  int first = -1;
  for (int b = 1; b <= 7; ++b) {
    const auto rep = theorem_pipeline(tfi(b + 2), RegionsABC::from_sizes(1, b, 1));
    if (rep.verdict == Verdict::SeparableByConstruction && first < 0) first = b;
    if (first > 0) {
      EXPECT_EQ(rep.verdict, Verdict::SeparableByConstruction) << "|B| = " << b;
      EXPECT_LE(rep.negativity, kNegativityZeroTol);
    }
  }
  EXPECT_GT(first, 0);
}

TEST(Pipeline, WithheldReportsMargins) {
  const auto rep = theorem_pipeline(tfi(3), RegionsABC::from_sizes(1, 1, 1));
  EXPECT_EQ(rep.verdict, Verdict::Withheld);
  EXPECT_FALSE(rep.tried_k0.empty());
  EXPECT_FALSE(rep.certificate.implies_separable());
}
