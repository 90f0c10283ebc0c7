#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "entlen/tensor_linalg.hpp"
#include "oracles.hpp"

using namespace entlen;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST(Embed, PadsWithIdentity) {
  LocalOperator z(2, {1}, pauli_z());
  const LocalOperator e = embed(z, {0, 1});
  Matrix expected = oracle::kron(Matrix::Identity(2, 2), pauli_z());
  EXPECT_LT((e.matrix() - expected).norm(), 1e-15);
  EXPECT_EQ(e.support(), (Sites{0, 1}));

  const LocalOperator id = embed(LocalOperator::identity(2, {0}), {0, 1, 2});
  EXPECT_LT((id.matrix() - Matrix::Identity(8, 8)).norm(), 1e-15);
}

TEST(Embed, NonContiguousMatchesOracle) {
  const Matrix xx = oracle::kron(pauli_x(), pauli_x());
  const LocalOperator e = embed(LocalOperator(2, {0, 2}, xx), {0, 1, 2});
  EXPECT_LT((e.matrix() - oracle::embed(xx, 2, {0, 2}, {0, 1, 2})).norm(), 1e-15);
}

TEST(Embed, RejectsSupportOutsideTarget) {
  LocalOperator z(2, {3}, pauli_z());
  EXPECT_THROW(embed(z, {0, 1}), DomainError);
}

TEST(Embed, PartialTraceOfPaddingScalesByDimension) {
  std::mt19937_64 rng(11);
  const Matrix m = oracle::random_matrix(rng, 3);
  const LocalOperator op(3, {1}, m);
  const LocalOperator back = partial_trace(embed(op, {0, 1, 2}), {0, 2});
  EXPECT_LT((back.matrix() - 9.0 * m).norm(), 1e-13);
}

TEST(Kron, ProductOnLowerSitesFirst) {
  const LocalOperator a(2, {0}, pauli_x());
  const LocalOperator b(2, {2}, pauli_z());
  const LocalOperator p = kron(a, b);
  EXPECT_EQ(p.support(), (Sites{0, 2}));
  EXPECT_LT((p.matrix() - (oracle::kron(pauli_x(), pauli_z()))).norm(), 1e-15);
  EXPECT_THROW(kron(a, a), DomainError);
}

TEST(PartialTrace, IdentityGivesDimensionFactor) {
  const LocalOperator r = partial_trace(LocalOperator::identity(2, {0, 1}), {1});
  EXPECT_LT((r.matrix() - 2.0 * Matrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(PartialTrace, ProductBasisState) {
  Matrix p = Matrix::Zero(4, 4);
  p(0, 0) = 1.0;
  const LocalOperator r = partial_trace(LocalOperator(2, {0, 1}, p), {1});
  EXPECT_LT((r.matrix() - diag2(1, 0)).norm(), 1e-15);
}

TEST(PartialTrace, MiddleSiteMatchesOracle) {
  std::mt19937_64 rng(3);
  const Matrix rho = oracle::random_state(rng, 8);
  const LocalOperator r = partial_trace(LocalOperator(2, {0, 1, 2}, rho), {1});
  EXPECT_LT((r.matrix() - oracle::partial_trace(rho, 2, {0, 1, 2}, {1})).norm(), 1e-13);
  EXPECT_EQ(r.support(), (Sites{0, 2}));
  EXPECT_THROW(partial_trace(LocalOperator(2, {0, 1, 2}, rho), {5}), DomainError);
}

TEST(PartialTrace, ChainedEqualsDirect) {
  std::mt19937_64 rng(5);
  const Matrix rho = oracle::random_state(rng, 16);
  const LocalOperator op(2, {0, 1, 2, 3}, rho);
  const LocalOperator direct = reduce_to(op, {1});
  const LocalOperator chained = reduce_to(reduce_to(op, {0, 1, 2}), {1});
  EXPECT_LT((direct.matrix() - chained.matrix()).norm(), 1e-13);
  EXPECT_NEAR(direct.trace().real(), 1.0, 1e-13);
}

TEST(PartialTranspose, ProductCase) {
  std::mt19937_64 rng(8);
  const Matrix a = oracle::random_matrix(rng, 2);
  const Matrix b = oracle::random_matrix(rng, 2);
  const LocalOperator ab(2, {0, 1}, oracle::kron(a, b));
  const LocalOperator pt = partial_transpose(ab, {1});
  const Matrix expected = oracle::kron(a, b.transpose());
  EXPECT_LT((pt.matrix() - expected).norm(), 1e-15);
}

TEST(PartialTranspose, Involution) {
  std::mt19937_64 rng(9);
  const LocalOperator op(3, {0, 4}, oracle::random_matrix(rng, 9));
  const LocalOperator twice = partial_transpose(partial_transpose(op, {4}), {4});
  EXPECT_EQ((twice.matrix() - op.matrix()).norm(), 0.0);
  EXPECT_THROW(partial_transpose(op, {2}), DomainError);
}

TEST(PartialTranspose, BellStateSpectrum) {
  Matrix phi = Matrix::Zero(4, 4);
  phi(0, 0) = phi(0, 3) = phi(3, 0) = phi(3, 3) = 0.5;
  const RealVector ev = eigenvalues(partial_transpose(LocalOperator(2, {0, 1}, phi), {1}));
  EXPECT_NEAR(ev(0), -0.5, 1e-14);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(ev(i), 0.5, 1e-14);
}

TEST(HermFn, ExpOfZeroIsIdentity) {
  const LocalOperator e = exp_hermitian(LocalOperator::zero(2, {0, 1}), 1.0);
  EXPECT_LT((e.matrix() - Matrix::Identity(4, 4)).norm(), 1e-15);
}

TEST(HermFn, AnalyticPauliZ) {
  const LocalOperator z(2, {0}, pauli_z());
  const LocalOperator e = herm_fn(z, [](double x) { return Complex(std::exp(-x)); });
  EXPECT_LT((e.matrix() - diag2(std::exp(-1.0), std::exp(1.0))).norm(), 1e-15);
}

TEST(HermFn, ExpMatchesTaylorOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix h = oracle::random_hermitian(rng, 8);
    const LocalOperator op(2, {0, 1, 2}, h);
    for (Complex s : {Complex(1.0, 0.0), Complex(-0.5, 0.0), Complex(0.25, 0.5)}) {
      const Matrix got = exp_hermitian(op, s).matrix();
      EXPECT_LT(oracle::rel_frobenius(got, oracle::expm(s * h)), 1e-12);
    }
  }
}

TEST(HermFn, RejectsNonHermitian) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(exp_hermitian(LocalOperator(2, {0}, m), 1.0), DomainError);
}

TEST(HermFn, LogNeedsPositiveSpectrum) {
  EXPECT_THROW(log_positive(LocalOperator(2, {0}, pauli_z())), DomainError);
  const LocalOperator l = log_positive(LocalOperator(2, {0}, diag2(1.0, std::exp(2.0))));
  EXPECT_LT((l.matrix() - diag2(0.0, 2.0)).norm(), 1e-14);
}

TEST(Norms, IdentityAndDiagonal) {
  const Norms n = norms(LocalOperator::identity(2, {0, 1, 2}));
  EXPECT_NEAR(n.operator_norm, 1.0, 1e-15);
  EXPECT_NEAR(n.trace_norm, 8.0, 1e-14);
  EXPECT_NEAR(n.frobenius, std::sqrt(8.0), 1e-14);

  const Norms d = norms(LocalOperator(2, {0}, diag2(3.0, -4.0)));
  EXPECT_NEAR(d.operator_norm, 4.0, 1e-14);
  EXPECT_NEAR(d.trace_norm, 7.0, 1e-14);
  ASSERT_TRUE(d.min_eig.has_value());
  EXPECT_NEAR(*d.min_eig, -4.0, 1e-14);
  EXPECT_NEAR(*d.max_eig, 3.0, 1e-14);
}

TEST(Norms, OrderingAndSingularValueOracle) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = oracle::random_matrix(rng, 4);
    const Norms n = norms(LocalOperator(2, {0, 1}, m));
    EXPECT_NEAR(n.operator_norm, oracle::spectral_norm(m), 1e-12);
    EXPECT_LE(n.operator_norm, n.frobenius + 1e-12);
    EXPECT_LE(n.frobenius, n.trace_norm + 1e-12);
    EXPECT_FALSE(n.min_eig.has_value());
  }
}

TEST(LocalOperator, ArithmeticUnifiesSupports) {
  const LocalOperator a(2, {0}, pauli_x());
  const LocalOperator b(2, {1}, pauli_z());
  const LocalOperator sum = a + b;
  EXPECT_EQ(sum.support(), (Sites{0, 1}));
  const Matrix expected = oracle::embed(pauli_x(), 2, {0}, {0, 1}) +
                          oracle::embed(pauli_z(), 2, {1}, {0, 1});
  EXPECT_LT((sum.matrix() - expected).norm(), 1e-15);
  EXPECT_LT(((a * b).matrix() - (oracle::kron(pauli_x(), pauli_z()))).norm(),
            1e-15);
}

TEST(LocalOperator, ValidatesShape) {
  EXPECT_THROW(LocalOperator(2, {0, 1}, Matrix::Identity(3, 3)), DomainError);
  EXPECT_THROW(LocalOperator(2, {1, 0}, Matrix::Identity(4, 4)), DomainError);
}

TEST(LocalOperator, PsdCheck) {
  EXPECT_TRUE(is_psd(LocalOperator(2, {0}, diag2(1.0, 0.0))));
  EXPECT_FALSE(is_psd(LocalOperator(2, {0}, diag2(1.0, -1e-3))));
  EXPECT_NEAR(min_eigenvalue(LocalOperator(2, {0}, pauli_x())), -1.0, 1e-15);
}
