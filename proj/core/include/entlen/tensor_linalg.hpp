#pragma once

// Dense operators on tensor products of d-dimensional sites.
//
// Basis convention: for an operator supported on sites s_0 < s_1 < ... < s_{n-1}
// the basis index is sum_j x_j d^{n-1-j}, i.e. the lowest site is the most
// significant digit and kron(a, b) places a on the lower sites.

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "entlen/errors.hpp"

namespace entlen {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Sites = std::vector<int>;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;

/// d^n, throwing DomainError on overflow past 2^62.
std::size_t hilbert_dim(int local_dim, std::size_t num_sites);

bool is_strictly_increasing(const Sites& sites);
bool is_subset(const Sites& sub, const Sites& super);
Sites site_union(const Sites& a, const Sites& b);
Sites site_difference(const Sites& a, const Sites& b);
Sites site_intersection(const Sites& a, const Sites& b);

/// A dense complex matrix tagged with the sorted list of sites it acts on.
/// An empty support denotes a scalar (1x1 matrix).
class LocalOperator {
 public:
  /// The scalar 0 (qubit chain).
  LocalOperator() : local_dim_(2), matrix_(Matrix::Zero(1, 1)) {}
  LocalOperator(int local_dim, Sites support, Matrix matrix);

  static LocalOperator identity(int local_dim, Sites support);
  static LocalOperator zero(int local_dim, Sites support);
  static LocalOperator scalar(int local_dim, Complex value);

  int local_dim() const noexcept { return local_dim_; }
  const Sites& support() const noexcept { return support_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

  /// max|M - M^dagger| <= rel_tol * ||M||_F.
  bool is_hermitian(double rel_tol = kHermitianTol) const;
  LocalOperator adjoint() const;
  /// (M + M^dagger) / 2.
  LocalOperator hermitian_part() const;
  Complex trace() const { return matrix_.trace(); }
  double frobenius() const { return matrix_.norm(); }

  LocalOperator& operator*=(Complex factor);
  LocalOperator& operator+=(const LocalOperator& other);
  LocalOperator& operator-=(const LocalOperator& other);

 private:
  int local_dim_;
  Sites support_;
  Matrix matrix_;
};

// Binary arithmetic embeds both operands on the union of their supports.
LocalOperator operator+(const LocalOperator& a, const LocalOperator& b);
LocalOperator operator-(const LocalOperator& a, const LocalOperator& b);
LocalOperator operator*(const LocalOperator& a, const LocalOperator& b);
LocalOperator operator*(Complex factor, const LocalOperator& op);
LocalOperator operator*(const LocalOperator& op, Complex factor);

/// op ⊗ 1 on target \ support, legs ordered as target.
LocalOperator embed(const LocalOperator& op, const Sites& target);

/// Tensor product of operators with disjoint supports.
LocalOperator kron(const LocalOperator& a, const LocalOperator& b);

/// Unnormalized partial trace over `drop`: tr_X[1] = d^{|X|} 1.
LocalOperator partial_trace(const LocalOperator& op, const Sites& drop);

/// Partial trace keeping only `keep`.
LocalOperator reduce_to(const LocalOperator& op, const Sites& keep);

/// Transposes the tensor legs in `subset`.
LocalOperator partial_transpose(const LocalOperator& op, const Sites& subset);

struct HermitianEigen {
  RealVector values;  // ascending
  Matrix vectors;
};

/// Full eigendecomposition; throws DomainError if op is not Hermitian.
HermitianEigen eigh(const LocalOperator& op);
RealVector eigenvalues(const LocalOperator& op);

/// U f(Λ) U^dagger.
LocalOperator herm_fn(const LocalOperator& op,
                      const std::function<Complex(double)>& scalar_fn);
LocalOperator herm_fn(const LocalOperator& op, const HermitianEigen& eig,
                      const std::function<Complex(double)>& scalar_fn);

/// e^{s H} for Hermitian H and any complex s.
LocalOperator exp_hermitian(const LocalOperator& op, Complex s);

/// Matrix logarithm; throws DomainError unless the spectrum is strictly positive.
LocalOperator log_positive(const LocalOperator& op);

struct Norms {
  double operator_norm = 0.0;
  double trace_norm = 0.0;
  double frobenius = 0.0;
  std::optional<double> min_eig;  // only for Hermitian input
  std::optional<double> max_eig;
};

Norms norms(const LocalOperator& op);
double operator_norm(const LocalOperator& op);
double trace_norm(const LocalOperator& op);
double min_eigenvalue(const LocalOperator& op);

/// min_eig >= -rel_tol * max(1, ||M||).
bool is_psd(const LocalOperator& op, double rel_tol = kPsdTol);

/// ||a - b||_F / ||b||_F (absolute when b = 0). Supports are unified first.
double relative_frobenius_error(const LocalOperator& a, const LocalOperator& b);

/// Standard spin-1/2 Pauli matrices.
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

}  // namespace entlen
