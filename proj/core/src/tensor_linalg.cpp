#include "entlen/tensor_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace entlen {
namespace {

std::string sites_str(const Sites& s) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << '}';
  return os.str();
}

// Positions of `sub` inside the sorted list `super`.
std::vector<std::size_t> positions_in(const Sites& sub, const Sites& super) {
  std::vector<std::size_t> pos;
  pos.reserve(sub.size());
  for (int s : sub) {
    auto it = std::lower_bound(super.begin(), super.end(), s);
    pos.push_back(static_cast<std::size_t>(it - super.begin()));
  }
  return pos;
}

// For every configuration of the legs at `positions` (first = most significant)
// the offset it contributes to a basis index over `n` legs.
std::vector<Eigen::Index> leg_offsets(int d, std::size_t n,
                                      const std::vector<std::size_t>& positions) {
  const std::size_t m = positions.size();
  std::vector<Eigen::Index> stride(m);
  for (std::size_t j = 0; j < m; ++j) {
    Eigen::Index st = 1;
    for (std::size_t p = positions[j] + 1; p < n; ++p) st *= d;
    stride[j] = st;
  }
  const std::size_t count = hilbert_dim(d, m);
  std::vector<Eigen::Index> out(count, 0);
  for (std::size_t a = 0; a < count; ++a) {
    std::size_t rem = a;
    Eigen::Index off = 0;
    for (std::size_t j = m; j-- > 0;) {
      off += static_cast<Eigen::Index>(rem % d) * stride[j];
      rem /= d;
    }
    out[a] = off;
  }
  return out;
}

void require_same_dim(const LocalOperator& a, const LocalOperator& b) {
  if (a.local_dim() != b.local_dim()) {
    throw DomainError("operators have different local dimensions");
  }
}

std::vector<std::size_t> complement_positions(std::size_t n,
                                              const std::vector<std::size_t>& pos) {
  std::vector<std::size_t> rest;
  for (std::size_t p = 0; p < n; ++p) {
    if (std::find(pos.begin(), pos.end(), p) == pos.end()) rest.push_back(p);
  }
  return rest;
}

}  // namespace

std::size_t hilbert_dim(int local_dim, std::size_t num_sites) {
  if (local_dim < 1) throw DomainError("local dimension must be positive");
  std::size_t dim = 1;
  for (std::size_t i = 0; i < num_sites; ++i) {
    if (dim > (std::size_t{1} << 62) / static_cast<std::size_t>(local_dim)) {
      throw DomainError("Hilbert space dimension overflows");
    }
    dim *= static_cast<std::size_t>(local_dim);
  }
  return dim;
}

bool is_strictly_increasing(const Sites& sites) {
  return std::adjacent_find(sites.begin(), sites.end(),
                            [](int a, int b) { return a >= b; }) == sites.end();
}

bool is_subset(const Sites& sub, const Sites& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

Sites site_union(const Sites& a, const Sites& b) {
  Sites out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Sites site_difference(const Sites& a, const Sites& b) {
  Sites out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Sites site_intersection(const Sites& a, const Sites& b) {
  Sites out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

LocalOperator::LocalOperator(int local_dim, Sites support, Matrix matrix)
    : local_dim_(local_dim), support_(std::move(support)), matrix_(std::move(matrix)) {
  if (local_dim_ < 2) throw DomainError("local dimension must be at least 2");
  if (!is_strictly_increasing(support_)) {
    throw DomainError("support must be strictly increasing: " + sites_str(support_));
  }
  const auto side = static_cast<Eigen::Index>(hilbert_dim(local_dim_, support_.size()));
  if (matrix_.rows() != side || matrix_.cols() != side) {
    std::ostringstream os;
    os << "matrix is " << matrix_.rows() << "x" << matrix_.cols() << " but support "
       << sites_str(support_) << " requires side " << side;
    throw DomainError(os.str());
  }
}

LocalOperator LocalOperator::identity(int local_dim, Sites support) {
  const auto side = static_cast<Eigen::Index>(hilbert_dim(local_dim, support.size()));
  return {local_dim, std::move(support), Matrix::Identity(side, side)};
}

LocalOperator LocalOperator::zero(int local_dim, Sites support) {
  const auto side = static_cast<Eigen::Index>(hilbert_dim(local_dim, support.size()));
  return {local_dim, std::move(support), Matrix::Zero(side, side)};
}

LocalOperator LocalOperator::scalar(int local_dim, Complex value) {
  Matrix m(1, 1);
  m(0, 0) = value;
  return {local_dim, {}, std::move(m)};
}

bool LocalOperator::is_hermitian(double rel_tol) const {
  const double scale = matrix_.norm();
  if (scale == 0.0) return true;
  const double defect = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  return defect <= rel_tol * scale;
}

LocalOperator LocalOperator::adjoint() const {
  return {local_dim_, support_, matrix_.adjoint()};
}

LocalOperator LocalOperator::hermitian_part() const {
  return {local_dim_, support_, 0.5 * (matrix_ + matrix_.adjoint())};
}

LocalOperator& LocalOperator::operator*=(Complex factor) {
  matrix_ *= factor;
  return *this;
}

LocalOperator& LocalOperator::operator+=(const LocalOperator& other) {
  *this = *this + other;
  return *this;
}

LocalOperator& LocalOperator::operator-=(const LocalOperator& other) {
  *this = *this - other;
  return *this;
}

LocalOperator operator+(const LocalOperator& a, const LocalOperator& b) {
  require_same_dim(a, b);
  if (a.support() == b.support()) {
    return {a.local_dim(), a.support(), a.matrix() + b.matrix()};
  }
  const Sites u = site_union(a.support(), b.support());
  return {a.local_dim(), u, embed(a, u).matrix() + embed(b, u).matrix()};
}

LocalOperator operator-(const LocalOperator& a, const LocalOperator& b) {
  require_same_dim(a, b);
  if (a.support() == b.support()) {
    return {a.local_dim(), a.support(), a.matrix() - b.matrix()};
  }
  const Sites u = site_union(a.support(), b.support());
  return {a.local_dim(), u, embed(a, u).matrix() - embed(b, u).matrix()};
}

LocalOperator operator*(const LocalOperator& a, const LocalOperator& b) {
  require_same_dim(a, b);
  if (a.support() == b.support()) {
    return {a.local_dim(), a.support(), a.matrix() * b.matrix()};
  }
  const Sites u = site_union(a.support(), b.support());
  return {a.local_dim(), u, embed(a, u).matrix() * embed(b, u).matrix()};
}

LocalOperator operator*(Complex factor, const LocalOperator& op) {
  return {op.local_dim(), op.support(), factor * op.matrix()};
}

LocalOperator operator*(const LocalOperator& op, Complex factor) { return factor * op; }

LocalOperator embed(const LocalOperator& op, const Sites& target) {
  if (!is_strictly_increasing(target)) {
    throw DomainError("embedding target must be strictly increasing");
  }
  if (!is_subset(op.support(), target)) {
    throw DomainError("support " + sites_str(op.support()) +
                      " is not a subset of target " + sites_str(target));
  }
  if (op.support() == target) return op;

  const int d = op.local_dim();
  const std::size_t n = target.size();
  const auto pos = positions_in(op.support(), target);
  const auto sub_off = leg_offsets(d, n, pos);
  const auto rest_off = leg_offsets(d, n, complement_positions(n, pos));
  const auto side = static_cast<Eigen::Index>(hilbert_dim(d, n));

  Matrix out = Matrix::Zero(side, side);
  const Matrix& m = op.matrix();
  const auto sub = static_cast<Eigen::Index>(sub_off.size());
  for (Eigen::Index e : rest_off) {
    for (Eigen::Index b = 0; b < sub; ++b) {
      const Eigen::Index col = sub_off[b] + e;
      for (Eigen::Index a = 0; a < sub; ++a) out(sub_off[a] + e, col) = m(a, b);
    }
  }
  return {d, target, std::move(out)};
}

LocalOperator kron(const LocalOperator& a, const LocalOperator& b) {
  require_same_dim(a, b);
  if (!site_intersection(a.support(), b.support()).empty()) {
    throw DomainError("kron requires disjoint supports");
  }
  const int d = a.local_dim();
  const Sites u = site_union(a.support(), b.support());
  const std::size_t n = u.size();
  const auto a_off = leg_offsets(d, n, positions_in(a.support(), u));
  const auto b_off = leg_offsets(d, n, positions_in(b.support(), u));
  const auto side = static_cast<Eigen::Index>(hilbert_dim(d, n));

  Matrix out(side, side);
  const Matrix& am = a.matrix();
  const Matrix& bm = b.matrix();
  for (Eigen::Index a2 = 0; a2 < am.cols(); ++a2) {
    for (Eigen::Index b2 = 0; b2 < bm.cols(); ++b2) {
      const Eigen::Index col = a_off[a2] + b_off[b2];
      for (Eigen::Index a1 = 0; a1 < am.rows(); ++a1) {
        const Complex av = am(a1, a2);
        for (Eigen::Index b1 = 0; b1 < bm.rows(); ++b1) {
          out(a_off[a1] + b_off[b1], col) = av * bm(b1, b2);
        }
      }
    }
  }
  return {d, u, std::move(out)};
}

LocalOperator partial_trace(const LocalOperator& op, const Sites& drop) {
  if (!is_strictly_increasing(drop) || !is_subset(drop, op.support())) {
    throw DomainError("traced sites " + sites_str(drop) + " are not a subset of " +
                      sites_str(op.support()));
  }
  if (drop.empty()) return op;

  const int d = op.local_dim();
  const std::size_t n = op.support().size();
  const Sites keep = site_difference(op.support(), drop);
  const auto drop_off = leg_offsets(d, n, positions_in(drop, op.support()));
  const auto keep_off = leg_offsets(d, n, positions_in(keep, op.support()));

  const auto side = static_cast<Eigen::Index>(keep_off.size());
  Matrix out = Matrix::Zero(side, side);
  const Matrix& m = op.matrix();
  for (Eigen::Index b = 0; b < side; ++b) {
    for (Eigen::Index a = 0; a < side; ++a) {
      Complex acc{0.0, 0.0};
      for (Eigen::Index t : drop_off) acc += m(keep_off[a] + t, keep_off[b] + t);
      out(a, b) = acc;
    }
  }
  return {d, keep, std::move(out)};
}

LocalOperator reduce_to(const LocalOperator& op, const Sites& keep) {
  if (!is_subset(keep, op.support())) {
    throw DomainError("kept sites " + sites_str(keep) + " are not a subset of " +
                      sites_str(op.support()));
  }
  return partial_trace(op, site_difference(op.support(), keep));
}

LocalOperator partial_transpose(const LocalOperator& op, const Sites& subset) {
  if (!is_strictly_increasing(subset) || !is_subset(subset, op.support())) {
    throw DomainError("transposed sites " + sites_str(subset) +
                      " are not a subset of " + sites_str(op.support()));
  }
  if (subset.empty()) return op;

  const int d = op.local_dim();
  const std::size_t n = op.support().size();
  const auto pos = positions_in(subset, op.support());
  const auto sub_off = leg_offsets(d, n, pos);
  const auto rest_off = leg_offsets(d, n, complement_positions(n, pos));

  const Matrix& m = op.matrix();
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index f : rest_off) {
    for (Eigen::Index e : rest_off) {
      for (Eigen::Index b : sub_off) {
        for (Eigen::Index a : sub_off) out(e + a, f + b) = m(e + b, f + a);
      }
    }
  }
  return {d, op.support(), std::move(out)};
}

HermitianEigen eigh(const LocalOperator& op) {
  if (!op.is_hermitian()) throw DomainError("eigendecomposition requires a Hermitian operator");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(op.matrix());
  if (solver.info() != Eigen::Success) {
    throw InternalConsistencyError("Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

RealVector eigenvalues(const LocalOperator& op) {
  if (!op.is_hermitian()) throw DomainError("eigenvalues requested for a non-Hermitian operator");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(op.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw InternalConsistencyError("Hermitian eigensolver did not converge");
  }
  return solver.eigenvalues();
}

LocalOperator herm_fn(const LocalOperator& op,
                      const std::function<Complex(double)>& scalar_fn) {
  return herm_fn(op, eigh(op), scalar_fn);
}

LocalOperator herm_fn(const LocalOperator& op, const HermitianEigen& eig,
                      const std::function<Complex(double)>& scalar_fn) {
  Eigen::VectorXcd f(eig.values.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = scalar_fn(eig.values(i));
  Matrix scaled = eig.vectors * f.asDiagonal();
  return {op.local_dim(), op.support(), scaled * eig.vectors.adjoint()};
}

LocalOperator exp_hermitian(const LocalOperator& op, Complex s) {
  return herm_fn(op, [s](double x) { return std::exp(s * x); });
}

LocalOperator log_positive(const LocalOperator& op) {
  const HermitianEigen eig = eigh(op);
  if (eig.values.size() > 0 && !(eig.values(0) > 0.0)) {
    throw DomainError("logarithm requires a strictly positive spectrum");
  }
  return herm_fn(op, eig, [](double x) { return Complex{std::log(x), 0.0}; });
}

Norms norms(const LocalOperator& op) {
  Norms out;
  out.frobenius = op.frobenius();
  if (op.is_hermitian()) {
    const RealVector ev = eigenvalues(op);
    out.operator_norm = ev.cwiseAbs().maxCoeff();
    out.trace_norm = ev.cwiseAbs().sum();
    out.min_eig = ev.minCoeff();
    out.max_eig = ev.maxCoeff();
  } else {
    Eigen::BDCSVD<Matrix> svd(op.matrix());
    const RealVector sv = svd.singularValues();
    out.operator_norm = sv.maxCoeff();
    out.trace_norm = sv.sum();
  }
  return out;
}

double operator_norm(const LocalOperator& op) {
  if (op.is_hermitian()) return eigenvalues(op).cwiseAbs().maxCoeff();
  // Largest eigenvalue of the Gram matrix; its square root is sigma_max.
  Matrix gram = op.matrix().adjoint() * op.matrix();
  gram = 0.5 * (gram + gram.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

double trace_norm(const LocalOperator& op) { return norms(op).trace_norm; }

double min_eigenvalue(const LocalOperator& op) { return eigenvalues(op).minCoeff(); }

bool is_psd(const LocalOperator& op, double rel_tol) {
  const RealVector ev = eigenvalues(op);
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  return ev.minCoeff() >= -rel_tol * scale;
}

double relative_frobenius_error(const LocalOperator& a, const LocalOperator& b) {
  const LocalOperator diff = a - b;
  const double ref = b.frobenius();
  return ref > 0.0 ? diff.frobenius() / ref : diff.frobenius();
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << Complex{0, 0}, Complex{0, -1}, Complex{0, 1}, Complex{0, 0};
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace entlen
