#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

std::vector<int> digits(std::size_t index, int d, std::size_t n) {
  std::vector<int> out(n);
  for (std::size_t j = n; j-- > 0;) {
    out[j] = static_cast<int>(index % static_cast<std::size_t>(d));
    index /= static_cast<std::size_t>(d);
  }
  return out;
}

std::size_t from_digits(const std::vector<int>& dig, int d) {
  std::size_t idx = 0;
  for (int x : dig) idx = idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(x);
  return idx;
}

namespace {

std::size_t pow_int(int d, std::size_t n) {
  std::size_t p = 1;
  for (std::size_t i = 0; i < n; ++i) p *= static_cast<std::size_t>(d);
  return p;
}

std::vector<int> positions(const Sites& sub, const Sites& super) {
  std::vector<int> pos;
  for (int s : sub) {
    pos.push_back(static_cast<int>(std::find(super.begin(), super.end(), s) - super.begin()));
  }
  return pos;
}

bool contains(const Sites& s, int x) { return std::find(s.begin(), s.end(), x) != s.end(); }

}  // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

Matrix embed(const Matrix& m, int d, const Sites& support, const Sites& target) {
  const std::size_t dim = pow_int(d, target.size());
  const std::vector<int> pos = positions(support, target);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    const auto ri = digits(i, d, target.size());
    for (std::size_t j = 0; j < dim; ++j) {
      const auto cj = digits(j, d, target.size());
      bool same_outside = true;
      for (std::size_t t = 0; t < target.size(); ++t) {
        if (!contains(support, target[t]) && ri[t] != cj[t]) same_outside = false;
      }
      if (!same_outside) continue;
      std::vector<int> rs, cs;
      for (int p : pos) {
        rs.push_back(ri[static_cast<std::size_t>(p)]);
        cs.push_back(cj[static_cast<std::size_t>(p)]);
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          m(static_cast<Eigen::Index>(from_digits(rs, d)),
            static_cast<Eigen::Index>(from_digits(cs, d)));
    }
  }
  return out;
}

Matrix partial_trace(const Matrix& m, int d, const Sites& support, const Sites& drop) {
  Sites keep;
  for (int s : support) {
    if (!contains(drop, s)) keep.push_back(s);
  }
  const std::size_t kd = pow_int(d, keep.size());
  const std::size_t dd = pow_int(d, drop.size());
  const auto kpos = positions(keep, support);
  const auto dpos = positions(drop, support);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(kd), static_cast<Eigen::Index>(kd));
  for (std::size_t i = 0; i < kd; ++i) {
    for (std::size_t j = 0; j < kd; ++j) {
      Complex acc = 0.0;
      for (std::size_t t = 0; t < dd; ++t) {
        std::vector<int> row(support.size()), col(support.size());
        const auto ki = digits(i, d, keep.size());
        const auto kj = digits(j, d, keep.size());
        const auto tt = digits(t, d, drop.size());
        for (std::size_t q = 0; q < keep.size(); ++q) {
          row[static_cast<std::size_t>(kpos[q])] = ki[q];
          col[static_cast<std::size_t>(kpos[q])] = kj[q];
        }
        for (std::size_t q = 0; q < drop.size(); ++q) {
          row[static_cast<std::size_t>(dpos[q])] = tt[q];
          col[static_cast<std::size_t>(dpos[q])] = tt[q];
        }
        acc += m(static_cast<Eigen::Index>(from_digits(row, d)),
                 static_cast<Eigen::Index>(from_digits(col, d)));
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
    }
  }
  return out;
}

Matrix partial_transpose(const Matrix& m, int d, const Sites& support, const Sites& subset) {
  const std::size_t dim = pow_int(d, support.size());
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      auto ri = digits(i, d, support.size());
      auto cj = digits(j, d, support.size());
      for (std::size_t t = 0; t < support.size(); ++t) {
        if (contains(subset, support[t])) std::swap(ri[t], cj[t]);
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          m(static_cast<Eigen::Index>(from_digits(ri, d)),
            static_cast<Eigen::Index>(from_digits(cj, d)));
    }
  }
  return out;
}

Matrix expm(const Matrix& a, int terms) {
  // Scale so the series argument has norm below 1/2.
  double norm = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) norm = std::max(norm, a.col(j).cwiseAbs().sum());
  int squarings = 0;
  while (norm > 0.5) {
    norm /= 2.0;
    ++squarings;
  }
  const Matrix x = a / std::pow(2.0, squarings);
  Matrix result = Matrix::Identity(a.rows(), a.cols());
  Matrix term = result;
  for (int n = 1; n <= terms; ++n) {
    term = term * x / static_cast<double>(n);
    result += term;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  }
  return m;
}

Matrix random_hermitian(std::mt19937_64& rng, Eigen::Index n) {
  const Matrix m = random_matrix(rng, n);
  return (m + m.adjoint()) / 2.0;
}

Matrix random_state(std::mt19937_64& rng, Eigen::Index n) {
  const Matrix m = random_matrix(rng, n);
  Matrix rho = m * m.adjoint() + 0.1 * Matrix::Identity(n, n);
  return rho / rho.trace();
}

double rel_frobenius(const Matrix& a, const Matrix& b) {
  const double nb = b.norm();
  return nb == 0.0 ? (a - b).norm() : (a - b).norm() / nb;
}

double spectral_norm(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

}  // namespace oracle
