#include "entlen/gibbs_state.hpp"

#include <cmath>
#include <sstream>

namespace entlen {
namespace {

constexpr double kEigFloor = 1e-300;

// a <= b up to a relative slack that absorbs rounding in the log domain.
bool leq(double a, double b) { return a <= b + 1e-12 * (1.0 + std::abs(b)); }

double log_sum_exp_neg(const RealVector& ev) {
  const double lo = ev.minCoeff();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) acc += std::exp(-(ev(i) - lo));
  return -lo + std::log(acc);
}

// Tr[A B] without forming the product.
Complex trace_of_product(const Matrix& a, const Matrix& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

}  // namespace

void check_budget(int local_dim, std::size_t num_sites, std::size_t budget) {
  const std::size_t dim = hilbert_dim(local_dim, num_sites);
  if (dim > budget) {
    std::ostringstream os;
    os << "dense dimension " << dim << " (" << num_sites << " sites of dimension "
       << local_dim << ") exceeds budget " << budget;
    throw ResourceError(os.str());
  }
}

GibbsEnsemble::GibbsEnsemble(const Interaction& ia, const Sites& region, std::size_t budget)
    : region_(region),
      hamiltonian_((check_budget(ia.local_dim(), region.size(), budget),
                    entlen::hamiltonian(ia, region))),
      spectrum_(eigh(hamiltonian_)),
      rho_(LocalOperator::zero(ia.local_dim(), region)) {
  const RealVector& ev = spectrum_.values;
  const double lo = ev.minCoeff();
  RealVector w(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) w(i) = std::exp(-(ev(i) - lo));
  const double sum = w.sum();
  log_z_ = -lo + std::log(sum);
  w /= sum;
  if (!(w.minCoeff() > 0.0)) {
    throw InternalConsistencyError("Gibbs state lost full rank (spectral width too large)");
  }
  Matrix scaled = spectrum_.vectors * w.cast<Complex>().asDiagonal();
  rho_ = LocalOperator(ia.local_dim(), region_, scaled * spectrum_.vectors.adjoint());
  if (std::abs(rho_.trace() - Complex{1.0, 0.0}) > 1e-12) {
    throw InternalConsistencyError("Gibbs state is not normalized");
  }
}

double GibbsEnsemble::Z() const { return std::exp(log_z_); }

GibbsEnsemble gibbs(const Interaction& ia, const Interval& region, std::size_t budget) {
  return {ia, region.sites(), budget};
}

LocalOperator marginal(const GibbsEnsemble& g, const Sites& x) {
  if (!is_strictly_increasing(x) || !is_subset(x, g.region())) {
    throw DomainError("marginal region is not contained in the Gibbs region");
  }
  return reduce_to(g.rho(), x);
}

double log_partition(const LocalOperator& h) { return log_sum_exp_neg(eigenvalues(h)); }

PartitionRatioReport check_partition_ratios(const Interaction& ia, const Interval& a,
                                            const Interval& b, std::size_t budget) {
  if (a.empty() || b.empty() || a.end != b.begin) {
    throw DomainError("partition ratio check needs nonempty adjacent intervals A, B");
  }
  const Interval ab{a.begin, b.end};
  check_budget(ia.local_dim(), static_cast<std::size_t>(ab.size()), budget);

  const LocalOperator h_a = hamiltonian(ia, a);
  const LocalOperator h_b = hamiltonian(ia, b);
  const LocalOperator h_ab = hamiltonian(ia, ab);

  PartitionRatioReport rep;
  rep.strength = ia.strength();
  rep.range = ia.range();
  rep.log_Z_A = log_partition(h_a);
  rep.log_Z_B = log_partition(h_b);
  rep.log_Z_AB = log_partition(h_ab);
  rep.boundary_norm = operator_norm((h_a + h_b) - h_ab);

  const double log_sum = rep.log_Z_A + rep.log_Z_B;  // log Tr e^{-(H_A+H_B)}
  rep.z1_forward = leq(rep.log_Z_AB - log_sum, rep.boundary_norm);
  rep.z1_backward = leq(log_sum - rep.log_Z_AB, rep.boundary_norm);

  const double log_d = std::log(static_cast<double>(ia.local_dim()));
  const double j = rep.strength;
  auto z2 = [&](double log_z, int size) {
    return leq((log_d - j) * size, log_z) && leq(log_z, (log_d + j) * size);
  };
  rep.z2_A = z2(rep.log_Z_A, a.size());
  rep.z2_B = z2(rep.log_Z_B, b.size());
  rep.z2_AB = z2(rep.log_Z_AB, ab.size());

  const double log_ratio = log_sum - rep.log_Z_AB;
  rep.z3 = leq(-rep.range * j, log_ratio) && leq(log_ratio, rep.range * j);
  return rep;
}

AcMarginals ac_marginals(const Interaction& ia, const RegionsABC& regions, std::size_t budget) {
  const GibbsEnsemble g = gibbs(ia, regions.all(), budget);
  LocalOperator rho_ac = marginal(g, part_sites(regions, Part::AC));
  LocalOperator rho_a = reduce_to(rho_ac, regions.A().sites());
  LocalOperator rho_c = reduce_to(rho_ac, regions.C().sites());
  return {std::move(rho_ac), std::move(rho_a), std::move(rho_c)};
}

FactorizationError factorization_error(const AcMarginals& m) {
  const LocalOperator diff = (m.rho_AC - kron(m.rho_A, m.rho_C)).hermitian_part();
  const RealVector ev = eigenvalues(diff);
  return {ev.cwiseAbs().maxCoeff(), ev.cwiseAbs().sum()};
}

FactorizationError factorization_error(const Interaction& ia, const RegionsABC& regions,
                                       std::size_t budget) {
  return factorization_error(ac_marginals(ia, regions, budget));
}

double von_neumann_entropy(const LocalOperator& rho) {
  const RealVector ev = eigenvalues(rho);
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double p = std::max(ev(i), 0.0);
    s -= p * std::log(std::max(p, kEigFloor));
  }
  return s;
}

double relative_entropy(const LocalOperator& rho, const LocalOperator& sigma) {
  if (rho.support() != sigma.support()) {
    throw DomainError("relative entropy needs operators on the same support");
  }
  const LocalOperator log_sigma = herm_fn(
      sigma, [](double x) { return Complex{std::log(std::max(x, kEigFloor)), 0.0}; });
  const double cross = trace_of_product(rho.matrix(), log_sigma.matrix()).real();
  return -von_neumann_entropy(rho) - cross;
}

double mutual_information(const LocalOperator& rho_ac, const Sites& a, const Sites& c) {
  if (site_union(a, c) != rho_ac.support() || !site_intersection(a, c).empty()) {
    throw DomainError("A and C must partition the support of the state");
  }
  const LocalOperator product = kron(reduce_to(rho_ac, a), reduce_to(rho_ac, c));
  return relative_entropy(rho_ac, product);
}

double mutual_information(const Interaction& ia, const RegionsABC& regions, std::size_t budget) {
  const AcMarginals m = ac_marginals(ia, regions, budget);
  return relative_entropy(m.rho_AC, kron(m.rho_A, m.rho_C));
}

MarginalInverseReport marginal_inverse_norm(const Interaction& ia, const RegionsABC& regions,
                                            double G_emp, std::size_t budget) {
  const GibbsEnsemble g = gibbs(ia, regions.all(), budget);
  const LocalOperator rho_b = marginal(g, regions.B().sites());
  MarginalInverseReport rep;
  rep.G_emp = G_emp;
  rep.inverse_norm = 1.0 / min_eigenvalue(rho_b);
  const double j = ia.strength();
  const double log_d = std::log(static_cast<double>(ia.local_dim()));
  rep.bound = std::pow(G_emp, 4) * std::exp(2.0 * ia.range() * j) *
              std::exp((2.0 * j + log_d) * regions.B().size());
  rep.holds = rep.inverse_norm > 0.0 && leq(rep.inverse_norm, rep.bound);
  return rep;
}

double correlation(const AcMarginals& m, const LocalOperator& obs_a, const LocalOperator& obs_c) {
  const Sites& a = m.rho_A.support();
  const Sites& c = m.rho_C.support();
  if (!is_subset(obs_a.support(), a)) throw DomainError("observable X^A is not supported in A");
  if (!is_subset(obs_c.support(), c)) throw DomainError("observable X^C is not supported in C");
  const LocalOperator xa = embed(obs_a, a);
  const LocalOperator xc = embed(obs_c, c);
  const Complex joint = trace_of_product(kron(xa, xc).matrix(), m.rho_AC.matrix());
  const Complex ea = trace_of_product(xa.matrix(), m.rho_A.matrix());
  const Complex ec = trace_of_product(xc.matrix(), m.rho_C.matrix());
  return (joint - ea * ec).real();
}

double correlation(const Interaction& ia, const RegionsABC& regions, const LocalOperator& obs_a,
                   const LocalOperator& obs_c, std::size_t budget) {
  return correlation(ac_marginals(ia, regions, budget), obs_a, obs_c);
}

DecayFit fit_exponential_decay(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("fit needs equally many x and y values");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0) || !std::isfinite(y[i])) continue;
    const double ly = std::log(y[i]);
    sx += x[i];
    sy += ly;
    sxx += x[i] * x[i];
    sxy += x[i] * ly;
    ++n;
  }
  DecayFit fit;
  fit.points = n;
  if (n < 2) return fit;
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return fit;
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  fit.alpha = -slope;
  fit.C = std::exp(intercept);
  return fit;
}

}  // namespace entlen
