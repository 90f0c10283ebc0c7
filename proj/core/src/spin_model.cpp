#include "entlen/spin_model.hpp"

#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace entlen {

Sites Interval::sites() const {
  Sites out;
  for (int i = begin; i < end; ++i) out.push_back(i);
  return out;
}

Interval intersect(const Interval& a, const Interval& b) {
  Interval out{std::max(a.begin, b.begin), std::min(a.end, b.end)};
  if (out.end < out.begin) out.end = out.begin;
  return out;
}

Interaction::Interaction(int local_dim, int range, int num_sites,
                         std::vector<LocalOperator> terms)
    : local_dim_(local_dim), range_(range), num_sites_(num_sites) {
  if (local_dim_ < 2) throw DomainError("local dimension must be at least 2");
  if (range_ < 0) throw DomainError("interaction range must be nonnegative");
  if (num_sites_ < 1) throw DomainError("chain must have at least one site");

  for (auto& term : terms) {
    if (term.local_dim() != local_dim_) throw DomainError("term has wrong local dimension");
    const Sites& s = term.support();
    if (s.empty()) throw DomainError("interaction term with empty support");
    if (s.front() < 0 || s.back() >= num_sites_) {
      throw DomainError("interaction term lies outside the chain");
    }
    if (s.back() - s.front() > range_) {
      std::ostringstream os;
      os << "term of diameter " << s.back() - s.front() << " exceeds range " << range_;
      throw DomainError(os.str());
    }
    if (!term.is_hermitian()) throw DomainError("interaction terms must be Hermitian");
    auto it = terms_.find(s);
    if (it == terms_.end()) {
      terms_.emplace(s, std::move(term));
    } else {
      it->second += term;
    }
  }

  std::vector<double> per_site(static_cast<std::size_t>(num_sites_), 0.0);
  for (const auto& [support, op] : terms_) {
    const double nrm = operator_norm(op);
    for (int i : support) per_site[static_cast<std::size_t>(i)] += nrm;
  }
  for (double v : per_site) strength_ = std::max(strength_, v);
}

std::vector<Interaction::TermNorm> Interaction::term_norms() const {
  std::vector<TermNorm> out;
  out.reserve(terms_.size());
  for (const auto& [support, op] : terms_) out.push_back({support, operator_norm(op)});
  return out;
}

Interaction operator+(const Interaction& a, const Interaction& b) {
  if (a.local_dim() != b.local_dim() || a.num_sites() != b.num_sites()) {
    throw DomainError("interactions live on different chains");
  }
  std::vector<LocalOperator> terms;
  for (const auto& [s, op] : a.terms()) terms.push_back(op);
  for (const auto& [s, op] : b.terms()) terms.push_back(op);
  return {a.local_dim(), std::max(a.range(), b.range()), a.num_sites(), std::move(terms)};
}

RegionsABC::RegionsABC(Interval a, Interval b, Interval c) : a_(a), b_(b), c_(c) {
  if (a_.empty() || b_.empty() || c_.empty()) {
    throw DomainError("regions A, B, C must all be nonempty");
  }
  if (a_.end != b_.begin || b_.end != c_.begin) {
    throw DomainError("regions A, B, C must be adjacent and in order");
  }
}

RegionsABC RegionsABC::from_sizes(int size_a, int size_b, int size_c, int offset) {
  return {{offset, offset + size_a},
          {offset + size_a, offset + size_a + size_b},
          {offset + size_a + size_b, offset + size_a + size_b + size_c}};
}

Sites part_sites(const RegionsABC& regions, Part part) {
  switch (part) {
    case Part::A:
      return regions.A().sites();
    case Part::C:
      return regions.C().sites();
    case Part::AC:
      return site_union(regions.A().sites(), regions.C().sites());
    case Part::AB:
      return Interval{regions.A().begin, regions.B().end}.sites();
    case Part::B:
      return regions.B().sites();
    case Part::ABC:
      return regions.all().sites();
  }
  throw DomainError("unknown region part");
}

LocalOperator hamiltonian(const Interaction& ia, const Sites& region) {
  if (region.empty()) throw DomainError("Hamiltonian of an empty region is not defined");
  if (!is_strictly_increasing(region)) throw DomainError("region must be strictly increasing");
  LocalOperator h = LocalOperator::zero(ia.local_dim(), region);
  Matrix acc = Matrix::Zero(h.dim(), h.dim());
  for (const auto& [support, op] : ia.terms()) {
    if (is_subset(support, region)) acc += embed(op, region).matrix();
  }
  return {ia.local_dim(), region, std::move(acc)};
}

LocalOperator hamiltonian(const Interaction& ia, const Interval& region) {
  return hamiltonian(ia, region.sites());
}

Interval k_neighborhood(const RegionsABC& regions, int k) {
  if (k < 0) throw DomainError("neighbourhood radius must be nonnegative");
  const Interval& b = regions.B();
  return {b.begin - std::min(k, regions.A().size()), b.end + std::min(k, regions.C().size())};
}

std::optional<LocalOperator> truncated_hamiltonian(const Interaction& ia,
                                                   const RegionsABC& regions, Part part,
                                                   int k) {
  const Sites sites =
      site_intersection(part_sites(regions, part), k_neighborhood(regions, k).sites());
  if (sites.empty()) return std::nullopt;
  return hamiltonian(ia, sites);
}

namespace {

using Params = std::map<std::string, double>;

double param(const Params& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void require_keys(const ModelSpec& spec, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : spec.params) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown parameter '" + key + "' for family " + spec.family);
    if (!std::isfinite(value)) throw ConfigError("parameter '" + key + "' is not finite");
  }
}

void require_qubits(const ModelSpec& spec) {
  if (spec.local_dim != 2) throw ConfigError("family " + spec.family + " requires local_dim 2");
}

LocalOperator site_op(int site, const Matrix& m) { return {2, {site}, m}; }

LocalOperator bond_op(int site, const Matrix& a, const Matrix& b) {
  return kron(site_op(site, a), site_op(site + 1, b));
}

int integer_param(const ModelSpec& spec, const std::string& key, int fallback) {
  const double v = param(spec.params, key, fallback);
  if (v != std::floor(v) || v < 0 || v > 64) {
    throw ConfigError("parameter '" + key + "' must be a small nonnegative integer");
  }
  return static_cast<int>(v);
}

Matrix random_hermitian(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) g(i, j) = Complex{normal(rng), normal(rng)};
  }
  return 0.5 * (g + g.adjoint());
}

Interaction random_model(const ModelSpec& spec) {
  require_keys(spec, {"range", "strength"});
  const int r = integer_param(spec, "range", 1);
  const double target = param(spec.params, "strength", 1.0);
  if (target < 0.0) throw ConfigError("random model strength must be nonnegative");
  const int d = spec.local_dim;
  const int n = spec.sites;

  std::mt19937_64 rng(spec.seed);
  std::vector<LocalOperator> terms;
  // Every support X with min(X) = i and diam(X) <= r: i plus any subset of the
  // next r sites inside the chain.
  for (int i = 0; i < n; ++i) {
    const int span = std::min(r, n - 1 - i);
    for (unsigned mask = 0; mask < (1u << span); ++mask) {
      Sites support{i};
      for (int j = 0; j < span; ++j) {
        if (mask & (1u << j)) support.push_back(i + 1 + j);
      }
      const auto dim = static_cast<Eigen::Index>(hilbert_dim(d, support.size()));
      terms.emplace_back(d, support, random_hermitian(rng, dim));
    }
  }
  Interaction raw(d, r, n, terms);
  if (raw.strength() == 0.0 || target == 0.0) {
    return {d, r, n, {}};
  }
  const double scale = target / raw.strength();
  for (auto& t : terms) t *= scale;
  return {d, r, n, std::move(terms)};
}

}  // namespace

Interaction build_model(const ModelSpec& spec) {
  if (spec.sites < 1) throw ConfigError("model needs at least one site");
  if (spec.local_dim < 2) throw ConfigError("local_dim must be at least 2");
  const int n = spec.sites;
  const Params& p = spec.params;
  std::vector<LocalOperator> terms;

  if (spec.family == "zero") {
    require_keys(spec, {"range"});
    return {spec.local_dim, integer_param(spec, "range", 1), n, {}};
  }
  if (spec.family == "field") {
    require_qubits(spec);
    require_keys(spec, {"h"});
    const double h = param(p, "h", 1.0);
    for (int i = 0; i < n; ++i) terms.push_back(site_op(i, h * pauli_z()));
    return {2, 1, n, std::move(terms)};
  }
  if (spec.family == "tfi" || spec.family == "classical_ising") {
    require_qubits(spec);
    require_keys(spec, {"coupling", "field"});
    const bool transverse = spec.family == "tfi";
    const double coupling = param(p, "coupling", 1.0);
    const double field = param(p, "field", transverse ? 1.0 : 0.0);
    const Matrix field_op = transverse ? pauli_x() : pauli_z();
    for (int i = 0; i + 1 < n; ++i) {
      terms.push_back(Complex{-coupling, 0.0} * bond_op(i, pauli_z(), pauli_z()));
    }
    if (field != 0.0) {
      for (int i = 0; i < n; ++i) terms.push_back(site_op(i, -field * field_op));
    }
    return {2, 1, n, std::move(terms)};
  }
  if (spec.family == "heisenberg_xxz") {
    require_qubits(spec);
    require_keys(spec, {"jxy", "jz", "field"});
    const double jxy = param(p, "jxy", 1.0);
    const double jz = param(p, "jz", 1.0);
    const double field = param(p, "field", 0.0);
    for (int i = 0; i + 1 < n; ++i) {
      terms.push_back(Complex{jxy, 0.0} * (bond_op(i, pauli_x(), pauli_x()) +
                                           bond_op(i, pauli_y(), pauli_y())) +
                      Complex{jz, 0.0} * bond_op(i, pauli_z(), pauli_z()));
    }
    if (field != 0.0) {
      for (int i = 0; i < n; ++i) terms.push_back(site_op(i, field * pauli_z()));
    }
    return {2, 1, n, std::move(terms)};
  }
  if (spec.family == "random") return random_model(spec);
  if (spec.family == "explicit") {
    if (!spec.params.empty()) throw ConfigError("explicit models take no params");
    try {
      return {spec.local_dim, spec.explicit_range, n, spec.explicit_terms};
    } catch (const DomainError& e) {
      throw ConfigError(std::string("invalid explicit model: ") + e.what());
    }
  }
  throw ConfigError("unknown model family '" + spec.family + "'");
}

Interaction builtin_model(const std::string& name, const std::map<std::string, double>& params,
                          int sites, std::uint64_t seed, int local_dim) {
  ModelSpec spec;
  spec.family = name;
  spec.params = params;
  spec.sites = sites;
  spec.seed = seed;
  spec.local_dim = local_dim;
  return build_model(spec);
}

}  // namespace entlen
