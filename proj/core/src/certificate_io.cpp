#include "entlen/certificate_io.hpp"

#include <cmath>
#include <limits>

#include "json_matrix.hpp"

namespace entlen {
namespace {

using detail::json;

constexpr std::string_view kFormat = "entlen-certificate/1";

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json map_to_json(const std::map<std::string, double>& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[k] = number(v);
  return out;
}

std::map<std::string, double> map_from_json(const json& j) {
  std::map<std::string, double> out;
  for (const auto& [k, v] : j.items()) out[k] = number_from(v);
  return out;
}

Matrix square_from_json(const json& data, std::size_t side) {
  if (!data.is_array() || data.size() != side * side) {
    throw ConfigError("matrix data has wrong length");
  }
  const auto n = static_cast<Eigen::Index>(side);
  Matrix m(n, n);
  std::size_t idx = 0;
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c, ++idx)
      m(r, c) = Complex{data[idx].at(0).get<double>(), data[idx].at(1).get<double>()};
  return m;
}

double herm_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Matrix h = (m + m.adjoint()) * 0.5;
  return Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .cwiseAbs()
      .maxCoeff();
}

double herm_min_margin(const Matrix& m) {
  const Matrix h = (m + m.adjoint()) * 0.5;
  const RealVector ev =
      Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
  return ev.minCoeff() / std::max(1.0, ev.cwiseAbs().maxCoeff());
}

double tol(const Certificate& c, const std::string& key, double fallback) {
  const auto it = c.tolerances.find(key);
  return it == c.tolerances.end() ? fallback : it->second;
}

}  // namespace

std::string certificate_to_json(const Certificate& cert) {
  json j;
  j["format"] = kFormat;
  j["verdict"] = std::string(to_string(cert.verdict));
  j["cut"] = {{"A", cert.cut.A}, {"C", cert.cut.C}};
  j["local_dim"] = cert.local_dim;
  j["dim_A"] = cert.dim_A;
  j["dim_C"] = cert.dim_C;

  json products = json::array();
  double identity = 0.0;
  if (cert.decomposition) {
    for (const ProductTerm& t : cert.decomposition->terms()) {
      products.push_back({{"weight", t.weight},
                          {"factor_A", detail::operator_to_json(t.factor_A)},
                          {"factor_C", detail::operator_to_json(t.factor_C)}});
    }
    identity = cert.decomposition->residual_identity_coeff();
  }
  j["products"] = std::move(products);
  j["identity_coeff"] = identity;
  j["has_decomposition"] = cert.decomposition.has_value();

  json blocks = json::array();
  for (const BallBlock& b : cert.ball_blocks) {
    blocks.push_back({{"identity_coeff", b.identity_coeff},
                      {"support", b.support},
                      {"dim_A", b.dim_A},
                      {"dim_C", b.dim_C},
                      {"delta_norm", b.delta_norm},
                      {"data", detail::matrix_to_json(b.delta)}});
  }
  j["ball_blocks"] = std::move(blocks);

  if (cert.target) {
    j["target"] = {{"dim", cert.target->rows()}, {"data", detail::matrix_to_json(*cert.target)}};
  } else {
    j["target"] = nullptr;
  }
  j["negativity"] = number(cert.negativity);
  j["min_pt_eig"] = number(cert.min_pt_eig);
  j["ball_margin"] = cert.ball_margin ? number(*cert.ball_margin) : json(nullptr);
  j["tolerances"] = map_to_json(cert.tolerances);
  j["constants"] = map_to_json(cert.constants);
  return j.dump(2);
}

Certificate certificate_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("certificate is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormat) {
      throw ConfigError("unsupported certificate format");
    }
    Certificate c;
    c.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    c.cut = {j.at("cut").at("A").get<Sites>(), j.at("cut").at("C").get<Sites>()};
    c.local_dim = j.at("local_dim").get<int>();
    c.dim_A = j.at("dim_A").get<std::size_t>();
    c.dim_C = j.at("dim_C").get<std::size_t>();
    if (j.at("has_decomposition").get<bool>()) {
      SeparableDecomposition dec(c.cut, c.local_dim);
      for (const json& t : j.at("products")) {
        dec.add_term(t.at("weight").get<double>(),
                     detail::operator_from_json(t.at("factor_A"), c.local_dim),
                     detail::operator_from_json(t.at("factor_C"), c.local_dim));
      }
      dec.add_identity(j.at("identity_coeff").get<double>());
      c.decomposition = std::move(dec);
    }
    for (const json& b : j.at("ball_blocks")) {
      BallBlock block;
      block.identity_coeff = b.at("identity_coeff").get<double>();
      block.support = b.at("support").get<Sites>();
      block.dim_A = b.at("dim_A").get<std::size_t>();
      block.dim_C = b.at("dim_C").get<std::size_t>();
      block.delta_norm = b.at("delta_norm").get<double>();
      block.delta = square_from_json(b.at("data"), block.dim_A * block.dim_C);
      c.ball_blocks.push_back(std::move(block));
    }
    if (!j.at("target").is_null()) {
      c.target = square_from_json(j.at("target").at("data"),
                                  j.at("target").at("dim").get<std::size_t>());
    }
    c.negativity = number_from(j.at("negativity"));
    c.min_pt_eig = number_from(j.at("min_pt_eig"));
    if (!j.at("ball_margin").is_null()) c.ball_margin = j.at("ball_margin").get<double>();
    c.tolerances = map_from_json(j.at("tolerances"));
    c.constants = map_from_json(j.at("constants"));
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed certificate: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("inconsistent certificate: ") + e.what());
  }
}

std::string report_to_json(const DecompositionReport& rep) {
  json j;
  j["verdict"] = std::string(to_string(rep.verdict));
  j["k0"] = rep.k0;
  j["tried_k0"] = rep.tried_k0;
  j["gamma_k0"] = number(rep.gamma_k0);
  j["Z_ratio"] = number(rep.Z_ratio);
  j["identity_mass"] = number(rep.identity_mass);
  j["leftover_identity"] = number(rep.leftover_identity);
  j["reconstruction_rel_err"] = number(rep.reconstruction_rel_err);
  j["prop_ball_ratio"] = number(rep.prop_ball_ratio);
  j["prop_ball_threshold"] = number(rep.prop_ball_threshold);
  j["prop_ball_margin"] = number(rep.prop_ball_margin);
  j["factors_psd"] = rep.factors_psd;
  j["negativity"] = number(rep.negativity);
  json per_k = json::array();
  for (const PerKEntry& e : rep.per_k) {
    per_k.push_back({{"k", e.k},
                     {"delta_norm", number(e.delta_norm)},
                     {"identity_budget", number(e.identity_budget)},
                     {"ball_radius", number(e.ball_radius)},
                     {"ball_margin", number(e.ball_margin)},
                     {"factorial_bound", number(e.factorial_bound)},
                     {"support_size", e.support_size}});
  }
  j["per_k"] = std::move(per_k);
  const PipelineConstants& c = rep.constants_used;
  j["constants_used"] = {{"C", number(c.C)},
                         {"alpha", number(c.alpha)},
                         {"C_prime", number(c.C_prime)},
                         {"alpha_prime", number(c.alpha_prime)},
                         {"alpha0", number(c.alpha0)},
                         {"G_emp", number(c.G_emp)},
                         {"k0_closed_form", number(c.k0_closed_form)},
                         {"z_ratio_lower_bound", number(c.z_ratio_lower_bound)},
                         {"gamma_lower_bound", number(c.gamma_lower_bound)}};
  j["certificate"] = json::parse(certificate_to_json(rep.certificate));
  return j.dump(2);
}

RevalidationResult revalidate(const Certificate& cert) {
  RevalidationResult out;
  const double psd_tol = tol(cert, "factor_psd", kFactorPsdTol);
  const double rec_tol = tol(cert, "reconstruction", kReconstructionTol);
  const double neg_tol = tol(cert, "negativity_zero", kNegativityZeroTol);
  const bool raw = cert.cut.A.empty() && cert.cut.C.empty();
  const auto dim = static_cast<Eigen::Index>(cert.dim_A * cert.dim_C);
  auto fail = [&out](std::string msg) { out.failures.push_back(std::move(msg)); };

  if (!cert.target) {
    fail("certificate carries no target operator");
    return out;
  }
  if (cert.target->rows() != dim) fail("target dimension does not match d_A * d_C");

  Matrix assembled = Matrix::Zero(dim, dim);
  const Sites all = site_union(cert.cut.A, cert.cut.C);
  out.worst_factor_margin = std::numeric_limits<double>::infinity();
  if (cert.decomposition) {
    const SeparableDecomposition& dec = *cert.decomposition;
    if (dec.residual_identity_coeff() < 0.0) fail("negative identity coefficient");
    for (const ProductTerm& t : dec.terms()) {
      if (t.weight < 0.0) fail("negative product weight");
      out.worst_factor_margin = std::min({out.worst_factor_margin,
                                          herm_min_margin(t.factor_A.matrix()),
                                          herm_min_margin(t.factor_C.matrix())});
    }
    if (dec.terms().size() > dec.caratheodory_bound()) fail("too many product terms");
    if (!raw) assembled += dec.reconstruct().matrix();
  }
  if (!std::isfinite(out.worst_factor_margin)) out.worst_factor_margin = 0.0;
  if (out.worst_factor_margin < -psd_tol) fail("a product factor is not PSD");

  out.worst_ball_margin = std::numeric_limits<double>::infinity();
  for (const BallBlock& b : cert.ball_blocks) {
    const double norm = herm_norm(b.delta);
    const double margin =
        b.identity_coeff / std::sqrt(static_cast<double>(b.dim_A * b.dim_C)) - norm;
    out.worst_ball_margin = std::min(out.worst_ball_margin, margin);
    Matrix m = b.delta;
    m.diagonal().array() += Complex{b.identity_coeff, 0.0};
    if (raw) {
      if (m.rows() != dim) {
        fail("raw ball block dimension does not match the target");
        continue;
      }
      assembled += m;
    } else {
      assembled += embed(LocalOperator(cert.local_dim, b.support, m), all).matrix();
    }
  }
  if (cert.ball_blocks.empty()) out.worst_ball_margin = 0.0;

  const double ref = cert.target->norm();
  out.reconstruction_rel_err = (assembled - *cert.target).norm() / (ref > 0.0 ? ref : 1.0);

  Matrix state = *cert.target;
  if (raw) {
    const double tr = state.trace().real();
    if (tr > 0.0) state /= tr;
    out.negativity = negativity(state, cert.dim_A, cert.dim_C).negativity;
  } else {
    LocalOperator op(cert.local_dim, all, state);
    const double tr = op.trace().real();
    if (tr > 0.0) op *= 1.0 / tr;
    out.negativity = negativity(op.hermitian_part(), cert.cut).negativity;
  }

  switch (cert.verdict) {
    case Verdict::SeparableByConstruction:
      if (!cert.decomposition && cert.ball_blocks.empty()) fail("no separability evidence");
      if (out.worst_ball_margin < 0.0) fail("a ball block lies outside its separable ball");
      if (out.reconstruction_rel_err > rec_tol) fail("decomposition does not reproduce target");
      if (out.negativity > 100.0 * neg_tol) fail("certified state fails PPT");
      break;
    case Verdict::PPTConsistent:
      if (out.negativity > neg_tol) fail("PPTConsistent target has negative partial transpose");
      break;
    case Verdict::Entangled:
      if (out.negativity <= neg_tol) fail("Entangled target passes PPT");
      break;
    case Verdict::Withheld:
      break;
  }
  out.ok = out.failures.empty();
  return out;
}

}  // namespace entlen
