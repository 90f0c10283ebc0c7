#pragma once

// Private helpers: LocalOperator <-> JSON. Not installed.

#include <json.hpp>

#include "entlen/errors.hpp"
#include "entlen/tensor_linalg.hpp"

namespace entlen::detail {

using nlohmann::json;

inline json matrix_to_json(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      data.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    }
  }
  return data;
}

inline json operator_to_json(const LocalOperator& op) {
  return json{{"support", op.support()}, {"dim", op.dim()}, {"data", matrix_to_json(op.matrix())}};
}

template <class Error = ConfigError>
LocalOperator operator_from_json(const json& j, int local_dim) {
  try {
    Sites support = j.at("support").get<Sites>();
    const auto side = static_cast<Eigen::Index>(hilbert_dim(local_dim, support.size()));
    const json& data = j.at("data");
    if (!data.is_array() || data.size() != static_cast<std::size_t>(side * side)) {
      throw Error("operator data has wrong length");
    }
    Matrix m(side, side);
    std::size_t idx = 0;
    for (Eigen::Index r = 0; r < side; ++r) {
      for (Eigen::Index c = 0; c < side; ++c, ++idx) {
        const json& e = data[idx];
        m(r, c) = Complex{e.at(0).get<double>(), e.at(1).get<double>()};
      }
    }
    return {local_dim, std::move(support), std::move(m)};
  } catch (const json::exception& e) {
    throw Error(std::string("malformed operator: ") + e.what());
  } catch (const DomainError& e) {
    throw Error(std::string("invalid operator: ") + e.what());
  }
}

}  // namespace entlen::detail
