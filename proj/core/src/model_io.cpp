#include "entlen/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json_matrix.hpp"

namespace entlen {

using detail::json;

namespace {

json spec_to_json(const ModelSpec& spec) {
  json j;
  j["family"] = spec.family;
  j["params"] = json::object();
  for (const auto& [k, v] : spec.params) j["params"][k] = v;
  j["sites"] = spec.sites;
  j["seed"] = spec.seed;
  j["local_dim"] = spec.local_dim;
  if (spec.family == "explicit") {
    j["range"] = spec.explicit_range;
    j["terms"] = json::array();
    for (const auto& t : spec.explicit_terms) {
      j["terms"].push_back({{"support", t.support()}, {"data", detail::matrix_to_json(t.matrix())}});
    }
  }
  return j;
}

}  // namespace

std::string to_canonical_json(const ModelSpec& spec) { return spec_to_json(spec).dump(2); }

ModelSpec parse_model_spec(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model description is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("model description must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "family" && key != "params" && key != "sites" && key != "seed" &&
        key != "local_dim" && key != "range" && key != "terms") {
      throw ConfigError("unknown model field '" + key + "'");
    }
  }

  ModelSpec spec;
  try {
    spec.family = j.at("family").get<std::string>();
    spec.sites = j.at("sites").get<int>();
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.local_dim = j.value("local_dim", 2);
    if (j.contains("params")) {
      for (const auto& [k, v] : j.at("params").items()) {
        if (!v.is_number()) throw ConfigError("parameter '" + k + "' must be a number");
        spec.params[k] = v.get<double>();
      }
    }
    if (spec.family == "explicit") {
      spec.explicit_range = j.at("range").get<int>();
      for (const auto& t : j.at("terms")) {
        spec.explicit_terms.push_back(detail::operator_from_json(t, spec.local_dim));
      }
    } else if (j.contains("terms") || j.contains("range")) {
      throw ConfigError("'terms'/'range' are only valid for family 'explicit'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed model description: ") + e.what());
  }
  if (spec.sites < 1) throw ConfigError("'sites' must be positive");
  if (spec.local_dim < 2) throw ConfigError("'local_dim' must be at least 2");
  return spec;
}

ModelSpec load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model_spec(buf.str());
}

ModelSpec explicit_spec(const Interaction& ia) {
  ModelSpec spec;
  spec.family = "explicit";
  spec.sites = ia.num_sites();
  spec.local_dim = ia.local_dim();
  spec.explicit_range = ia.range();
  for (const auto& [s, op] : ia.terms()) spec.explicit_terms.push_back(op);
  return spec;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace entlen
