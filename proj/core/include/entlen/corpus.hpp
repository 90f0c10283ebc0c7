#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "entlen/spin_model.hpp"

namespace entlen {

/// A random model on a chain that is exactly A ∪ B ∪ C.
struct CorpusInstance {
  std::string id;
  ModelSpec spec;
  Interaction ia;
  RegionsABC regions;
};

/// Builds the instance for `spec` on |A|+|B|+|C| sites (spec.sites is overwritten).
CorpusInstance make_instance(std::string id, ModelSpec spec, int size_a, int size_b, int size_c);

/// Random models with r alternating 1, 2, strength J in [0.5, 3] and
/// geometries of at most 9 sites. Instances i and i+1 share a geometry.
std::vector<CorpusInstance> telescope_corpus(std::uint64_t seed, int count = 20);

/// Geometries with |B| >= 6 (n = 9) on otherwise identical draws.
std::vector<CorpusInstance> wide_b_corpus(std::uint64_t seed, int count = 20);

/// Random models for the inequality suites: r in {1, 2}, J in [0.1, 3],
/// n in [r + 2, max_sites], |B| >= r.
std::vector<CorpusInstance> suite_corpus(std::uint64_t seed, int count = 100, int max_sites = 10);

}  // namespace entlen
