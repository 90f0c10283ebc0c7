#include "entlen/corpus.hpp"

#include <array>
#include <random>

namespace entlen {
namespace {

struct Sizes {
  int a, b, c;
};

ModelSpec random_spec(std::mt19937_64& rng, int range, double lo, double hi) {
  ModelSpec spec;
  spec.family = "random";
  spec.params = {{"range", static_cast<double>(range)},
                 {"strength", std::uniform_real_distribution<double>(lo, hi)(rng)}};
  spec.seed = rng();
  return spec;
}

std::vector<CorpusInstance> corpus_over(std::uint64_t seed, int count,
                                        const std::vector<Sizes>& geometries,
                                        const std::string& prefix) {
  std::mt19937_64 rng(seed);
  std::vector<CorpusInstance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const int range = 1 + i % 2;
    const Sizes g = geometries[static_cast<std::size_t>(i / 2) % geometries.size()];
    out.push_back(make_instance(prefix + std::to_string(i), random_spec(rng, range, 0.5, 3.0),
                                g.a, g.b, g.c));
  }
  return out;
}

}  // namespace

CorpusInstance make_instance(std::string id, ModelSpec spec, int size_a, int size_b,
                             int size_c) {
  RegionsABC regions = RegionsABC::from_sizes(size_a, size_b, size_c);
  spec.sites = size_a + size_b + size_c;
  Interaction ia = build_model(spec);
  return {std::move(id), std::move(spec), std::move(ia), std::move(regions)};
}

std::vector<CorpusInstance> telescope_corpus(std::uint64_t seed, int count) {
  static const std::vector<Sizes> geometries = {{2, 2, 2}, {2, 3, 2}, {1, 6, 2}, {2, 6, 1},
                                                {1, 7, 1}, {3, 3, 3}, {2, 4, 3}, {3, 2, 2},
                                                {2, 5, 2}, {3, 4, 2}};
  return corpus_over(seed, count, geometries, "tele-");
}

std::vector<CorpusInstance> wide_b_corpus(std::uint64_t seed, int count) {
  static const std::vector<Sizes> geometries = {{1, 6, 2}, {2, 6, 1}, {1, 7, 1}, {1, 6, 1}};
  return corpus_over(seed, count, geometries, "wide-");
}

std::vector<CorpusInstance> suite_corpus(std::uint64_t seed, int count, int max_sites) {
  if (max_sites < 4) throw DomainError("suite instances need at least 4 sites");
  std::mt19937_64 rng(seed);
  std::vector<CorpusInstance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const int range = 1 + static_cast<int>(rng() % 2);
    const int n = std::uniform_int_distribution<int>(std::min(3 + range - 1, max_sites),
                                                     max_sites)(rng);
    // |B| >= range leaves n - |B| >= 2 sites for A and C.
    const int b = std::uniform_int_distribution<int>(range, std::max(range, n - 2))(rng);
    const int a = std::uniform_int_distribution<int>(1, std::max(1, n - b - 1))(rng);
    const int c = n - a - b;
    ModelSpec spec = random_spec(rng, range, 0.1, 3.0);
    out.push_back(make_instance("suite-" + std::to_string(i), std::move(spec), a, b, c));
  }
  return out;
}

}  // namespace entlen
