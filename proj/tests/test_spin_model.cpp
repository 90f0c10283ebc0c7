#include <gtest/gtest.h>

#include <random>

#include "entlen/model_io.hpp"
#include "entlen/spin_model.hpp"
#include "oracles.hpp"

using namespace entlen;

namespace {

Sites range_sites(int a, int b) {
  Sites s;
  for (int i = a; i < b; ++i) s.push_back(i);
  return s;
}

}  // namespace

TEST(Hamiltonian, ZeroInteraction) {
  const Interaction ia = builtin_model("zero", {{"range", 1}}, 4);
  const LocalOperator h = hamiltonian(ia, Interval{1, 3});
  EXPECT_EQ(h.dim(), 4);
  EXPECT_EQ(h.matrix().norm(), 0.0);
  EXPECT_EQ(ia.strength(), 0.0);
}

TEST(Hamiltonian, SingleSiteField) {
  const double h = 0.7;
  const Interaction ia = builtin_model("field", {{"h", h}}, 2);
  const Matrix expected = h * (oracle::kron(pauli_z(), Matrix::Identity(2, 2)) +
                               oracle::kron(Matrix::Identity(2, 2), pauli_z()));
  EXPECT_LT((hamiltonian(ia, Interval{0, 2}).matrix() - expected).norm(), 1e-15);
}

TEST(Hamiltonian, TransverseIsingMatchesTermSum) {
  const Interaction ia = builtin_model("tfi", {{"coupling", 1.0}, {"field", 1.0}}, 3);
  const Sites all{0, 1, 2};
  Matrix expected = Matrix::Zero(8, 8);
  const Matrix zz = oracle::kron(pauli_z(), pauli_z());
  for (int i = 0; i < 2; ++i) expected -= oracle::embed(zz, 2, {i, i + 1}, all);
  for (int i = 0; i < 3; ++i) expected -= oracle::embed(pauli_x(), 2, {i}, all);
  EXPECT_LT((hamiltonian(ia, all).matrix() - expected).norm(), 1e-14);
}

TEST(Hamiltonian, OnlyTermsInsideRegion) {
  const Interaction ia = builtin_model("tfi", {{"coupling", 1.0}, {"field", 0.0}}, 4);
  // Region {0, 2} contains no bond.
  EXPECT_EQ(hamiltonian(ia, Sites{0, 2}).matrix().norm(), 0.0);
  EXPECT_THROW(hamiltonian(ia, Sites{}), DomainError);
}

TEST(Hamiltonian, BoundaryTermsBoundedByRangeTimesStrength) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int r = 1 + static_cast<int>(seed % 2);
    const Interaction ia =
        builtin_model("random", {{"range", r}, {"strength", 1.5}}, 7, seed);
    const Interval a{0, 3}, b{3, 7};
    const LocalOperator cross =
        hamiltonian(ia, Interval{0, 7}) - hamiltonian(ia, a) - hamiltonian(ia, b);
    EXPECT_LE(operator_norm(cross), r * ia.strength() + 1e-12);
  }
}

TEST(Neighborhood, ClipsToRegions) {
  const RegionsABC reg = RegionsABC::from_sizes(4, 5, 4);
  EXPECT_EQ(k_neighborhood(reg, 0), reg.B());
  EXPECT_EQ(k_neighborhood(reg, 2), (Interval{2, 11}));
  EXPECT_EQ(k_neighborhood(reg, 2).size(), 9);
  EXPECT_EQ(k_neighborhood(reg, 4), reg.all());
  EXPECT_EQ(k_neighborhood(reg, 40), reg.all());
  EXPECT_THROW(k_neighborhood(reg, -1), DomainError);

  const RegionsABC lopsided = RegionsABC::from_sizes(1, 2, 3);
  EXPECT_EQ(k_neighborhood(lopsided, 2), (Interval{0, 5}));
}

TEST(Neighborhood, RegionsMustBeAdjacent) {
  EXPECT_THROW(RegionsABC(Interval{0, 1}, Interval{2, 3}, Interval{3, 4}), DomainError);
  EXPECT_THROW(RegionsABC(Interval{0, 1}, Interval{1, 1}, Interval{1, 2}), DomainError);
}

TEST(TruncatedHamiltonian, EmptyAndSaturated) {
  const Interaction ia = builtin_model("tfi", {{"coupling", 1.0}, {"field", 1.0}}, 7);
  const RegionsABC reg = RegionsABC::from_sizes(2, 3, 2);
  EXPECT_FALSE(truncated_hamiltonian(ia, reg, Part::A, 0).has_value());
  const auto full = truncated_hamiltonian(ia, reg, Part::ABC, 5);
  ASSERT_TRUE(full.has_value());
  EXPECT_LT((full->matrix() - hamiltonian(ia, reg.all()).matrix()).norm(), 1e-15);
}

TEST(TruncatedHamiltonian, AcSplitsWhenBCoversRange) {
  const Interaction ia = builtin_model("random", {{"range", 2}, {"strength", 2.0}}, 8, 4);
  const RegionsABC reg = RegionsABC::from_sizes(3, 2, 3);
  for (int k = 1; k <= 3; ++k) {
    const auto hac = truncated_hamiltonian(ia, reg, Part::AC, k);
    const auto ha = truncated_hamiltonian(ia, reg, Part::A, k);
    const auto hc = truncated_hamiltonian(ia, reg, Part::C, k);
    ASSERT_TRUE(hac && ha && hc);
    EXPECT_LT(((*ha + *hc) - *hac).frobenius(), 1e-14);
  }
}

TEST(BuiltinModels, TransverseIsingStrength) {
  const Interaction ia = builtin_model("tfi", {{"coupling", 1.0}, {"field", 1.0}}, 6);
  EXPECT_EQ(ia.range(), 1);
  // Recompute the per-site sup from the term norms.
  double sup = 0.0;
  for (int i = 0; i < 6; ++i) {
    double s = 0.0;
    for (const auto& t : ia.term_norms()) {
      if (std::find(t.support.begin(), t.support.end(), i) != t.support.end()) s += t.norm;
    }
    sup = std::max(sup, s);
  }
  EXPECT_NEAR(ia.strength(), sup, 1e-14);
  EXPECT_NEAR(ia.strength(), 3.0, 1e-14);
}

TEST(BuiltinModels, RandomIsDeterministic) {
  const auto a = builtin_model("random", {{"range", 2}, {"strength", 1.0}}, 6, 7);
  const auto b = builtin_model("random", {{"range", 2}, {"strength", 1.0}}, 6, 7);
  const auto c = builtin_model("random", {{"range", 2}, {"strength", 1.0}}, 6, 8);
  ASSERT_EQ(a.terms().size(), b.terms().size());
  for (const auto& [support, term] : a.terms()) {
    EXPECT_EQ((term.matrix() - b.terms().at(support).matrix()).norm(), 0.0);
  }
  EXPECT_NEAR(a.strength(), 1.0, 1e-12);
  EXPECT_GT((a.terms().begin()->second.matrix() - c.terms().begin()->second.matrix()).norm(),
            0.0);
}

TEST(BuiltinModels, RejectsBadParameters) {
  EXPECT_THROW(builtin_model("nope", {}, 3), ConfigError);
  EXPECT_THROW(builtin_model("tfi", {{"coupling", 1.0}, {"bogus", 1.0}}, 3), ConfigError);
  EXPECT_THROW(builtin_model("random", {{"range", -1}, {"strength", 1.0}}, 3), ConfigError);
  EXPECT_THROW(builtin_model("tfi", {{"coupling", 1.0}}, 0), ConfigError);
}

TEST(Interaction, ValidatesTerms) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(Interaction(2, 1, 3, {LocalOperator(2, {0}, m)}), DomainError);
  EXPECT_THROW(Interaction(2, 1, 3, {LocalOperator(2, {0, 2}, Matrix::Identity(4, 4))}),
               DomainError);
  EXPECT_THROW(Interaction(2, 1, 3, {LocalOperator(2, {5}, pauli_z())}), DomainError);
}

TEST(Interaction, SumMergesRanges) {
  const auto a = builtin_model("field", {{"h", 1.0}}, 4);
  const auto b = builtin_model("random", {{"range", 2}, {"strength", 1.0}}, 4, 1);
  const Interaction s = a + b;
  EXPECT_EQ(s.range(), 2);
  const LocalOperator hs = hamiltonian(s, range_sites(0, 4));
  const LocalOperator expected = hamiltonian(a, range_sites(0, 4)) + hamiltonian(b, range_sites(0, 4));
  EXPECT_LT((hs - expected).frobenius(), 1e-13);
}

TEST(ModelIo, RoundTripBuiltin) {
  ModelSpec spec;
  spec.family = "heisenberg_xxz";
  spec.params = {{"jxy", 1.0}, {"jz", 0.5}, {"field", 0.1}};
  spec.sites = 5;
  const std::string text = to_canonical_json(spec);
  const ModelSpec back = parse_model_spec(text);
  EXPECT_EQ(back.family, spec.family);
  EXPECT_EQ(back.params, spec.params);
  EXPECT_EQ(to_canonical_json(back), text);
}

TEST(ModelIo, ExplicitReproducesInteraction) {
  const auto ia = builtin_model("random", {{"range", 2}, {"strength", 2.0}}, 5, 3);
  const ModelSpec spec = parse_model_spec(to_canonical_json(explicit_spec(ia)));
  const Interaction again = build_model(spec);
  EXPECT_EQ(again.range(), 2);
  const Sites all = range_sites(0, 5);
  EXPECT_EQ((hamiltonian(again, all).matrix() - hamiltonian(ia, all).matrix()).norm(), 0.0);
}

TEST(ModelIo, MalformedInputs) {
  EXPECT_THROW(parse_model_spec("not json"), ConfigError);
  EXPECT_THROW(parse_model_spec("[1,2]"), ConfigError);
  EXPECT_THROW(parse_model_spec(R"({"family":"tfi","sites":3,"extra":1})"), ConfigError);
  EXPECT_THROW(parse_model_spec(R"({"family":"tfi","sites":3,"params":{"field":"x"}})"),
               ConfigError);
  EXPECT_THROW(build_model(parse_model_spec(
                   R"({"family":"explicit","sites":2,"range":1,
                       "terms":[{"support":[0],"data":[[0,0],[1,0],[0,0],[0,0]]}]})")),
               ConfigError);
}

TEST(ModelIo, HashIsStable) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}
