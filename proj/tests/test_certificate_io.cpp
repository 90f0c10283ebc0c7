#include <gtest/gtest.h>

#include <json.hpp>

#include "entlen/certificate_io.hpp"

using namespace entlen;

namespace {

Interaction tfi(int n) { return builtin_model("tfi", {{"coupling", 1.0}, {"field", 1.0}}, n); }

}  // namespace

TEST(CertificateIo, PipelineCertificateRoundTrips) {
  const auto rep = theorem_pipeline(tfi(8), RegionsABC::from_sizes(1, 6, 1));
  ASSERT_EQ(rep.verdict, Verdict::SeparableByConstruction);
  const std::string text = certificate_to_json(rep.certificate);
  const Certificate back = certificate_from_json(text);
  EXPECT_EQ(back.verdict, rep.certificate.verdict);
  EXPECT_EQ(back.cut.A, rep.certificate.cut.A);
  EXPECT_EQ(back.ball_blocks.size(), rep.certificate.ball_blocks.size());
  EXPECT_EQ(certificate_to_json(back), text);

  const RevalidationResult r = revalidate(back);
  EXPECT_TRUE(r.ok);
  EXPECT_LE(r.reconstruction_rel_err, kReconstructionTol);
  EXPECT_GE(r.worst_ball_margin, 0.0);
}

TEST(CertificateIo, TamperedWeightIsRejected) {
  const auto rep = theorem_pipeline(tfi(8), RegionsABC::from_sizes(1, 6, 1));
  auto j = nlohmann::json::parse(certificate_to_json(rep.certificate));
  ASSERT_FALSE(j.at("products").empty());
  j["products"][0]["weight"] = j["products"][0]["weight"].get<double>() * 1.5;
  const RevalidationResult r = revalidate(certificate_from_json(j.dump()));
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(r.failures.empty());
}

TEST(CertificateIo, InflatedDeltaBreaksBall) {
  const auto rep = theorem_pipeline(tfi(8), RegionsABC::from_sizes(1, 6, 1));
  auto j = nlohmann::json::parse(certificate_to_json(rep.certificate));
  ASSERT_FALSE(j.at("ball_blocks").empty());
  j["ball_blocks"][0]["identity_coeff"] = 0.0;
  EXPECT_FALSE(revalidate(certificate_from_json(j.dump())).ok);
}

TEST(CertificateIo, GurvitsRawRoundTrip) {
  Matrix d = Matrix::Zero(6, 6);
  d(1, 3) = d(3, 1) = 0.2;
  const Certificate c = gurvits_check(d, 2, 3);
  const Certificate back = certificate_from_json(certificate_to_json(c));
  EXPECT_EQ(back.dim_A, 2u);
  EXPECT_EQ(back.dim_C, 3u);
  EXPECT_TRUE(revalidate(back).ok);
}

TEST(CertificateIo, EntangledVerdictChecksNegativity) {
  Matrix phi = Matrix::Zero(4, 4);
  phi(0, 0) = phi(0, 3) = phi(3, 0) = phi(3, 3) = 0.5;
  Certificate c = exact_sep_test(phi, 2, 2);
  EXPECT_TRUE(revalidate(c).ok);
  c.verdict = Verdict::PPTConsistent;
  EXPECT_FALSE(revalidate(certificate_from_json(certificate_to_json(c))).ok);
}

TEST(CertificateIo, MalformedInput) {
  EXPECT_THROW(certificate_from_json("{"), ConfigError);
  EXPECT_THROW(certificate_from_json(R"({"format":"other"})"), ConfigError);
  EXPECT_THROW(certificate_from_json(R"({"format":"entlen-certificate/1","verdict":"maybe"})"),
               ConfigError);
}

TEST(CertificateIo, ReportEmbedsCertificate) {
  const auto rep = theorem_pipeline(tfi(4), RegionsABC::from_sizes(1, 2, 1));
  const auto j = nlohmann::json::parse(report_to_json(rep));
  EXPECT_EQ(j.at("verdict").get<std::string>(), std::string(to_string(rep.verdict)));
  EXPECT_TRUE(j.contains("certificate"));
  EXPECT_TRUE(j.contains("per_k"));
  EXPECT_TRUE(revalidate(certificate_from_json(j.at("certificate").dump())).ok);
}

TEST(Verdict, StringRoundTrip) {
  for (Verdict v : {Verdict::SeparableByConstruction, Verdict::PPTConsistent, Verdict::Entangled,
                    Verdict::Withheld}) {
    EXPECT_EQ(verdict_from_string(to_string(v)), v);
  }
  EXPECT_THROW(verdict_from_string("Separable"), ConfigError);
}
