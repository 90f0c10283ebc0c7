#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "entlen/separability.hpp"

namespace entlen {

// Certificates are JSON documents (docs/certificate_format.md). Matrices are
// row-major arrays of [re, im] pairs written with round-trip precision, so a
// reader needs no part of this library to check them.

std::string certificate_to_json(const Certificate& cert);
/// Throws ConfigError on malformed input.
Certificate certificate_from_json(std::string_view text);

std::string report_to_json(const DecompositionReport& rep);

struct RevalidationResult {
  bool ok = false;
  double reconstruction_rel_err = 0.0;
  double worst_factor_margin = 0.0;
  double worst_ball_margin = 0.0;
  double negativity = 0.0;  // of the normalized target
  std::vector<std::string> failures;
};

/// Re-checks a certificate from its stored data alone: factor PSD-ness, ball
/// margins recomputed from the stored Δ, reconstruction against the target,
/// and PPT consistency of the verdict.
RevalidationResult revalidate(const Certificate& cert);

}  // namespace entlen
