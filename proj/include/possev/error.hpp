#pragma once

#include <stdexcept>
#include <string>

namespace possev {

/// Reason codes for every failure the engine can raise. Tests and the CLI
/// dispatch on the code; the message carries the specifics.
enum class errc {
  duplicate_label,
  empty_universe,
  universe_mismatch,
  membership_out_of_range,
  lambda_out_of_range,
  empty_fuzzy_subset,
  empty_set_query,
  mass_sum_not_one,
  negative_mass,
  zero_kappa,
  degenerate_negation,
  total_conflict,
  bad_marginals,
  bad_permutation,
  depth_mismatch,
  bad_depth,
  off_grid_membership,
  off_grid_mass,
  parse_error,
  unknown_reference,
  unknown_command,
  bad_query,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::duplicate_label: return "DuplicateLabel";
    case errc::empty_universe: return "EmptyUniverse";
    case errc::universe_mismatch: return "UniverseMismatch";
    case errc::membership_out_of_range: return "MembershipOutOfRange";
    case errc::lambda_out_of_range: return "LambdaOutOfRange";
    case errc::empty_fuzzy_subset: return "EmptyFuzzySubset";
    case errc::empty_set_query: return "EmptySetQuery";
    case errc::mass_sum_not_one: return "MassSumNotOne";
    case errc::negative_mass: return "NegativeMass";
    case errc::zero_kappa: return "ZeroKappa";
    case errc::degenerate_negation: return "DegenerateNegation";
    case errc::total_conflict: return "TotalConflict";
    case errc::bad_marginals: return "BadMarginals";
    case errc::bad_permutation: return "BadPermutation";
    case errc::depth_mismatch: return "DepthMismatch";
    case errc::bad_depth: return "BadDepth";
    case errc::off_grid_membership: return "OffGridMembership";
    case errc::off_grid_mass: return "OffGridMass";
    case errc::parse_error: return "ParseError";
    case errc::unknown_reference: return "UnknownReference";
    case errc::unknown_command: return "UnknownCommand";
    case errc::bad_query: return "BadQuery";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool ok, errc code, const std::string& msg) {
  if (!ok) raise(code, msg);
}

}  // namespace possev
