#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lsv/generators.hpp"

namespace lsv {

struct SuiteResult {
  std::string name;
  unsigned long cases = 0;
  unsigned long failures = 0;
  std::vector<std::string> notes;  // first few failure descriptions

  bool ok() const { return failures == 0; }
};

// Deduction erasure: random forward-derivable (S, m) pairs stay derivable
// after label erasure.
SuiteResult run_label_erasure_deduction_suite(std::uint64_t seed,
                                              unsigned long cases);

// Trace erasure: every enumerated valid trace of the built-in and random
// protocols erases to a valid trace of the erased protocol.
SuiteResult run_trace_erasure_suite(std::uint64_t seed,
                                    unsigned long random_protocols);

// Formula transfer: for restricted-fragment formulas, truth of the erased
// formula on the erased trace implies truth of the original on the original.
SuiteResult run_formula_transfer_suite(std::uint64_t seed, unsigned long cases);

// End-to-end soundness: over random (protocol, restricted formula) pairs,
// the pattern [erased verdict holds, labeled verdict violated] never occurs.
SuiteResult run_soundness_suite(std::uint64_t seed, unsigned long cases);

// Term algebra properties: erasure homomorphism and idempotence, match
// soundness/minimality, match/erasure compatibility, NNF equivalence.
SuiteResult run_algebra_suite(std::uint64_t seed, unsigned long cases);

std::vector<SuiteResult> run_all_suites(std::uint64_t seed, unsigned long cases);

}  // namespace lsv
