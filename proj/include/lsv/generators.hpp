#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "lsv/deduction.hpp"
#include "lsv/execution.hpp"
#include "lsv/logic.hpp"
#include "lsv/term.hpp"

namespace lsv {

// Seeded random generators for the property suites. Everything here is
// deterministic in the seed.
struct Rng {
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  std::mt19937_64 engine;

  unsigned range(unsigned lo, unsigned hi) {  // inclusive
    return std::uniform_int_distribution<unsigned>(lo, hi)(engine);
  }
  bool chance(double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine) < p;
  }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[range(0, static_cast<unsigned>(v.size()) - 1)];
  }
};

// Random ground term over the given agents; labels drawn from ag/adv when
// labeled, none otherwise.
Term random_ground_term(Rng& rng, const std::vector<std::string>& agents,
                        unsigned depth, bool labeled);

// Random substitution over a small variable alphabet, ground images.
Substitution random_substitution(Rng& rng, const std::vector<std::string>& agents,
                                 bool labeled);

// Random pattern with variables (for match property tests) plus a ground
// filling for all its variables.
struct PatternCase {
  Term pattern;
  Substitution filling;
};
PatternCase random_pattern_case(Rng& rng, const std::vector<std::string>& agents,
                                bool labeled);

// A knowledge set and a goal built from it by forward rule application, so
// the goal is derivable by construction.
struct DerivableCase {
  KnowledgeSet knowledge;
  Term goal;
};
DerivableCase random_derivable_case(Rng& rng, unsigned max_agents,
                                    unsigned build_steps);

// Random executable-by-construction two-role labeled protocol: receive
// patterns bind fresh variables, send terms use only bound ones.
Protocol random_protocol(Rng& rng, unsigned max_steps_per_role = 2,
                         unsigned max_depth = 2);

// Random closed formula in the restricted fragment for the protocol: every
// substitution application targets a variable that is statically bound at
// the quantified (role, point).
Formula random_l2_formula(Rng& rng, const Protocol& p);

// Random closed formula of the full logic (negations anywhere, equalities
// between arbitrary bound variables); used by the NNF equivalence suite.
Formula random_l1_formula(Rng& rng, const Protocol& p);

}  // namespace lsv
