#ifndef CPSECTOR_SELFCHECK_HPP
#define CPSECTOR_SELFCHECK_HPP

#include <string>
#include <vector>

#include "cpsector/serialize.hpp"

namespace cpsector {

// One entry per acceptance criterion. Thresholds are fixed here, not
// configurable: they are the contract.
struct CriterionOutcome {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0;
  json details;
};

// ids 1..12; `reduced` shrinks instance counts (used by the CLI selftest).
CriterionOutcome run_criterion(int id, uint64_t seed, bool reduced);

// Runs the given criteria (all 1..12 when ids is empty). jobs > 1 evaluates
// criteria concurrently; each criterion draws from its own seeded engine, so
// results do not depend on scheduling.
std::vector<CriterionOutcome> run_criteria(uint64_t seed, bool reduced,
                                           int jobs,
                                           std::vector<int> ids = {});

// Small named witnesses shared by tests and criteria.
CpMap vector_state_map(int which, int n = 2);       // omega_{e_which} on M_n
CpMap delta_map(int which, int n = 2);              // evaluation on diag C^n
CpMap trace_functional_map(int n);                  // X -> tr(X) on M_n
CpMap depolarizing_map(int n);                      // X -> tr(X)/n 1

}  // namespace cpsector

#endif
