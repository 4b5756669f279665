#ifndef CPSECTOR_RUNNER_HPP
#define CPSECTOR_RUNNER_HPP

#include "cpsector/serialize.hpp"

namespace cpsector {

// Exit-code contract: 0 = ran, all verdicts true; 1 = ran, some verdict
// false; 2 = invalid input.
enum RunStatus { kOk = 0, kCheckFailed = 1, kInvalidInput = 2 };

struct RunOptions {
  Tolerance tol;
  uint64_t seed = 1;
  int jobs = 1;
};
RunOptions options_from_json(const json& j);

struct RunResult {
  int status = kOk;
  json report;
};

RunResult run_dilate(const json& input, const RunOptions& opt);
RunResult run_compare(const json& a, const json& b, const std::string& mode,
                      const RunOptions& opt);
RunResult run_decompose(const json& input, const RunOptions& opt);
RunResult run_kappa(const json& input, const RunOptions& opt);
RunResult run_localnet(const json& request, const RunOptions& opt);
RunResult run_selftest(const RunOptions& opt);

// Dispatch by command name; request layout per command documented in the
// README. Any thrown InvalidInput becomes status 2 with {"error": ...}.
RunResult run_command(const std::string& command, const json& request,
                      const RunOptions& opt);

}  // namespace cpsector

#endif
