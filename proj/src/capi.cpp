#include "cpsector/cpsector_c.h"

#include <new>
#include <string>

#include "cpsector/runner.hpp"

struct cps_result {
  std::string payload;
  int status = 0;
};

namespace {

using cpsector::json;

int finish(cps_result** out, int status, json report) {
  if (!out) return status;
  auto* r = new (std::nothrow) cps_result;
  if (!r) return CPS_INVALID_INPUT;
  r->status = status;
  r->payload = cpsector::dump_json_17g(report);
  *out = r;
  return status;
}

int fail(cps_result** out, const std::string& message) {
  json err;
  err["error"] = message;
  return finish(out, CPS_INVALID_INPUT, std::move(err));
}

json parse(const char* text, const char* what) {
  if (!text) throw cpsector::InvalidInput(std::string(what) + ": null input");
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded())
    throw cpsector::InvalidInput(std::string(what) + ": malformed JSON");
  return j;
}

cpsector::RunOptions parse_options(const char* options_json) {
  json j = options_json ? parse(options_json, "options") : json::object();
  return cpsector::options_from_json(j);
}

template <typename Fn>
int guarded(cps_result** out, Fn&& fn) {
  try {
    cpsector::RunResult r = fn();
    return finish(out, r.status, std::move(r.report));
  } catch (const cpsector::InvalidInput& e) {
    return fail(out, e.what());
  } catch (const std::exception& e) {
    return fail(out, std::string("internal error: ") + e.what());
  }
}

}  // namespace

extern "C" {

int cps_dilate(const char* cpmap_json, const char* options_json,
               cps_result** out) {
  return guarded(out, [&] {
    return cpsector::run_dilate(parse(cpmap_json, "cp map"),
                                parse_options(options_json));
  });
}

int cps_compare(const char* cpmap_a_json, const char* cpmap_b_json,
                const char* mode, const char* options_json, cps_result** out) {
  return guarded(out, [&] {
    if (!mode) throw cpsector::InvalidInput("compare: null mode");
    return cpsector::run_compare(parse(cpmap_a_json, "cp map a"),
                                 parse(cpmap_b_json, "cp map b"), mode,
                                 parse_options(options_json));
  });
}

int cps_decompose(const char* cpmap_json, const char* options_json,
                  cps_result** out) {
  return guarded(out, [&] {
    return cpsector::run_decompose(parse(cpmap_json, "cp map"),
                                   parse_options(options_json));
  });
}

int cps_kappa(const char* measure_json, const char* options_json,
              cps_result** out) {
  return guarded(out, [&] {
    return cpsector::run_kappa(parse(measure_json, "cp measure"),
                               parse_options(options_json));
  });
}

int cps_localnet(const char* request_json, const char* options_json,
                 cps_result** out) {
  return guarded(out, [&] {
    return cpsector::run_localnet(parse(request_json, "localnet request"),
                                  parse_options(options_json));
  });
}

int cps_selftest(const char* options_json, cps_result** out) {
  return guarded(out, [&] {
    return cpsector::run_selftest(parse_options(options_json));
  });
}

const char* cps_result_json(const cps_result* result) {
  return result ? result->payload.c_str() : nullptr;
}

size_t cps_result_size(const cps_result* result) {
  return result ? result->payload.size() : 0;
}

void cps_result_free(cps_result* result) { delete result; }

const char* cps_version(void) { return "0.1.0"; }

}  // extern "C"
