/* C interface to the cpsector library.
 *
 * All inputs and outputs are JSON strings; matrices are row-major nested
 * arrays of [re, im] pairs. Every call fills *out with an opaque result
 * handle carrying the JSON report (also on failure, where the report is
 * {"error": "..."}). The caller frees it with cps_result_free.
 *
 * Return codes:
 *   0  ran, all verdicts true
 *   1  ran, at least one verdict false
 *   2  invalid input (parse error, shape mismatch, failed precondition)
 */
#ifndef CPSECTOR_C_H
#define CPSECTOR_C_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct cps_result cps_result;

enum cps_status {
  CPS_OK = 0,
  CPS_CHECK_FAILED = 1,
  CPS_INVALID_INPUT = 2
};

/* options_json: {"tol": number, "rank_cutoff": number, "seed": integer,
 * "jobs": integer} - every field optional, pass NULL or "{}" for defaults. */

/* Minimal Stinespring dilation of a CP map. */
int cps_dilate(const char* cpmap_json, const char* options_json,
               cps_result** out);

/* mode: "leq" | "orthogonal" | "disjoint" | "quasieq". */
int cps_compare(const char* cpmap_a_json, const char* cpmap_b_json,
                const char* mode, const char* options_json, cps_result** out);

/* Central (sector) decomposition of a CP map. */
int cps_decompose(const char* cpmap_json, const char* options_json,
                  cps_result** out);

/* Kappa family and orthogonality/subcentrality verdicts of a CP measure. */
int cps_kappa(const char* measure_json, const char* options_json,
              cps_result** out);

/* Lattice-net actions; request_json: {"net":.., "action":"build"|"verify"|
 * "sectors"|"commute", "inner":[..], "outer":[..], "state":matrix, ...}. */
int cps_localnet(const char* request_json, const char* options_json,
                 cps_result** out);

/* Reduced acceptance criteria 1-11; deterministic for a fixed seed. */
int cps_selftest(const char* options_json, cps_result** out);

const char* cps_result_json(const cps_result* result);
size_t cps_result_size(const cps_result* result);
void cps_result_free(cps_result* result);

const char* cps_version(void);

#ifdef __cplusplus
}
#endif

#endif
