/* Public C interface to the oracle-complexity testbed: experiment configs,
 * runs, CSV/JSON emission, and the closed-form bound evaluators.
 *
 * Conventions:
 *   - Every fallible call returns ob_status; OB_OK is 0.
 *   - On failure, ob_last_error() returns a message for the calling thread,
 *     valid until that thread's next failing call.
 *   - char** outputs receive a NUL-terminated buffer owned by the caller;
 *     release with ob_string_free. Handles are released with their _free.
 */
#ifndef ORACLEBOUND_H
#define ORACLEBOUND_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ob_status {
  OB_OK = 0,
  OB_EINVAL = 1,         /* invalid argument */
  OB_EDOMAIN = 2,        /* point outside the domain */
  OB_EINCOMPATIBLE = 3,  /* mismatched oracle/algorithm/instance */
  OB_EUNSUPPORTED = 4,   /* operation not defined for this variant */
  OB_EPRECONDITION = 5,  /* violated documented precondition */
  OB_ECONSTRUCTION = 6,  /* randomized construction failed its budget */
  OB_EPARSE = 7,         /* malformed config text */
  OB_EIO = 8,            /* filesystem failure */
  OB_EINTERNAL = 9       /* invariant breach; report a bug */
} ob_status;

typedef struct ob_config ob_config;
typedef struct ob_result ob_result;

const char* ob_version(void);

/* Message for this thread's most recent failure; never NULL. */
const char* ob_last_error(void);

void ob_string_free(char* s);

/* --- configuration ------------------------------------------------------ */

/* Parses config text ([ensemble]/[oracle]/[algorithm]/[sweep]/[bound]
 * sections); the error message lists every violation, not just the first. */
ob_status ob_config_parse(const char* text, ob_config** out);

/* Built-in reproduction preset: sec41, thm2 ... thm8. */
ob_status ob_config_preset(const char* name, ob_config** out);

ob_status ob_config_override_seed(ob_config* cfg, uint64_t seed);

/* Output stem for emitted files ({stem}_{seed}.csv/.json). */
ob_status ob_config_set_stem(ob_config* cfg, const char* stem);

/* Canonical serialization; parsing it back reproduces the config. */
ob_status ob_config_echo(const ob_config* cfg, char** out);

void ob_config_free(ob_config* cfg);

/* --- runs and emission --------------------------------------------------- */

/* Runs the configured experiment. jobs <= 0 uses hardware concurrency; the
 * result is bit-identical for a given config regardless of jobs. */
ob_status ob_run(const ob_config* cfg, int jobs, ob_result** out);

ob_status ob_result_csv(const ob_result* res, char** out);
ob_status ob_result_json(const ob_result* res, char** out);

/* Writes {stem}_{seed}.{csv,json} under out_dir; format is "csv", "json", or
 * "both". On success *paths (if non-NULL) receives the newline-separated
 * list of files written. */
ob_status ob_result_write(const ob_result* res, const char* out_dir, const char* format,
                          char** paths);

/* 1 when the run completed and every validity flag in every emitted bound
 * report is satisfied, else 0. */
int ob_result_all_valid(const ob_result* res);

void ob_result_free(ob_result* res);

/* --- closed-form evaluators ---------------------------------------------- */

/* Identification lower bound in nats: n > 4 gives (1-delta)*ln(n) - ln(2),
 * n == 2 gives ln(2) - h2(delta); n in {3, 4} is unsupported. delta must lie
 * in [0, 1/2]. */
ob_status ob_fano_lower(int64_t n, double delta, double* out);

/* Plug-in mutual information of an n x n row-major count matrix, plus the
 * Miller-Madow correction term. Either output pointer may be NULL. */
ob_status ob_plugin_mi(const int64_t* counts, int n, double* mi, double* miller_madow);

/* Evaluates the named query-complexity lower bound (thm1, thm2_fog, thm2_sog,
 * thm3_fog, thm3_sog, thm4, thm8_k1) with parameters given as a flat JSON
 * object of numbers; *out receives the full report as JSON. */
ob_status ob_thm_lower_json(const char* which, const char* params_json, char** out);

/* Checks K*ln(1/eps_T) - L <= sum_{t<=T} eps_t^alpha over every prefix of
 * eps[0..len). *holds_up_to receives the longest satisfied prefix length and
 * *first_violation the 1-based first failing index (-1 if none). Either
 * output pointer may be NULL. */
ob_status ob_recurrence_check(double K, double L, double alpha, const double* eps, int64_t len,
                              int64_t* holds_up_to, int64_t* first_violation);

#ifdef __cplusplus
}
#endif

#endif /* ORACLEBOUND_H */
