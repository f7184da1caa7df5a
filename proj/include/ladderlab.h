/* ladderlab C API: opaque handles + integer status codes.
 *
 * Status codes: 0 = ok, 1 = assertion/check failure, 2 = invalid input,
 * 3 = internal error. On nonzero status, llab_last_error() returns a
 * thread-local message valid until the next API call on the same thread.
 */
#ifndef LADDERLAB_H
#define LADDERLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct llab_scenario llab_scenario;

#define LLAB_OK 0
#define LLAB_CHECK_FAILED 1
#define LLAB_INVALID 2
#define LLAB_INTERNAL 3

const char* llab_version(void);
const char* llab_last_error(void);

/* scenario lifecycle */
int llab_scenario_load_file(const char* path, llab_scenario** out);
int llab_scenario_load_string(const char* json, llab_scenario** out);
void llab_scenario_free(llab_scenario* sc);
uint64_t llab_scenario_hash(const llab_scenario* sc);
uint64_t llab_scenario_seed(const llab_scenario* sc);
int llab_scenario_set_threads(llab_scenario* sc, int threads);

/* validation: writes one violation code per line into buf; *count receives
 * the number of violations (0 = valid) */
int llab_validate(const llab_scenario* sc, char* buf, size_t buflen,
                  int* count);

/* operations; each writes CSV artifacts under outdir */
int llab_run_static(const llab_scenario* sc, const char* outdir);
int llab_solve_ladder(const llab_scenario* sc, int agent_id,
                      const char* outdir);
int llab_solve_path(const llab_scenario* sc, const char* outdir);
int llab_simulate(const llab_scenario* sc, const char* outdir);
int llab_compare(const llab_scenario* sc, const char* outdir);
int llab_formation(const llab_scenario* sc, const char* outdir);
int llab_statics_sweep(const llab_scenario* sc, const char* param,
                       const char* outdir);

/* closed-form unraveling certificate for one agent; human-readable report
 * written into buf */
int llab_certify(const llab_scenario* sc, int agent_id, double p,
                 double delta_rep, char* buf, size_t buflen);

/* presets */
int llab_preset_count(void);
const char* llab_preset_name(int index);
int llab_preset_scenario_json(const char* preset, char* buf, size_t buflen);
/* runs a preset's assertions; prints one line per assertion to stdout;
 * returns LLAB_CHECK_FAILED if any assertion fails */
int llab_check_preset(const char* preset, const char* outdir, int threads);

#ifdef __cplusplus
}
#endif

#endif /* LADDERLAB_H */
