/* C API for the lattice KPP spreading-speed toolkit.
 *
 * All functions return kpp_status (or an exit code for kpp_run_task); on
 * failure kpp_last_error() carries a message for the calling thread.  Handles
 * are opaque and freed with their matching *_free function.
 */
#ifndef KPP_H
#define KPP_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct kpp_field kpp_field;

typedef enum {
    KPP_OK = 0,
    KPP_ERR_ARGUMENT = 1,
    KPP_ERR_CONFIG = 2,
    KPP_ERR_NUMERIC = 3
} kpp_status;

const char* kpp_version(void);

/* thread-local message from the last failing call */
const char* kpp_last_error(void);

/* Field construction from flat key=value text (field.* / nonlinearity.* keys,
 * newline separated), e.g.
 *   field.kind=periodic\nfield.period=2\nfield.c_table=1,2\n...
 */
kpp_status kpp_field_create(const char* spec_text, kpp_field** out);
void kpp_field_free(kpp_field* field);

kpp_status kpp_field_sample(const kpp_field* field, long long i, double* dprime, double* d,
                            double* c);
kpp_status kpp_field_reflect(const kpp_field* field, kpp_field** out);
kpp_status kpp_field_shift(const kpp_field* field, long long j, kpp_field** out);

/* KPP hypothesis check on [window_lo, window_hi]; pass=1 when every hypothesis
 * holds strictly, margin = min over the window tails of c_i - (sqrt d' - sqrt d)^2 */
kpp_status kpp_field_validate(const kpp_field* field, long long window_lo, long long window_hi,
                              int* pass, double* margin);

/* d' e^p + d e^-p - d' - d + c */
kpp_status kpp_lambda_closed_form(double dprime, double d, double c, double p, double* out);

/* Perron eigenvalue of the N-periodic wrap of L_p */
kpp_status kpp_lambda_periodic(const kpp_field* field, double p, int period, double* lambda,
                               double* residual);

/* eps-regularized cell problem, Richardson-extrapolated over the schedule */
kpp_status kpp_lambda_cell(const kpp_field* field, double p, const double* eps_schedule,
                           int n_eps, long long window_lo, long long window_hi, double* lambda);

/* largest Dirichlet eigenvalue Gamma_{l,k} (requires d'_i = d_{i+1}) */
kpp_status kpp_gamma_block(const kpp_field* field, long long l, long long k, double* out);

/* Lyapunov exponents of the decaying solution at gamma (d'_i = d_{i+1}) */
kpp_status kpp_lyapunov_mu(const kpp_field* field, double gamma, long long range, double* mu,
                           double* nu);

/* Spreading-speed report as a JSON string (kpp_string_free to release).
 * method: auto|closed|periodic|cell|random|envelope */
kpp_status kpp_spreading_speeds(const kpp_field* field, const char* method, char** json_out);
void kpp_string_free(char* s);

/* Runs a batch task exactly like the CLI and returns its exit code:
 * 0 ok, 1 sandwich acceptance failure, 2 config error, 3 numerical abort.
 * task: simulate|speed|eigen-curve|lyapunov|sandwich|ensemble.
 * seeds may be NULL (n_seeds 0); format "" keeps the config value. */
int kpp_run_task(const char* task, const char* config_path, const char* out_dir,
                 const long long* seeds, int n_seeds, const char* format);

/* absolute path of the manifest written by the last successful kpp_run_task
 * on this thread (empty string if none) */
const char* kpp_last_manifest(void);

#ifdef __cplusplus
}
#endif

#endif
