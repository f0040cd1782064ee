#ifndef BIGJUMP_BIGJUMP_H
#define BIGJUMP_BIGJUMP_H

/* C interface to the heavy-tail single-big-jump laboratory: tail models,
 * exact windowed convolution queries, approximation/bound evaluators,
 * conditional-law total-variation distances, exact conditional samplers,
 * the compound-Poisson condensation check, and the experiment runner.
 *
 * All functions returning int use the bj_status codes below and set a
 * thread-local message readable via bj_last_error(). Strings returned
 * through char** are heap-allocated; release them with bj_string_free().
 */

#include <stddef.h>

#if defined(__GNUC__)
#define BJ_API __attribute__((visibility("default")))
#else
#define BJ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum bj_status {
  BJ_OK = 0,
  BJ_EINVAL = 1,    /* malformed arguments or config schema */
  BJ_EDOMAIN = 2,   /* outside the mathematical domain / regime */
  BJ_ERANGE = 3,    /* overflow or resource limit */
  BJ_EIO = 4,       /* file I/O failure */
  BJ_EINTERNAL = 5, /* unexpected internal failure */
};

enum bj_regime {
  BJ_REGIME_BIG_JUMP = 0,
  BJ_REGIME_GAUSSIAN = 1,
  BJ_REGIME_INTERMEDIATE = 2,
};

typedef struct bj_model bj_model;
typedef struct bj_rng bj_rng;
typedef struct bj_sampler bj_sampler;

BJ_API const char* bj_version(void);
BJ_API const char* bj_last_error(void);
BJ_API void bj_string_free(char* s);

/* ---- models ---- */

/* Symmetric zeta(1+alpha) jump law; NULL on failure. */
BJ_API bj_model* bj_model_zeta(double alpha);
/* Any supported model from its JSON description; NULL on failure. */
BJ_API bj_model* bj_model_from_json(const char* json_text);
BJ_API void bj_model_free(bj_model* m);
BJ_API int bj_model_to_json(const bj_model* m, char** json_out);

BJ_API int bj_model_log_pmf(const bj_model* m, long long k, double* out);
BJ_API int bj_model_log_survival(const bj_model* m, double x, double* out);
BJ_API int bj_model_mean(const bj_model* m, double* out);

/* ---- normalization scales ---- */

BJ_API int bj_scale_an(const bj_model* m, long long n, double* out);
BJ_API int bj_scale_bn(const bj_model* m, long long n, double* out);

/* ---- sums and approximations ---- */

/* log P(S_hat_n = x) / log P(S_hat_n > x) by exact windowed convolution. */
BJ_API int bj_sum_log_pmf(const bj_model* m, long long n, long long x,
                          long long window, double* out);
BJ_API int bj_sum_log_survival(const bj_model* m, long long n, long long x,
                               long long window, double* out);

/* log(n P(X = x)) and log(n P(X >= x)). */
BJ_API int bj_bigjump_local_log(const bj_model* m, long long n, long long x,
                                double* out);
BJ_API int bj_bigjump_tail_log(const bj_model* m, long long n, long long x,
                               double* out);

/* Relative-error bound for the single-big-jump approximation. */
BJ_API int bj_error_bound_total(const bj_model* m, long long n, long long x,
                                double eps, double* total, double* leading);

BJ_API int bj_regime_check(const bj_model* m, long long n, long long x,
                           int* regime, double* q_value);

/* log of the truncated-maximum bound with explicit constants. */
BJ_API int bj_fuk_nagaev_log_bound(const bj_model* m, long long n, long long x,
                                   long long y, double c1, double c2, double c3,
                                   double* out);

/* ---- conditional laws ---- */

BJ_API int bj_tv_exact_thm2(const bj_model* m, long long n, long long x,
                            long long x_minus, long long window,
                            long long k_cap, double* tv, double* bound_max);
BJ_API int bj_tv_exact_thm3(const bj_model* m, long long n, long long x,
                            long long x_minus, long long window, double* tv,
                            double* bound_max);
BJ_API int bj_tv_mc_shifted(const bj_model* m, long long n, long long x,
                            long long x_minus, long long samples,
                            unsigned long long seed, long long wlo,
                            long long whi, double* tv, double* stderr_out);

/* Exact conditional sampler over coordinates restricted to [wlo, whi];
 * hit=0 conditions on S_n > x, hit=1 on S_n = x. NULL on failure. */
BJ_API bj_sampler* bj_sampler_new(const bj_model* m, long long n, long long x,
                                  long long x_minus, int hit, long long wlo,
                                  long long whi);
BJ_API void bj_sampler_free(bj_sampler* s);

BJ_API bj_rng* bj_rng_new(unsigned long long seed, unsigned long long stream);
BJ_API void bj_rng_free(bj_rng* r);

/* out must hold n entries. */
BJ_API int bj_sampler_draw(const bj_sampler* s, bj_rng* r, long long* out,
                           size_t out_len);
BJ_API int bj_sampler_draw_limiting(const bj_sampler* s, bj_rng* r,
                                    long long* out, size_t out_len);
BJ_API int bj_sampler_draw_xi_star(const bj_sampler* s, bj_rng* r,
                                   long long* out, size_t out_len);

/* Swap the first position attaining the maximum to the last spot, in place. */
BJ_API int bj_shift_t(long long* seq, size_t len);

/* ---- compound Poisson ---- */

BJ_API int bj_condensation_check(double lambda, long long n, double alpha,
                                 long long window, long long terms_m,
                                 long long k, double c, double* ratio,
                                 double* prediction);

/* ---- experiments ---- */

/* Runs the JSON experiment config. format_override / out_path_override /
 * seed_override may be NULL to keep the config's values. The report text is
 * returned through report_out when non-NULL (caller frees). Returns
 * BJ_EINVAL for schema violations and BJ_EDOMAIN when every row failed. */
BJ_API int bj_run_experiment(const char* config_json,
                             const char* format_override,
                             const char* out_path_override,
                             const unsigned long long* seed_override,
                             char** report_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BIGJUMP_BIGJUMP_H */
