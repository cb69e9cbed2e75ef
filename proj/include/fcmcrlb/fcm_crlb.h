/* C interface to the FCM estimation / CRLB simulator.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every call that can fail returns an
 * fcm_status; the message for the most recent failure on the calling
 * thread is available from fcm_last_error(). */
#ifndef FCM_CRLB_H
#define FCM_CRLB_H

#include <stddef.h>
#include <stdint.h>

#if defined(FCM_BUILDING_LIBRARY)
#define FCM_API __attribute__((visibility("default")))
#else
#define FCM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fcm_status {
  FCM_OK = 0,
  FCM_ERR_INVALID_ARGUMENT = 1,
  FCM_ERR_DOMAIN = 2,
  FCM_ERR_NOT_PSD = 3,
  FCM_ERR_PRECONDITION = 4,
  FCM_ERR_DIMENSION = 5,
  FCM_ERR_CONFIG = 6,
  FCM_ERR_IO = 7,
  FCM_ERR_INTERNAL = 8
} fcm_status;

typedef struct fcm_config fcm_config;
typedef struct fcm_result fcm_result;

typedef void (*fcm_warning_fn)(const char* message, void* user_data);

FCM_API const char* fcm_status_string(fcm_status status);
FCM_API const char* fcm_last_error(void);

/* Route library warnings to `fn` (NULL restores the stderr default). */
FCM_API void fcm_set_warning_callback(fcm_warning_fn fn, void* user_data);

/* Configuration. `experiment` may be NULL when the text names one. */
FCM_API fcm_status fcm_config_default(const char* experiment, fcm_config** out);
FCM_API fcm_status fcm_config_parse(const char* json_text, const char* experiment,
                                    fcm_config** out);
FCM_API fcm_status fcm_config_load(const char* path, const char* experiment, fcm_config** out);
FCM_API void fcm_config_free(fcm_config* cfg);

FCM_API fcm_status fcm_config_set_seed(fcm_config* cfg, uint64_t seed);
FCM_API fcm_status fcm_config_set_mode(fcm_config* cfg, const char* mode);
FCM_API fcm_status fcm_config_set_workers(fcm_config* cfg, unsigned workers);
FCM_API fcm_status fcm_config_set_out_path(fcm_config* cfg, const char* path);
FCM_API fcm_status fcm_config_set_paper_scale(fcm_config* cfg);

/* Borrowed strings; valid until the handle is freed or modified. */
FCM_API const char* fcm_config_out_path(const fcm_config* cfg);
FCM_API const char* fcm_config_experiment(const fcm_config* cfg);
FCM_API const char* fcm_config_serialized(const fcm_config* cfg);
FCM_API uint64_t fcm_config_hash(const fcm_config* cfg);

/* Running an experiment. */
FCM_API fcm_status fcm_run(const fcm_config* cfg, fcm_result** out);
FCM_API const char* fcm_result_csv(const fcm_result* result);
FCM_API size_t fcm_result_rows(const fcm_result* result);
FCM_API fcm_status fcm_result_write(const fcm_result* result, const char* path);
FCM_API void fcm_result_free(fcm_result* result);

/* Scalar closed forms. */
FCM_API fcm_status fcm_bessel_j0(double x, double* out);
FCM_API fcm_status fcm_lambda_max_fit(int n, double fdts, double* out);
FCM_API fcm_status fcm_avgmse_lb(int n, long n_t, double gamma, double omega, double* out);
FCM_API fcm_status fcm_avgmse_lb_pilot_free(int n, long n_t, double gamma, double lambda_max,
                                            double* out);
FCM_API fcm_status fcm_avgmse_lb_insightful(int n, long n_t, double gamma, double fdts,
                                            double* out);

#ifdef __cplusplus
}
#endif

#endif /* FCM_CRLB_H */
