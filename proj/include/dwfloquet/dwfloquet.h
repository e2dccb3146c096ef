#ifndef DWFLOQUET_H
#define DWFLOQUET_H

/* C interface of the dwfloquet library. Every function returning dwf_status
 * leaves a message for dwf_last_error() when it fails. Strings returned by the
 * library stay valid until the owning handle is destroyed or, for
 * dwf_config_get, until the next call on the same handle. */

#include <stddef.h>

#if defined(_WIN32)
#if defined(DWF_BUILDING_LIBRARY)
#define DWF_API __declspec(dllexport)
#else
#define DWF_API __declspec(dllimport)
#endif
#else
#define DWF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dwf_status {
    DWF_OK = 0,
    DWF_ERR_INVALID_ARGUMENT = 1,
    DWF_ERR_CONFIG = 2,
    DWF_ERR_NUMERICAL = 3,
    DWF_ERR_IO = 4,
    DWF_ERR_INTERNAL = 5
} dwf_status;

typedef struct dwf_config dwf_config;
typedef struct dwf_report dwf_report;
typedef struct dwf_spectrum dwf_spectrum;

DWF_API const char* dwf_version(void);

/* Message of the last failure on the calling thread; "" if none. */
DWF_API const char* dwf_last_error(void);

/* Field ("section.key") of the last configuration failure on this thread; "" if none. */
DWF_API const char* dwf_last_error_field(void);

/* Markdown page documenting every configuration key and default. */
DWF_API const char* dwf_reference_page(void);

/* ---- configuration ---- */

DWF_API dwf_status dwf_config_create(dwf_config** out);
DWF_API void dwf_config_destroy(dwf_config* cfg);
DWF_API dwf_status dwf_config_load(dwf_config* cfg, const char* path);
DWF_API dwf_status dwf_config_set(dwf_config* cfg, const char* key, const char* value);
DWF_API dwf_status dwf_config_get(dwf_config* cfg, const char* key, const char** value);
DWF_API dwf_status dwf_config_hash(dwf_config* cfg, const char** value);
/* DWF_OK when all ranges are valid, DWF_ERR_CONFIG naming the first bad field otherwise. */
DWF_API dwf_status dwf_config_validate(const dwf_config* cfg);

/* ---- tasks ---- */

/* task: spectrum, sweep, tunnel, dissipate, attractor, classical, validate.
 * out_dir may be NULL to use run.output_dir. On success *report must be freed
 * with dwf_report_destroy. */
DWF_API dwf_status dwf_run(const dwf_config* cfg, const char* task, const char* out_dir, dwf_report** report);
DWF_API size_t dwf_report_line_count(const dwf_report* report);
DWF_API const char* dwf_report_line(const dwf_report* report, size_t i);
DWF_API const char* dwf_report_json(const dwf_report* report);
/* 1 unless a validate run found errors */
DWF_API int dwf_report_valid(const dwf_report* report);
DWF_API void dwf_report_destroy(dwf_report* report);

/* ---- direct numerics ---- */

DWF_API dwf_status dwf_spectrum_compute(double D, double F, double omega, int K, int NF, dwf_spectrum** out);
DWF_API size_t dwf_spectrum_size(const dwf_spectrum* s);
/* State i in mean-energy order; any output pointer may be NULL. */
DWF_API dwf_status dwf_spectrum_state(const dwf_spectrum* s, size_t i, double* quasienergy, int* parity,
                                      double* mean_energy);
/* Purity of the asymptotic state over the M lowest states. */
DWF_API dwf_status dwf_spectrum_attractor_purity(const dwf_spectrum* s, int M, double gamma, double kT,
                                                 double* purity);
DWF_API void dwf_spectrum_destroy(dwf_spectrum* s);

/* Closed-form three-level probabilities out = {P_R, P_L, P_c}. */
DWF_API dwf_status dwf_three_state_probabilities(double delta, double delta_c, double b, double t, double out[3]);

/* Stroboscopic orbit; xs and ps receive n_periods + 1 points. */
DWF_API dwf_status dwf_classical_orbit(double D, double F, double omega, double x0, double p0, int n_periods,
                                       double* xs, double* ps);

#ifdef __cplusplus
}
#endif

#endif
