#ifndef STCG_STCG_H
#define STCG_STCG_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define STCG_API __declspec(dllexport)
#else
#define STCG_API __attribute__((visibility("default")))
#endif

typedef enum {
    STCG_OK = 0,
    STCG_ERR_USAGE = 1,
    STCG_ERR_PARSE = 2,
    STCG_ERR_VALIDATION = 3,
    STCG_ERR_REFERENCE = 4,
    STCG_ERR_HERMITICITY = 5,
    STCG_ERR_SHAPE = 6,
    STCG_ERR_INVALID_WEIGHT = 7,
    STCG_ERR_SINGULAR = 8,
    STCG_ERR_DIVERGENT = 9,
    STCG_ERR_UNSUPPORTED_FILTER = 10,
    STCG_ERR_RANGE = 11,
    STCG_ERR_UNRESOLVED_SYMBOL = 12,
    STCG_ERR_DIVISION = 13,
    STCG_ERR_RESOURCE = 14,
    STCG_ERR_MARGIN = 15,
    STCG_ERR_NUMERIC = 16,
    STCG_ERR_ORACLE_MISMATCH = 17,
    STCG_ERR_IO = 18,
    STCG_ERR_INTERNAL = 99
} stcg_status;

typedef struct stcg_model stcg_model;
typedef struct stcg_effective stcg_effective;
typedef struct stcg_trajectory stcg_trajectory;

/* Message of the last failed call on this thread; empty after success. */
STCG_API const char* stcg_last_error(void);
STCG_API const char* stcg_status_name(int status);
STCG_API const char* stcg_version(void);
/* Strings returned through char** are owned by the caller. */
STCG_API void stcg_string_free(char* s);
/* Number with optional 2pi* prefix and unit suffix, e.g. "2pi*2GHz", "0.2ns". */
STCG_API int stcg_parse_quantity(const char* text, double* out);

/* Models */
STCG_API int stcg_model_from_json(const char* json, int autocomplete, stcg_model** out);
STCG_API int stcg_model_from_file(const char* path, int autocomplete, stcg_model** out);
/* Bundled models: "rabi", "parametron", "duffing". */
STCG_API int stcg_preset_json(const char* name, char** out);
/* Symbol values as a JSON object {name: value}; units allowed in string values; "tau" sets the filter width. */
STCG_API int stcg_model_set_params(stcg_model* m, const char* params_json);
STCG_API int stcg_model_set_tau(stcg_model* m, double tau);
STCG_API int stcg_model_to_json(const stcg_model* m, char** out);
STCG_API void stcg_model_free(stcg_model* m);

/* Effective models */
typedef struct {
    int order;
    int hamiltonian;
    int dissipators;
    int ir_limit;
    int reversed_convention;
    int workers;      /* 0: STCG_WORKERS or hardware concurrency */
    double threshold; /* drop terms whose peak coefficient magnitude (rad/s) is below this; 0 keeps every term */
    double window_t0; /* pruning window for time-dependent coefficients */
    double window_t1;
} stcg_derive_options;

STCG_API void stcg_derive_options_init(stcg_derive_options* o);
STCG_API int stcg_derive(const stcg_model* m, const stcg_derive_options* o, stcg_effective** out);
STCG_API int stcg_effective_from_json(const char* json, stcg_effective** out);
STCG_API int stcg_effective_to_json(const stcg_effective* e, char** out);
STCG_API int stcg_effective_to_text(const stcg_effective* e, char** out);
STCG_API int stcg_effective_counts(const stcg_effective* e, size_t* hamiltonian_terms, size_t* dissipator_terms);
STCG_API int stcg_effective_set_params(stcg_effective* e, const char* params_json);
STCG_API void stcg_effective_free(stcg_effective* e);

/* Simulation */
typedef struct {
    double t0, t1;
    double dt;              /* 0 selects the step rule */
    int store_every;        /* 0 stores no states */
    double trace_tolerance;
    double top_level_guard;
    int warn_only;          /* guards warn instead of aborting */
    double prefilter_tau;   /* > 0: start from the filtered exact state at t0 (effective runs only) */
} stcg_simulate_options;

STCG_API void stcg_simulate_options_init(stcg_simulate_options* o);
/* observables: n_obs pairs label/expression, e.g. {"pe", "0.5 + 0.5*sz"}. */
STCG_API int stcg_simulate_model(const stcg_model* m, const char* initial, const char* const* labels,
                                 const char* const* observables, size_t n_obs, const stcg_simulate_options* o,
                                 stcg_trajectory** out);
/* source supplies the exact dynamics for prefilter_tau > 0 and may be NULL otherwise. */
STCG_API int stcg_simulate_effective(const stcg_effective* e, const stcg_model* source, const char* initial,
                                     const char* const* labels, const char* const* observables, size_t n_obs,
                                     const stcg_simulate_options* o, stcg_trajectory** out);
/* Gaussian coarse-graining restricted to [t0, t1]. */
STCG_API int stcg_trajectory_coarse_grain(const stcg_trajectory* tr, double tau, double t0, double t1,
                                          stcg_trajectory** out);
STCG_API size_t stcg_trajectory_samples(const stcg_trajectory* tr);
STCG_API size_t stcg_trajectory_series_count(const stcg_trajectory* tr);
STCG_API const char* stcg_trajectory_label(const stcg_trajectory* tr, size_t k);
/* Copies sample times and one series (real and imaginary parts) into caller buffers of stcg_trajectory_samples entries; im may be NULL. */
STCG_API int stcg_trajectory_times(const stcg_trajectory* tr, double* t);
STCG_API int stcg_trajectory_series(const stcg_trajectory* tr, size_t k, double* re, double* im);
STCG_API int stcg_trajectory_csv(const stcg_trajectory* tr, char** out);
STCG_API int stcg_trajectory_meta_json(const stcg_trajectory* tr, char** out);
STCG_API void stcg_trajectory_free(stcg_trajectory* tr);

/* Metrics of every series present in both CSV documents, as JSON. */
STCG_API int stcg_compare_csv(const char* reference_csv, const char* test_csv, char** out_json);

#ifdef __cplusplus
}
#endif

#endif
