#ifndef HODGELAB_H
#define HODGELAB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  HODGELAB_STATUS_OK = 0,
  HODGELAB_STATUS_NULL_POINTER = 1,
  HODGELAB_STATUS_INVALID_ARGUMENT = 2,
  HODGELAB_STATUS_DEGREE = 3,
  HODGELAB_STATUS_GRID = 4,
  HODGELAB_STATUS_EXPONENT = 5,
  HODGELAB_STATUS_RESOLUTION = 6,
  HODGELAB_STATUS_SHAPE = 7,
  HODGELAB_STATUS_CONFIG = 8,
  HODGELAB_STATUS_FORMAT = 9,
  HODGELAB_STATUS_GATE = 10,
  HODGELAB_STATUS_IO = 11,
  HODGELAB_STATUS_PANIC = 12,
} HodgelabStatus;

/**
 * Opaque differential form on a grid.
 */
typedef struct HodgelabForm HodgelabForm;

/**
 * Opaque torus grid.
 */
typedef struct HodgelabGrid HodgelabGrid;

/**
 * Opaque experiment report.
 */
typedef struct HodgelabReport HodgelabReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *hodgelab_last_error(void);

/**
 * Static name of a status code.
 */
const char *hodgelab_status_name(HodgelabStatus status);

/**
 * Creates a grid with `dim` resolutions and periods; `periods` may be NULL
 * for the unit torus.
 *
 * # Safety
 * `resolutions` must point to `dim` values, `periods` to `dim` values or be
 * NULL, and `out` must be writable.
 */
HodgelabStatus hodgelab_grid_new(const size_t *resolutions,
                                 const double *periods,
                                 size_t dim,
                                 HodgelabGrid **out);

/**
 * # Safety
 * `grid` must be NULL or a handle from [`hodgelab_grid_new`] not yet freed.
 */
void hodgelab_grid_free(HodgelabGrid *grid);

/**
 * Number of grid points.
 *
 * # Safety
 * `grid` must be a live grid handle.
 */
size_t hodgelab_grid_len(const HodgelabGrid *grid);

/**
 * Builds a form from its components, concatenated in multi-index order,
 * each in row-major grid order.
 *
 * # Safety
 * `grid` must be a live grid handle, `data` must point to `len` values and
 * `out` must be writable.
 */
HodgelabStatus hodgelab_form_new(const HodgelabGrid *grid,
                                 size_t degree,
                                 const double *data,
                                 size_t len,
                                 HodgelabForm **out);

/**
 * Random band-limited form with Fourier modes up to `bandwidth`.
 *
 * # Safety
 * `grid` must be a live grid handle and `out` must be writable.
 */
HodgelabStatus hodgelab_form_random(const HodgelabGrid *grid,
                                    size_t degree,
                                    size_t bandwidth,
                                    uint64_t seed,
                                    HodgelabForm **out);

/**
 * # Safety
 * `form` must be NULL or a form handle not yet freed.
 */
void hodgelab_form_free(HodgelabForm *form);

/**
 * Degree of the form, or `usize::MAX` for NULL.
 *
 * # Safety
 * `form` must be NULL or a live form handle.
 */
size_t hodgelab_form_degree(const HodgelabForm *form);

/**
 * Number of values held by the form (components × grid points).
 *
 * # Safety
 * `form` must be NULL or a live form handle.
 */
size_t hodgelab_form_len(const HodgelabForm *form);

/**
 * Copies the component values into `buffer`, which must hold
 * [`hodgelab_form_len`] values.
 *
 * # Safety
 * `form` must be a live form handle and `buffer` must point to `len`
 * writable values.
 */
HodgelabStatus hodgelab_form_copy(const HodgelabForm *form, double *buffer, size_t len);

/**
 * Exterior derivative.
 *
 * # Safety
 * `form` must be a live form handle and `out` must be writable.
 */
HodgelabStatus hodgelab_form_d(const HodgelabForm *form, HodgelabForm **out);

/**
 * Codifferential.
 *
 * # Safety
 * `form` must be a live form handle and `out` must be writable.
 */
HodgelabStatus hodgelab_form_codifferential(const HodgelabForm *form, HodgelabForm **out);

/**
 * Hodge star.
 *
 * # Safety
 * `form` must be a live form handle and `out` must be writable.
 */
HodgelabStatus hodgelab_form_star(const HodgelabForm *form, HodgelabForm **out);

/**
 * Pointwise wedge product `a ∧ b`.
 *
 * # Safety
 * `a` and `b` must be live form handles on the same grid and `out` must be
 * writable.
 */
HodgelabStatus hodgelab_form_wedge(const HodgelabForm *a,
                                   const HodgelabForm *b,
                                   HodgelabForm **out);

/**
 * `L²` norm.
 *
 * # Safety
 * `form` must be a live form handle and `out` must be writable.
 */
HodgelabStatus hodgelab_form_l2_norm(const HodgelabForm *form, double *out);

/**
 * Splits a form into its exact, coexact and harmonic parts.
 *
 * # Safety
 * `form` must be a live form handle and the three outputs must be writable.
 */
HodgelabStatus hodgelab_hodge_decompose(const HodgelabForm *form,
                                        HodgelabForm **exact,
                                        HodgelabForm **coexact,
                                        HodgelabForm **harmonic);

/**
 * Runs a named experiment with INI overrides (`config` may be NULL).
 *
 * # Safety
 * `experiment` must be a NUL-terminated string, `config` NULL or a
 * NUL-terminated string, and `out` writable.
 */
HodgelabStatus hodgelab_run_experiment(const char *experiment,
                                       const char *config,
                                       HodgelabReport **out);

/**
 * # Safety
 * `report` must be NULL or a report handle not yet freed.
 */
void hodgelab_report_free(HodgelabReport *report);

/**
 * Exit code of the report's verdict: 0 pass, 2 fail, 3 tainted pass; −1 for NULL.
 *
 * # Safety
 * `report` must be NULL or a live report handle.
 */
int32_t hodgelab_report_exit_code(const HodgelabReport *report);

/**
 * The report as JSON; release with [`hodgelab_string_free`]. NULL on failure.
 *
 * # Safety
 * `report` must be NULL or a live report handle.
 */
char *hodgelab_report_json(const HodgelabReport *report);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void hodgelab_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HODGELAB_H */
