#ifndef UNCERTAINTY_H
#define UNCERTAINTY_H

#include <stdbool.h>
#include <stddef.h>

typedef enum UcStatus {
  UC_STATUS_OK = 0,
  UC_STATUS_NULL_POINTER = 1,
  UC_STATUS_INVALID_ARGUMENT = 2,
  UC_STATUS_DIMENSION_MISMATCH = 3,
  UC_STATUS_INVALID_GRID = 4,
  UC_STATUS_DOMAIN_TOO_SMALL = 5,
  UC_STATUS_DEGENERATE = 6,
  UC_STATUS_UNSUPPORTED = 7,
  UC_STATUS_INTERNAL_CONSISTENCY = 8,
  UC_STATUS_PANIC = 9,
} UcStatus;

typedef enum UcScheme {
  UC_SCHEME_SPECTRAL_PERIODIC = 0,
  UC_SCHEME_CENTRAL_DIFF2 = 1,
  UC_SCHEME_CENTRAL_DIFF4 = 2,
} UcScheme;

typedef enum UcGaussianKind {
  UC_GAUSSIAN_KIND_COHERENT = 0,
  UC_GAUSSIAN_KIND_SQUEEZED = 1,
  UC_GAUSSIAN_KIND_SQUEEZED_GEN = 2,
} UcGaussianKind;

/**
 * Family of identities checked by [`uc_verify`].
 */
typedef enum UcIdentity {
  UC_IDENTITY_POSITION_MOMENTUM = 0,
  UC_IDENTITY_DILATION_BOUND = 1,
  UC_IDENTITY_DILATION_LAPLACIAN = 2,
  UC_IDENTITY_HARDY = 3,
  UC_IDENTITY_RADIAL_COULOMB = 4,
} UcIdentity;

/**
 * Complex samples on a grid.
 */
typedef struct UcField UcField;

/**
 * Uniform tensor grid.
 */
typedef struct UcGrid UcGrid;

/**
 * Verification reports with their identity strings.
 */
typedef struct UcReportList UcReportList;

/**
 * One report. `identity_id` is owned by the list and lives until the list is freed.
 */
typedef struct UcReport {
  const char *identity_id;
  double lhs_re;
  double lhs_im;
  double rhs_re;
  double rhs_im;
  double abs_residual;
  double rel_residual;
  double tol;
  bool passed;
} UcReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on this thread.
 */
const char *uc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *uc_version(void);

/**
 * Creates a grid of `points^dim` samples on `[-half_width, half_width)^dim`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum UcStatus uc_grid_new(size_t dim,
                          size_t points,
                          double half_width,
                          double offset,
                          enum UcScheme scheme,
                          struct UcGrid **out);

/**
 * Number of samples of the grid, or 0 for a null handle.
 *
 * # Safety
 * `grid` must be null or a live handle from [`uc_grid_new`].
 */
size_t uc_grid_len(const struct UcGrid *grid);

/**
 * # Safety
 * `grid` must be null or a handle from [`uc_grid_new`] not yet freed.
 */
void uc_grid_free(struct UcGrid *grid);

/**
 * Samples a Gaussian extremizer. `lambda` is ignored for coherent states and
 * `(sigma_re, sigma_im)` is used only for the generalized family.
 *
 * # Safety
 * `grid` must be a live handle and `out` valid for one write.
 */
enum UcStatus uc_field_gaussian(const struct UcGrid *grid,
                                enum UcGaussianKind kind,
                                double norm,
                                double lambda,
                                double theta,
                                double sigma_re,
                                double sigma_im,
                                struct UcField **out);

/**
 * Copies `len` samples (axis 0 fastest) into a new field.
 *
 * # Safety
 * `re` and `im` must point to `len` readable doubles each.
 */
enum UcStatus uc_field_from_values(const struct UcGrid *grid,
                                   const double *re,
                                   const double *im,
                                   size_t len,
                                   struct UcField **out);

/**
 * Copies the samples out; `len` must equal the grid size.
 *
 * # Safety
 * `re_out` and `im_out` must point to `len` writable doubles each.
 */
enum UcStatus uc_field_values(const struct UcField *field,
                              double *re_out,
                              double *im_out,
                              size_t len);

/**
 * # Safety
 * `field` must be null or a handle not yet freed.
 */
void uc_field_free(struct UcField *field);

/**
 * `(a|b)`, linear in `a` and antilinear in `b`.
 *
 * # Safety
 * Handles must be live; outputs must be writable.
 */
enum UcStatus uc_field_inner(const struct UcField *a,
                             const struct UcField *b,
                             double *re_out,
                             double *im_out);

/**
 * Runs the verifier for one identity family on a field.
 *
 * # Safety
 * `field` must be live and `out` valid for one write.
 */
enum UcStatus uc_verify(const struct UcField *field,
                        enum UcIdentity identity,
                        double tol,
                        struct UcReportList **out);

/**
 * Cauchy–Schwarz equalities for two vectors of length `len`, at the angles
 * `0, π/4, π/2, 2, π`.
 *
 * # Safety
 * The four input arrays must hold `len` readable doubles each.
 */
enum UcStatus uc_algebraic_check(const double *u_re,
                                 const double *u_im,
                                 const double *v_re,
                                 const double *v_im,
                                 size_t len,
                                 double tol,
                                 struct UcReportList **out);

/**
 * Number of reports, or 0 for a null handle.
 *
 * # Safety
 * `list` must be null or live.
 */
size_t uc_report_list_len(const struct UcReportList *list);

/**
 * Whether every report passed; false for a null handle.
 *
 * # Safety
 * `list` must be null or live.
 */
bool uc_report_list_all_passed(const struct UcReportList *list);

/**
 * Copies report `index` into `out`.
 *
 * # Safety
 * `list` must be live and `out` writable.
 */
enum UcStatus uc_report_list_get(const struct UcReportList *list,
                                 size_t index,
                                 struct UcReport *out);

/**
 * # Safety
 * `list` must be null or a handle not yet freed.
 */
void uc_report_list_free(struct UcReportList *list);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UNCERTAINTY_H */
