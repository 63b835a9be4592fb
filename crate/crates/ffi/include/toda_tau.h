#ifndef TODA_TAU_H
#define TODA_TAU_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes, aligned with the CLI exit codes where they overlap.
typedef enum TodaStatus {
  TODA_STATUS_OK = 0,
  TODA_STATUS_NULL_POINTER = 1,
  TODA_STATUS_INVALID_ARGUMENT = 2,
  TODA_STATUS_NUMERICAL = 3,
  TODA_STATUS_BUFFER_TOO_SMALL = 5,
  TODA_STATUS_PANIC = 6,
} TodaStatus;

// Eventually-free Jacobi coefficients.
typedef struct TodaCoefficients TodaCoefficients;

// Contour grid and truncation.
typedef struct TodaGrid TodaGrid;

// Coefficients on a window at a list of flow times.
typedef struct TodaTrajectory TodaTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message on this thread into `buf` (NUL-terminated)
// and stores the full length, without the terminator, in `len_out`.
//
// Returns `BufferTooSmall` when `buf_len` cannot hold the message; `len_out`
// is still set. An empty message means no error is recorded.
//
// # Safety
// `buf` must point to `buf_len` writable bytes or be null with `buf_len == 0`;
// `len_out` must be null or writable.
enum TodaStatus toda_last_error_message(char *buf, size_t buf_len, size_t *len_out);

// Builds a grid; `m` nodes per circle, truncation `|n| <= n`.
//
// # Safety
// `out` must be writable.
enum TodaStatus toda_grid_new(double lambda0,
                              double radius,
                              size_t m,
                              size_t n,
                              struct TodaGrid **out);

// # Safety
// `grid` must come from [`toda_grid_new`] and not be used afterwards.
void toda_grid_free(struct TodaGrid *grid);

// Coefficients `a[i], b[i]` at sites `n_min + i`, with the constant tail outside.
//
// # Safety
// `a` and `b` must each point to `len` readable doubles; `out` must be writable.
enum TodaStatus toda_coefficients_new(int64_t n_min,
                                      const double *a,
                                      const double *b,
                                      size_t len,
                                      double tail_a,
                                      double tail_b,
                                      struct TodaCoefficients **out);

// Parses coefficients from the JSON form used by the CLI config's `q` key.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum TodaStatus toda_coefficients_from_json(const char *json, struct TodaCoefficients **out);

// # Safety
// `q` must come from this library and not be used afterwards.
void toda_coefficients_free(struct TodaCoefficients *q);

// `a_n` and `b_n` at any site, tail included.
//
// # Safety
// `q` must be a live handle; `a` and `b` must be writable.
enum TodaStatus toda_coefficients_get(const struct TodaCoefficients *q,
                                      int64_t n,
                                      double *a,
                                      double *b);

// Tau of the m-symbol of `q` at a group element given as JSON.
//
// # Safety
// Handles must be live, `g_json` NUL-terminated, `re` and `im` writable.
enum TodaStatus toda_tau(const struct TodaGrid *grid,
                         const struct TodaCoefficients *q,
                         const char *g_json,
                         double *re,
                         double *im);

// Tau at `q_ζ` for `ζ = zeta_re + i·zeta_im`.
//
// # Safety
// As for [`toda_tau`].
enum TodaStatus toda_tau_qzeta(const struct TodaGrid *grid,
                               const struct TodaCoefficients *q,
                               double zeta_re,
                               double zeta_im,
                               double *re,
                               double *im);

// Flows `q` for time `t` along the hierarchy of `p` (ascending coefficients)
// and returns the coefficients on `[n_lo, n_hi]` with a free tail.
//
// # Safety
// Handles must be live, `p` must point to `p_len` doubles, `out` writable.
enum TodaStatus toda_flow_apply(const struct TodaGrid *grid,
                                const struct TodaCoefficients *q,
                                const double *p,
                                size_t p_len,
                                double t,
                                int64_t n_lo,
                                int64_t n_hi,
                                struct TodaCoefficients **out);

// Runs the flow at every time in `times` from one base symbol.
//
// # Safety
// Handles must be live, `p` and `times` must point to `p_len` and
// `times_len` doubles, `out` writable.
enum TodaStatus toda_trajectory_new(const struct TodaGrid *grid,
                                    const struct TodaCoefficients *q,
                                    const double *p,
                                    size_t p_len,
                                    const double *times,
                                    size_t times_len,
                                    int64_t n_lo,
                                    int64_t n_hi,
                                    struct TodaTrajectory **out);

// # Safety
// `traj` must come from [`toda_trajectory_new`] and not be used afterwards.
void toda_trajectory_free(struct TodaTrajectory *traj);

// Number of time points.
//
// # Safety
// `traj` must be a live handle; `len` writable.
enum TodaStatus toda_trajectory_len(const struct TodaTrajectory *traj, size_t *len);

// Time, `a_n` and `b_n` of point `k`.
//
// # Safety
// `traj` must be a live handle; out pointers writable.
enum TodaStatus toda_trajectory_get(const struct TodaTrajectory *traj,
                                    size_t k,
                                    int64_t n,
                                    double *t,
                                    double *a,
                                    double *b);

// Smallest tau value used while recovering any point.
//
// # Safety
// `traj` must be a live handle; `out` writable.
enum TodaStatus toda_trajectory_min_tau(const struct TodaTrajectory *traj, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TODA_TAU_H */
