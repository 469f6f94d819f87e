#ifndef STEFAN_H
#define STEFAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum StefanStatus {
  STEFAN_STATUS_OK = 0,
  STEFAN_STATUS_NULL_POINTER = 1,
  STEFAN_STATUS_INVALID_ARGUMENT = 2,
  STEFAN_STATUS_FOLDED_MESH = 3,
  STEFAN_STATUS_NON_POSITIVE_RADIUS = 4,
  STEFAN_STATUS_SOLVER_FAILURE = 5,
  STEFAN_STATUS_DEGENERATE_SENSITIVITY = 6,
  STEFAN_STATUS_IO = 7,
  STEFAN_STATUS_PARSE = 8,
  STEFAN_STATUS_PANIC = 9,
} StefanStatus;

/**
 * Melting-temperature curve of a forward run.
 */
typedef enum StefanPreset {
  /**
   * `(t - 5/2)^2 / 20`
   */
  STEFAN_PRESET_QUADRATIC = 0,
  /**
   * `(cos 2t - 1) / 20`
   */
  STEFAN_PRESET_COSINE = 1,
  /**
   * Values supplied in `StefanForwardParams::um_values`.
   */
  STEFAN_PRESET_CUSTOM = 2,
} StefanPreset;

/**
 * Reconstructed melting temperature with per-step residuals.
 */
typedef struct StefanSchedule StefanSchedule;

/**
 * Sequence of boundaries, optionally tagged with the noise that produced it.
 */
typedef struct StefanTube StefanTube;

typedef struct StefanForwardParams {
  double dt;
  size_t steps;
  /**
   * Fourier order `M`.
   */
  size_t order;
  size_t boundary_vertices;
  size_t rings;
  /**
   * `2M+1` coefficients `[a_{-M}, ..., a_M]` of the initial boundary.
   */
  const double *initial_coeffs;
  /**
   * A `StefanPreset` value.
   */
  int32_t preset;
  /**
   * `steps + 1` values of `u_m` at `k dt`, read when `preset` is custom.
   */
  const double *um_values;
} StefanForwardParams;

typedef struct StefanInverseParams {
  size_t order;
  size_t boundary_vertices;
  size_t rings;
  /**
   * `u_m(0)`.
   */
  double um0;
} StefanInverseParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call into this library from the same thread.
 */
const char *stefan_last_error(void);

/**
 * Simulates the forward problem. On success `*out` owns a new tube with
 * `steps + 1` records.
 */
enum StefanStatus stefan_forward(const struct StefanForwardParams *params, struct StefanTube **out);

/**
 * Builds a tube from `count` records of `2 * order + 1` coefficients each,
 * stored row by row, at times `t0 + k dt`.
 */
enum StefanStatus stefan_tube_new(double t0,
                                  double dt,
                                  size_t order,
                                  size_t count,
                                  const double *coeffs,
                                  struct StefanTube **out);

/**
 * Number of records, 0 for a null handle.
 */
size_t stefan_tube_record_count(const struct StefanTube *tube);

/**
 * Fourier order `M`, 0 for a null handle.
 */
size_t stefan_tube_order(const struct StefanTube *tube);

/**
 * Time step, NaN for a null handle.
 */
double stefan_tube_dt(const struct StefanTube *tube);

/**
 * Copies record `k`: its time to `*t` and its `2M+1` coefficients to
 * `coeffs`, which must hold `len >= 2M+1` values.
 */
enum StefanStatus stefan_tube_record(const struct StefanTube *tube,
                                     size_t k,
                                     double *t,
                                     double *coeffs,
                                     size_t len);

enum StefanStatus stefan_tube_read(const char *path_, struct StefanTube **out);

enum StefanStatus stefan_tube_write(const struct StefanTube *tube, const char *path_);

/**
 * Adds Gaussian noise with standard deviation `delta * a_0` to every
 * coefficient of every record after the first.
 */
enum StefanStatus stefan_tube_add_noise(const struct StefanTube *tube,
                                        double delta,
                                        uint64_t seed,
                                        struct StefanTube **out);

void stefan_tube_free(struct StefanTube *tube);

/**
 * Recovers the melting temperature from `tube`.
 */
enum StefanStatus stefan_reconstruct(const struct StefanTube *tube,
                                     const struct StefanInverseParams *params,
                                     struct StefanSchedule **out);

/**
 * Number of grid points (steps + 1), 0 for a null handle.
 */
size_t stefan_schedule_len(const struct StefanSchedule *schedule);

/**
 * Copies the schedule into caller buffers of `len` points: grid times and
 * `u_m` values take `len` entries; slopes and residuals, one per interval,
 * take `len - 1`. Any output pointer may be null to skip it.
 */
enum StefanStatus stefan_schedule_get(const struct StefanSchedule *schedule,
                                      size_t len,
                                      double *times,
                                      double *values,
                                      double *slopes,
                                      double *residuals);

enum StefanStatus stefan_schedule_write(const struct StefanSchedule *schedule, const char *path_);

void stefan_schedule_free(struct StefanSchedule *schedule);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STEFAN_H */
