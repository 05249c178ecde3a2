#ifndef MADBOUND_H
#define MADBOUND_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum MadCurveKind {
  MAD_CURVE_KIND_SUP = 0,
  MAD_CURVE_KIND_INF = 1,
  MAD_CURVE_KIND_SUP_BETA = 2,
  MAD_CURVE_KIND_INF_BETA = 3,
  MAD_CURVE_KIND_CANTELLI = 4,
} MadCurveKind;

typedef enum MadMode {
  MAD_MODE_SUP = 0,
  MAD_MODE_INF = 1,
} MadMode;

/*
 Result code of every fallible call.
 */
typedef enum MadStatus {
  MAD_STATUS_OK = 0,
  MAD_STATUS_INVALID_SET = 1,
  MAD_STATUS_OUT_OF_RANGE = 2,
  MAD_STATUS_INVALID_INPUT = 3,
  MAD_STATUS_NUMERICAL = 4,
  MAD_STATUS_INFEASIBLE = 5,
  MAD_STATUS_NULL_POINTER = 6,
  MAD_STATUS_PANIC = 7,
} MadStatus;

/*
 Sampled bound curve handle.
 */
typedef struct MadCurve MadCurve;

/*
 Extremal distribution handle.
 */
typedef struct MadDistribution MadDistribution;

/*
 Ambiguity set handle.
 */
typedef struct MadSet MadSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failure on this thread, or null if none. The
 pointer stays valid until the next failing call on the same thread.
 */
const char *mad_last_error_message(void);

/*
 Create a mean-MAD set on `[a, b]`.

 # Safety
 `out` must be null or point to writable storage for a pointer.
 */
enum MadStatus mad_set_new(double a, double b, double mu, double d, struct MadSet **out);

/*
 Create a set that also fixes `beta = P(X >= mu)`.

 # Safety
 `out` must be null or point to writable storage for a pointer.
 */
enum MadStatus mad_set_new_beta(double a,
                                double b,
                                double mu,
                                double d,
                                double beta,
                                struct MadSet **out);

/*
 Release a set. Null is ignored.

 # Safety
 `set` must be null or come from `mad_set_new*` and not be used again.
 */
void mad_set_free(struct MadSet *set);

/*
 Largest MAD compatible with the set's support and mean.

 # Safety
 `set` must be a live handle or null; `out` writable or null.
 */
enum MadStatus mad_set_d_max(const struct MadSet *set, double *out);

/*
 Knots `tau1 <= mu <= tau2` of the plain bounds.

 # Safety
 `set` must be a live handle or null; out-pointers writable or null.
 */
enum MadStatus mad_knots(const struct MadSet *set, double *tau1, double *tau2);

/*
 Largest `P(X >= t)` over the set.

 # Safety
 `set` must be a live handle or null; `out` writable or null.
 */
enum MadStatus mad_sup_tail(const struct MadSet *set, double t, double *out);

/*
 Smallest `P(X > t)` over the set.

 # Safety
 `set` must be a live handle or null; `out` writable or null.
 */
enum MadStatus mad_inf_tail(const struct MadSet *set, double t, double *out);

/*
 Largest `P(X >= t)` given `beta`; the set must carry one.

 # Safety
 `set` must be a live handle or null; `out` writable or null.
 */
enum MadStatus mad_sup_tail_beta(const struct MadSet *set, double t, double *out);

/*
 Smallest `P(X > t)` given `beta`; the set must carry one.

 # Safety
 `set` must be a live handle or null; `out` writable or null.
 */
enum MadStatus mad_inf_tail_beta(const struct MadSet *set, double t, double *out);

/*
 Member of the set attaining the bound at `t`.

 # Safety
 `set` must be a live handle or null; `out` writable or null.
 */
enum MadStatus mad_worst_case_new(const struct MadSet *set,
                                  double t,
                                  enum MadMode mode,
                                  struct MadDistribution **out);

/*
 Number of atoms.

 # Safety
 `dist` must be a live handle or null; `out` writable or null.
 */
enum MadStatus mad_distribution_len(const struct MadDistribution *dist, size_t *out);

/*
 Location and probability of atom `i`, in increasing order of location.

 # Safety
 `dist` must be a live handle or null; out-pointers writable or null.
 */
enum MadStatus mad_distribution_atom(const struct MadDistribution *dist,
                                     size_t i,
                                     double *x,
                                     double *p);

/*
 Release a distribution. Null is ignored.

 # Safety
 `dist` must be null or come from `mad_worst_case_new` and not be used again.
 */
void mad_distribution_free(struct MadDistribution *dist);

/*
 Evaluate a bound at `n >= 2` evenly spaced thresholds from `t_min` to
 `t_max`. `sigma` is read only by the Cantelli kind.

 # Safety
 `set` must be a live handle or null; `out` writable or null.
 */
enum MadStatus mad_curve_new(const struct MadSet *set,
                             enum MadCurveKind kind,
                             double sigma,
                             double t_min,
                             double t_max,
                             size_t n,
                             struct MadCurve **out);

/*
 Number of points.

 # Safety
 `curve` must be a live handle or null; `out` writable or null.
 */
enum MadStatus mad_curve_len(const struct MadCurve *curve, size_t *out);

/*
 Threshold and bound value of point `i`.

 # Safety
 `curve` must be a live handle or null; out-pointers writable or null.
 */
enum MadStatus mad_curve_point(const struct MadCurve *curve, size_t i, double *t, double *value);

/*
 Release a curve. Null is ignored.

 # Safety
 `curve` must be null or come from `mad_curve_new` and not be used again.
 */
void mad_curve_free(struct MadCurve *curve);

/*
 Interval containing the optimal order quantity at critical ratio `eta`.
 With `use_beta` the set's `beta` is used as well.

 # Safety
 `set` must be a live handle or null; out-pointers writable or null.
 */
enum MadStatus mad_newsvendor_interval(const struct MadSet *set,
                                       double eta,
                                       bool use_beta,
                                       double *lo,
                                       double *hi);

/*
 Maxmin price and its worst-case revenue; the set must start at 0.

 # Safety
 `set` must be a live handle or null; out-pointers writable or null.
 */
enum MadStatus mad_optimal_price(const struct MadSet *set, double *price, double *profit);

/*
 Upper bound on the insurer's expected payment `E[min(X, z)]`.

 # Safety
 `set` must be a live handle or null; `out` writable or null.
 */
enum MadStatus mad_retention_bound(const struct MadSet *set, double z, double *out);

/*
 Upper bound on the reinsurer's payment `E[min((X - z)+, cap)]`. A NaN or
 infinite `cap` means no cap.

 # Safety
 `set` must be a live handle or null; `out` writable or null.
 */
enum MadStatus mad_layer_bound(const struct MadSet *set, double z, double cap, double *out);

/*
 Safety margin `kappa = min(u, d / (2 eps))` for noise on `[-1, u]`.

 # Safety
 `out` must be writable or null.
 */
enum MadStatus mad_chance_kappa(double u, double d, double eps, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MADBOUND_H */
