/* C ABI for the evifuse conflict-aware evidential fusion library. */

#ifndef EVIFUSE_H
#define EVIFUSE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible entry point.
typedef enum EvifuseStatus {
  EVIFUSE_STATUS_OK = 0,
  EVIFUSE_STATUS_NULL_POINTER = 1,
  EVIFUSE_STATUS_INVALID_ARGUMENT = 2,
  EVIFUSE_STATUS_DIMENSION_MISMATCH = 3,
  EVIFUSE_STATUS_DOMAIN_ERROR = 4,
} EvifuseStatus;

// Fusion strategies selectable through the C API.
typedef enum EvifuseStrategy {
  EVIFUSE_STRATEGY_CMAM = 0,
  EVIFUSE_STRATEGY_AVERAGE_EVIDENCE = 1,
  EVIFUSE_STRATEGY_HARMONIC_REFERENCE = 2,
} EvifuseStrategy;

// Opaque opinion handle.
typedef struct EvifuseOpinion EvifuseOpinion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code.
const char *evifuse_status_message(enum EvifuseStatus status);

// Builds an opinion from a non-negative evidence vector of length `len`.
//
// # Safety
// `values` must point to `len` readable doubles; `out` must be a valid
// destination pointer. The returned handle must be released with
// [`evifuse_opinion_free`].
enum EvifuseStatus evifuse_opinion_from_evidence(const double *values,
                                                 uintptr_t len,
                                                 struct EvifuseOpinion **out);

// Builds an opinion from explicit belief masses and an uncertainty mass
// (which must sum to one).
//
// # Safety
// `belief` must point to `len` readable doubles; `out` must be valid.
enum EvifuseStatus evifuse_opinion_new(const double *belief,
                                       uintptr_t len,
                                       double uncertainty,
                                       struct EvifuseOpinion **out);

// Releases an opinion handle. Null is accepted and ignored.
//
// # Safety
// `opinion` must be a handle returned by this library, not yet freed.
void evifuse_opinion_free(struct EvifuseOpinion *opinion);

// Number of classes of an opinion.
//
// # Safety
// Both pointers must be valid.
enum EvifuseStatus evifuse_opinion_class_count(const struct EvifuseOpinion *opinion,
                                               uintptr_t *out);

// Copies the belief vector into `buf`, which must hold exactly the class
// count.
//
// # Safety
// `buf` must point to `len` writable doubles.
enum EvifuseStatus evifuse_opinion_belief(const struct EvifuseOpinion *opinion,
                                          double *buf,
                                          uintptr_t len);

// Uncertainty mass of an opinion.
//
// # Safety
// Both pointers must be valid.
enum EvifuseStatus evifuse_opinion_uncertainty(const struct EvifuseOpinion *opinion, double *out);

// Degree of conflict between two opinions, in `[0, 1]`.
//
// # Safety
// All pointers must be valid handles / destinations.
enum EvifuseStatus evifuse_conflict_degree(const struct EvifuseOpinion *a,
                                           const struct EvifuseOpinion *b,
                                           double *out);

// Conflict-aware pairwise fusion.
//
// # Safety
// All pointers must be valid; the result must be freed.
enum EvifuseStatus evifuse_fuse_pair(const struct EvifuseOpinion *a,
                                     const struct EvifuseOpinion *b,
                                     struct EvifuseOpinion **out);

// Left fold of the selected strategy over `n` opinions in the given order.
//
// # Safety
// `opinions` must point to `n` valid handles; `out` must be valid; the
// result must be freed.
enum EvifuseStatus evifuse_fuse_many(const struct EvifuseOpinion *const *opinions,
                                     uintptr_t n,
                                     enum EvifuseStrategy strategy,
                                     struct EvifuseOpinion **out);

// Argmax class under the projected probabilities `b_k + u/K`.
//
// # Safety
// Both pointers must be valid.
enum EvifuseStatus evifuse_predicted_class(const struct EvifuseOpinion *opinion, uintptr_t *out);

// Maps a length-3 coarse evidence vector (W, NREM, REM) onto the five fine
// classes with the uniform NREM split. `out5` receives five doubles.
//
// # Safety
// `coarse` must point to 3 readable doubles and `out5` to 5 writable ones.
enum EvifuseStatus evifuse_map_coarse_evidence(const double *coarse, double *out5);

// Accuracy loss for one evidence vector against a true class.
//
// # Safety
// `evidence` must point to `k` readable doubles; `out` must be valid.
enum EvifuseStatus evifuse_loss_acc(const double *evidence,
                                    uintptr_t k,
                                    uintptr_t true_class,
                                    double *out);

// Misleading-evidence KL regularizer.
//
// # Safety
// Same contract as [`evifuse_loss_acc`].
enum EvifuseStatus evifuse_loss_kl(const double *evidence,
                                   uintptr_t k,
                                   uintptr_t true_class,
                                   double *out);

// Annealing coefficient `min(1, epoch/10)`.
double evifuse_annealing(uintptr_t epoch);

// Gradient of `l_acc + annealing(epoch) * l_kl` with respect to the
// evidence; `grad_out` receives `k` doubles.
//
// # Safety
// `evidence` must point to `k` readable doubles and `grad_out` to `k`
// writable ones.
enum EvifuseStatus evifuse_loss_gradient(const double *evidence,
                                         uintptr_t k,
                                         uintptr_t true_class,
                                         uintptr_t epoch,
                                         double *grad_out);

// Natural log of the gamma function, `x > 0`.
//
// # Safety
// `out` must be a valid destination pointer.
enum EvifuseStatus evifuse_log_gamma(double x, double *out);

// Digamma function, `x > 0`.
//
// # Safety
// `out` must be a valid destination pointer.
enum EvifuseStatus evifuse_digamma(double x, double *out);

// Trigamma function, `x > 0`.
//
// # Safety
// `out` must be a valid destination pointer.
enum EvifuseStatus evifuse_trigamma(double x, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EVIFUSE_H */
