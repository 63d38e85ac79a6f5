#ifndef ENTCOST_H
#define ENTCOST_H

/* Generated by cbindgen from the entcost-capi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code of every fallible call.
typedef enum EntcostStatus {
  ENTCOST_STATUS_OK = 0,
  ENTCOST_STATUS_NULL_ARGUMENT,
  ENTCOST_STATUS_INVALID_UTF8,
  ENTCOST_STATUS_PARSE_ERROR,
  ENTCOST_STATUS_DOMAIN_ERROR,
  ENTCOST_STATUS_DIMENSION_ERROR,
  ENTCOST_STATUS_TOO_LARGE,
  ENTCOST_STATUS_NOT_HERMITIAN,
  ENTCOST_STATUS_NOT_PSD,
  ENTCOST_STATUS_INVARIANT_VIOLATION,
  ENTCOST_STATUS_NO_CONVERGENCE,
} EntcostStatus;

// Verdict of the entanglement-breaking decision procedure.
typedef enum EntcostVerdict {
  ENTCOST_VERDICT_BREAKING = 0,
  ENTCOST_VERDICT_NOT_BREAKING = 1,
  ENTCOST_VERDICT_INDETERMINATE = 2,
} EntcostVerdict;

// Opaque handle to a validated bipartite density matrix.
typedef struct EntcostDensity EntcostDensity;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static string; never freed by the caller.
const char *entcost_version(void);

// Cost, distillation and formation values of the two-component Bell
// mixture with weight `p` in [0, 1/2]. Any out-pointer may be null.
//
// # Safety
// Non-null out-pointers must be valid for writing one double.
enum EntcostStatus entcost_bell_mix_measures(double p,
                                             double *out_ec,
                                             double *out_ed,
                                             double *out_ef);

// New handle holding the two-component Bell mixture with weight `p`.
//
// # Safety
// `out` must be valid for writing one pointer.
enum EntcostStatus entcost_density_bell_mix(double p, struct EntcostDensity **out);

// Parses a state document `{"dims": [dA, dB], "re": [[..]], "im": [[..]]}`
// into a new handle.
//
// # Safety
// `json` must be a valid NUL-terminated string, `out` valid for writing
// one pointer.
enum EntcostStatus entcost_density_from_json(const char *json, struct EntcostDensity **out);

// Serializes the state back to its JSON document.
//
// # Safety
// `state` must be a live handle, `out` valid for writing one pointer.
enum EntcostStatus entcost_density_to_json(const struct EntcostDensity *state, char **out);

// Bipartite dimensions of the state.
//
// # Safety
// `state` must be a live handle; non-null out-pointers must be writable.
enum EntcostStatus entcost_density_dims(const struct EntcostDensity *state,
                                        size_t *out_da,
                                        size_t *out_db);

// Releases a handle; null is ignored.
//
// # Safety
// `state` must come from this library and not be freed twice.
void entcost_density_free(struct EntcostDensity *state);

// Releases a string returned by this library; null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void entcost_string_free(char *s);

// Von Neumann entropy of the state in bits.
//
// # Safety
// `state` must be a live handle, `out` valid for writing one double.
enum EntcostStatus entcost_von_neumann_entropy(const struct EntcostDensity *state, double *out);

// Closed-form entanglement of formation of a two-qubit state, in ebits.
//
// # Safety
// `state` must be a live handle, `out` valid for writing one double.
enum EntcostStatus entcost_ef_two_qubit(const struct EntcostDensity *state, double *out);

// Variational upper bound on the entanglement of formation.
//
// `ensemble_size = 0` selects the rank-squared default. `out_value`
// receives the bound; when `out_json` is non-null it receives the full
// result document (value, history and the realizing decomposition).
//
// # Safety
// `state` must be a live handle; non-null out-pointers must be writable.
enum EntcostStatus entcost_ef_upper_bound(const struct EntcostDensity *state,
                                          size_t ensemble_size,
                                          uint32_t restarts,
                                          uint32_t max_iters,
                                          uint64_t seed,
                                          double *out_value,
                                          char **out_json);

// Entanglement-breaking verdict for the trace-out channel of one of the
// four reference subspaces (`id` in 1..=4). `out_min_pt_eig` receives the
// minimum partial-transpose eigenvalue of the Choi state; `out_json`, if
// non-null, the full certificate document.
//
// # Safety
// Non-null out-pointers must be writable.
enum EntcostStatus entcost_eb_certify_subspace(uint8_t id,
                                               enum EntcostVerdict *out_verdict,
                                               double *out_min_pt_eig,
                                               char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTCOST_H */
