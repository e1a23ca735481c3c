#ifndef CATSWAP_H
#define CATSWAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_NULL_POINTER = 1,
  CS_STATUS_INVALID_ARGUMENT = 2,
  CS_STATUS_OUT_OF_RANGE = 3,
  CS_STATUS_TOO_MANY_QUBITS = 4,
  CS_STATUS_INVALID_UTF8 = 5,
  CS_STATUS_INVALID_CONFIG = 6,
  CS_STATUS_BUFFER_TOO_SMALL = 7,
  CS_STATUS_PANIC = 8,
} CsStatus;

/**
 * Opaque state-vector handle.
 */
typedef struct CsState CsState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *cs_last_error(void);

/**
 * Library version, statically allocated.
 */
const char *cs_version(void);

/**
 * Basis state from a bitstring whose rightmost character is qubit 0.
 *
 * # Safety
 * `bits` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CsStatus cs_state_new_basis(size_t num_qubits, const char *bits, struct CsState **out);

/**
 * Cat state `(|p⟩ ± |p̄⟩)/√2` on qubits `0..len(pattern)`; `pattern[k]` is
 * qubit `k` and `sign` is `1` or `-1`.
 *
 * # Safety
 * `pattern` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CsStatus cs_state_new_cat(const char *pattern, int sign, struct CsState **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `state` must come from this library and not be used afterwards.
 */
void cs_state_free(struct CsState *state);

/**
 * Number of qubits, or 0 for a null handle.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
size_t cs_state_num_qubits(const struct CsState *state);

/**
 * # Safety
 * `state` must be a live handle.
 */
enum CsStatus cs_state_apply_h(struct CsState *state, size_t qubit);

/**
 * # Safety
 * `state` must be a live handle.
 */
enum CsStatus cs_state_apply_x(struct CsState *state, size_t qubit);

/**
 * # Safety
 * `state` must be a live handle.
 */
enum CsStatus cs_state_apply_z(struct CsState *state, size_t qubit);

/**
 * # Safety
 * `state` must be a live handle.
 */
enum CsStatus cs_state_apply_cnot(struct CsState *state, size_t control, size_t target);

/**
 * Copies the `2^n` amplitudes into `re` and `im`, each of length `len`.
 *
 * # Safety
 * `re` and `im` must each hold `len` doubles.
 */
enum CsStatus cs_state_amplitudes(const struct CsState *state, double *re, double *im, size_t len);

/**
 * Von Neumann entropy (bits) of the qubits in `subset`.
 *
 * # Safety
 * `subset` must hold `len` indices and `out` be a valid pointer.
 */
enum CsStatus cs_state_entropy(const struct CsState *state,
                               const size_t *subset,
                               size_t len,
                               double *out);

/**
 * Applies `⟨projector|` to `subset` (projector qubit `i` ↔ `subset[i]`).
 * `*residual` is set to a new handle, or null when the probability is zero.
 *
 * # Safety
 * Pointers must be valid; `subset` must hold `len` indices.
 */
enum CsStatus cs_state_project(const struct CsState *state,
                               const size_t *subset,
                               size_t len,
                               const struct CsState *projector,
                               double *probability,
                               struct CsState **residual);

/**
 * Measures `qubit` in the computational basis with randomness from `seed`
 * and returns the remaining qubits as a new handle.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CsStatus cs_state_measure(const struct CsState *state,
                               size_t qubit,
                               uint64_t seed,
                               int *bit,
                               struct CsState **residual);

/**
 * Recognizes a cat state on all qubits. Sets `*found` to 1 and fills
 * `pattern` (qubit 0 first, NUL-terminated) and `*sign` when it is one.
 *
 * # Safety
 * `pattern` must hold `pattern_len` bytes; other pointers must be valid.
 */
enum CsStatus cs_state_identify_cat(const struct CsState *state,
                                    int *found,
                                    char *pattern,
                                    size_t pattern_len,
                                    int *sign);

/**
 * Runs a TOML scenario. `format` is 0 for JSON, 1 for a table. `*report`
 * receives a string to release with [`cs_string_free`]; `*passed` is 1 when
 * every check passed.
 *
 * # Safety
 * `config` must be NUL-terminated; output pointers must be valid.
 */
enum CsStatus cs_run_scenario(const char *config, int format, char **report, int *passed);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void cs_string_free(char *s);

/**
 * `L / 2v`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CsStatus cs_direct_time(double length,
                             double speed,
                             double classical_speed,
                             double measurement_time,
                             double *out);

/**
 * Single-relay time; `*advantageous` is 1 when `t_m < L/4v`.
 *
 * # Safety
 * Output pointers must be valid.
 */
enum CsStatus cs_relay_time(double length,
                            double speed,
                            double classical_speed,
                            double measurement_time,
                            bool include_classical,
                            double *out,
                            int *advantageous);

/**
 * Time with `levels` layers of relays.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CsStatus cs_hierarchical_time(double length,
                                   double speed,
                                   double classical_speed,
                                   double measurement_time,
                                   uint32_t levels,
                                   bool include_classical,
                                   double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CATSWAP_H */
