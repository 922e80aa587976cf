#ifndef RUBY_TCC_H
#define RUBY_TCC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum {
  RTCC_STATUS_OK = 0,
  RTCC_STATUS_NULL_POINTER = 1,
  RTCC_STATUS_INVALID_ARGUMENT = 2,
  RTCC_STATUS_NOT_CONVERGED = 3,
  RTCC_STATUS_INVARIANT = 4,
  RTCC_STATUS_INVALID_UTF8 = 5,
  RTCC_STATUS_BUFFER_TOO_SMALL = 6,
  RTCC_STATUS_IO = 7,
  RTCC_STATUS_PANIC = 8,
} RtccStatus;

/**
 * Pauli-sum Hamiltonian.
 */
typedef struct RtccHamiltonian RtccHamiltonian;

/**
 * Ruby lattice on the torus.
 */
typedef struct RtccLattice RtccLattice;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *rtcc_version(void);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library on this thread.
 */
const char *rtcc_last_error(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library and not yet
 * freed.
 */
void rtcc_string_free(char *s);

/**
 * Build the ruby lattice with `lx x ly` unit cells.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
RtccStatus rtcc_ruby_new(size_t lx, size_t ly, RtccLattice **out);

/**
 * # Safety
 * `lat` must be null or a handle from [`rtcc_ruby_new`] not yet freed.
 */
void rtcc_lattice_free(RtccLattice *lat);

/**
 * Number of qubits (sites); 0 for a null handle.
 *
 * # Safety
 * `lat` must be null or a live lattice handle.
 */
size_t rtcc_lattice_num_sites(const RtccLattice *lat);

/**
 * Number of triangles; 0 for a null handle.
 *
 * # Safety
 * `lat` must be null or a live lattice handle.
 */
size_t rtcc_lattice_num_triangles(const RtccLattice *lat);

/**
 * Two-body Hamiltonian with couplings `jx`, `jy`, `jz` on red, green and
 * blue edges.
 *
 * # Safety
 * `lat` must be a live lattice handle and `out` writable.
 */
RtccStatus rtcc_two_body_new(const RtccLattice *lat,
                             double jx,
                             double jy,
                             double jz,
                             RtccHamiltonian **out);

/**
 * # Safety
 * `h` must be null or a handle from [`rtcc_two_body_new`] not yet freed.
 */
void rtcc_hamiltonian_free(RtccHamiltonian *h);

/**
 * Number of qubits; 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live Hamiltonian handle.
 */
size_t rtcc_hamiltonian_num_qubits(const RtccHamiltonian *h);

/**
 * Number of Pauli terms; 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live Hamiltonian handle.
 */
size_t rtcc_hamiltonian_num_terms(const RtccHamiltonian *h);

/**
 * Write the `m` lowest eigenvalues of `h`, ascending, into `values`.
 *
 * # Safety
 * `h` must be a live Hamiltonian handle and `values` must point to at
 * least `capacity` writable doubles.
 */
RtccStatus rtcc_lowest_eigenvalues(const RtccHamiltonian *h,
                                   size_t m,
                                   double tol,
                                   uint64_t seed,
                                   double *values,
                                   size_t capacity);

/**
 * Product of two Pauli strings on `n` qubits, e.g. `"X0 Z3"`, written as
 * text with its phase.
 *
 * # Safety
 * `a` and `b` must be NUL-terminated strings and `out` writable.
 */
RtccStatus rtcc_pauli_multiply(size_t n, const char *a, const char *b, char **out);

/**
 * Plaquette integrals of motion of `h` on `lat` as a JSON array of
 * per-face reports.
 *
 * # Safety
 * `lat` and `h` must be live handles built together and `out` writable.
 */
RtccStatus rtcc_plaquette_ioms_json(const RtccLattice *lat, const RtccHamiltonian *h, char **out);

/**
 * Execute a JSON run configuration, as accepted by the command-line tool,
 * and return the JSON report. On failure `out` receives the JSON error
 * object instead, when the configuration could be parsed.
 *
 * # Safety
 * `config` must be a NUL-terminated string and `out` writable.
 */
RtccStatus rtcc_run_json(const char *config, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RUBY_TCC_H */
