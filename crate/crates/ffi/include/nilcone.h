#ifndef NILCONE_H
#define NILCONE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  NILCONE_COLLAPSE_B = 0,
  NILCONE_COLLAPSE_C = 1,
  NILCONE_COLLAPSE_SPECIAL = 2,
  NILCONE_COLLAPSE_TILDE = 3,
} NilconeCollapse;

typedef enum {
  NILCONE_CONE_EXOTIC = 0,
  NILCONE_CONE_SP2 = 1,
  NILCONE_CONE_O2 = 2,
  NILCONE_CONE_SP_ODD = 3,
  NILCONE_CONE_O_ODD = 4,
} NilconeCone;

typedef enum {
  NILCONE_PIECE_ORBIT = 0,
  NILCONE_PIECE_TYPE_B = 1,
  NILCONE_PIECE_TYPE_C = 2,
  NILCONE_PIECE_SPECIAL = 3,
  NILCONE_PIECE_TILDE = 4,
  NILCONE_PIECE_E = 5,
  NILCONE_PIECE_SCRIPT_E = 6,
} NilconePiece;

typedef enum {
  NILCONE_STATUS_OK = 0,
  NILCONE_STATUS_NULL_POINTER = 1,
  NILCONE_STATUS_INVALID_ARGUMENT = 2,
  NILCONE_STATUS_UNSUPPORTED = 3,
  NILCONE_STATUS_BUDGET_EXCEEDED = 4,
  NILCONE_STATUS_BUFFER_TOO_SMALL = 5,
  NILCONE_STATUS_INTERNAL = 6,
} NilconeStatus;

/**
 * Opaque bipartition handle.
 */
typedef struct NilconeBipartition NilconeBipartition;

/**
 * Opaque census report handle.
 */
typedef struct NilconeCensusReport NilconeCensusReport;

/**
 * Opaque integer polynomial handle.
 */
typedef struct NilconePolynomial NilconePolynomial;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failed call on this thread; empty after a
 * success. Valid until the next call on this thread.
 */
const char *nilcone_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void nilcone_string_free(char *s);

/**
 * Builds a bipartition from two weakly decreasing part arrays.
 *
 * # Safety
 * Array pointers must be valid for their lengths; `out` must be writable.
 */
NilconeStatus nilcone_bipartition_new(const uint32_t *mu,
                                      size_t mu_len,
                                      const uint32_t *nu,
                                      size_t nu_len,
                                      NilconeBipartition **out);

/**
 * # Safety
 * `bp` must be null or a handle from this library, not yet freed.
 */
void nilcone_bipartition_free(NilconeBipartition *bp);

/**
 * Total size |μ| + |ν|; 0 for a null handle.
 *
 * # Safety
 * `bp` must be null or a live handle.
 */
uint32_t nilcone_bipartition_weight(const NilconeBipartition *bp);

/**
 * Text form such as `(1;1,1)`; release with `nilcone_string_free`.
 *
 * # Safety
 * `bp` must be null or a live handle.
 */
char *nilcone_bipartition_to_string(const NilconeBipartition *bp);

/**
 * Copies μ (`which` = 0) or ν (`which` = 1) into `buf`.
 *
 * # Safety
 * `buf` must be valid for `cap` entries; `len` must be writable.
 */
NilconeStatus nilcone_bipartition_parts(const NilconeBipartition *bp,
                                        uint32_t which,
                                        uint32_t *buf,
                                        size_t cap,
                                        size_t *len);

/**
 * Jordan type Φ^C.
 *
 * # Safety
 * `buf` must be valid for `cap` entries; `len` must be writable.
 */
NilconeStatus nilcone_phi_c(const NilconeBipartition *bp, uint32_t *buf, size_t cap, size_t *len);

/**
 * Jordan type Φ^B.
 *
 * # Safety
 * As [`nilcone_phi_c`].
 */
NilconeStatus nilcone_phi_b(const NilconeBipartition *bp, uint32_t *buf, size_t cap, size_t *len);

/**
 * Jordan type Φ^{B,2}.
 *
 * # Safety
 * As [`nilcone_phi_c`].
 */
NilconeStatus nilcone_phi_b2(const NilconeBipartition *bp, uint32_t *buf, size_t cap, size_t *len);

/**
 * Minimal element of the chosen sub-poset above `bp`.
 *
 * # Safety
 * `bp` must be a live handle; `out` must be writable.
 */
NilconeStatus nilcone_collapse(const NilconeBipartition *bp,
                               NilconeCollapse kind,
                               NilconeBipartition **out);

/**
 * Point-count polynomial of an orbit (`Orbit`), a type-B or type-C
 * nilpotent piece, or a union of orbits of the given kind.
 *
 * # Safety
 * `bp` must be a live handle; `out` must be writable.
 */
NilconeStatus nilcone_point_poly(NilconePiece kind,
                                 const NilconeBipartition *bp,
                                 NilconePolynomial **out);

/**
 * # Safety
 * `p` must be null or a live handle.
 */
void nilcone_polynomial_free(NilconePolynomial *p);

/**
 * Degree, or -1 for the zero polynomial or a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
int64_t nilcone_polynomial_degree(const NilconePolynomial *p);

/**
 * Dense coefficients, constant term first.
 *
 * # Safety
 * `buf` must be valid for `cap` entries; `len` must be writable.
 */
NilconeStatus nilcone_polynomial_coefficients(const NilconePolynomial *p,
                                              int64_t *buf,
                                              size_t cap,
                                              size_t *len);

/**
 * Value at `q`; fails with `InvalidArgument` if it does not fit in 64 bits.
 *
 * # Safety
 * `out` must be writable.
 */
NilconeStatus nilcone_polynomial_eval(const NilconePolynomial *p, int64_t q, int64_t *out);

/**
 * Text form such as `t^4 - 1`; release with `nilcone_string_free`.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
char *nilcone_polynomial_to_string(const NilconePolynomial *p);

/**
 * Runs all polynomial identity checks for rank `n`.
 *
 * # Safety
 * `passed` and `failures` must be writable.
 */
NilconeStatus nilcone_verify_identities(uint32_t n, bool *passed, size_t *failures);

/**
 * Enumerates a nilpotent cone over F_q and compares tallies with polynomials.
 *
 * # Safety
 * `out` must be writable.
 */
NilconeStatus nilcone_census_run(NilconeCone cone,
                                 uint32_t n,
                                 uint32_t q,
                                 bool override_budget,
                                 NilconeCensusReport **out);

/**
 * # Safety
 * `r` must be null or a live handle.
 */
void nilcone_census_free(NilconeCensusReport *r);

/**
 * Whether every tally matched; false for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
bool nilcone_census_passed(const NilconeCensusReport *r);

/**
 * Number of nilpotent points found.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
uint64_t nilcone_census_points(const NilconeCensusReport *r);

/**
 * Number of report lines.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
size_t nilcone_census_line_count(const NilconeCensusReport *r);

/**
 * Report as JSON; release with `nilcone_string_free`.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
char *nilcone_census_to_json(const NilconeCensusReport *r);

/**
 * Report as CSV; release with `nilcone_string_free`.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
char *nilcone_census_to_csv(const NilconeCensusReport *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NILCONE_H */
