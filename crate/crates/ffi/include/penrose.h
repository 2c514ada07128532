#ifndef PENROSE_H
#define PENROSE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PenroseStatus {
  PENROSE_STATUS_OK = 0,
  PENROSE_STATUS_NULL_POINTER = 1,
  PENROSE_STATUS_INVALID_INPUT = 2,
  PENROSE_STATUS_CONFORMABILITY = 3,
  PENROSE_STATUS_NUMERICAL = 4,
  PENROSE_STATUS_GENERATION_FAILURE = 5,
  PENROSE_STATUS_BUFFER_TOO_SMALL = 6,
  PENROSE_STATUS_PANIC = 7,
} PenroseStatus;

/**
 * Opaque operator handle.
 */
typedef struct PenroseOperator PenroseOperator;

typedef struct PenrosePinvSummary {
  /**
   * Rank of the flattening.
   */
  size_t rank;
  double largest_singular_value;
  double cutoff;
  /**
   * Residuals of TXT = T, XTX = X, (TX)* = TX, (XT)* = XT.
   */
  double penrose_residuals[4];
  bool boundary_flag;
} PenrosePinvSummary;

typedef struct PenroseCertificate {
  double tol;
  double residual_rol;
  bool rol_holds;
  double thm21_residuals[3];
  bool thm21_holds[3];
  double thm22_residuals[3];
  bool thm22_holds[3];
  /**
   * Ran(T*TS) in Ran(S), then Ran(SS*T*) in Ran(T*).
   */
  double greville_residuals[2];
  bool greville_holds[2];
  bool consistent;
  bool boundary_flag;
} PenroseCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *penrose_version(void);

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *penrose_last_error_message(void);

/**
 * Builds an operator from `signature[0..sig_len]` block sizes and
 * `data[0..data_len]` coefficients.
 *
 * # Safety
 * `signature` and `data` must be readable for the given lengths and `out`
 * must be writable.
 */
enum PenroseStatus penrose_operator_new(const size_t *signature,
                                        size_t sig_len,
                                        size_t rows,
                                        size_t cols,
                                        const double *data,
                                        size_t data_len,
                                        struct PenroseOperator **out);

/**
 * Parses an operator file held in a NUL-terminated string.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` writable.
 */
enum PenroseStatus penrose_operator_from_json(const char *json, struct PenroseOperator **out);

/**
 * Renders an operator in the operator-file format. Release the string
 * with `penrose_string_free`.
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum PenroseStatus penrose_operator_to_json(const struct PenroseOperator *op, char **out);

/**
 * # Safety
 * `op` must be NULL or a handle not yet freed.
 */
void penrose_operator_free(struct PenroseOperator *op);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void penrose_string_free(char *s);

/**
 * Module rows; 0 for NULL.
 *
 * # Safety
 * `op` must be NULL or a live handle.
 */
size_t penrose_operator_rows(const struct PenroseOperator *op);

/**
 * Module columns; 0 for NULL.
 *
 * # Safety
 * `op` must be NULL or a live handle.
 */
size_t penrose_operator_cols(const struct PenroseOperator *op);

/**
 * Copies the coefficients into `buf`. `needed` (if not NULL) receives the
 * required number of doubles; a short buffer yields `BufferTooSmall`.
 *
 * # Safety
 * `op` must be a live handle, `buf` writable for `len` doubles.
 */
enum PenroseStatus penrose_operator_data(const struct PenroseOperator *op,
                                         double *buf,
                                         size_t len,
                                         size_t *needed);

/**
 * Copies the flattened complex matrix, row-major with interleaved
 * `re, im`, into `buf`; `flat_rows` and `flat_cols` receive its shape.
 *
 * # Safety
 * `op` must be a live handle, `buf` writable for `len` doubles and the
 * shape pointers NULL or writable.
 */
enum PenroseStatus penrose_operator_flatten(const struct PenroseOperator *op,
                                            double *buf,
                                            size_t len,
                                            size_t *flat_rows,
                                            size_t *flat_cols);

/**
 * Moore-Penrose inverse. `rank_tol <= 0` selects the automatic cutoff,
 * otherwise singular values above `rank_tol` are kept. `summary` and
 * `out_pinv` may each be NULL when not wanted.
 *
 * # Safety
 * `op` must be a live handle; the out pointers NULL or writable.
 */
enum PenroseStatus penrose_pinv(const struct PenroseOperator *op,
                                double rank_tol,
                                struct PenrosePinvSummary *summary,
                                struct PenroseOperator **out_pinv);

/**
 * Reverse-order-law certificate for the pair `(T, S)`.
 *
 * # Safety
 * `t` and `s` must be live handles and `out` writable.
 */
enum PenroseStatus penrose_check(const struct PenroseOperator *t,
                                 const struct PenroseOperator *s,
                                 double tol,
                                 struct PenroseCertificate *out);

/**
 * The same certificate as JSON. Release with `penrose_string_free`.
 *
 * # Safety
 * `t` and `s` must be live handles and `out` writable.
 */
enum PenroseStatus penrose_check_json(const struct PenroseOperator *t,
                                      const struct PenroseOperator *s,
                                      double tol,
                                      char **out);

/**
 * Seeded random pair of the named kind (`generic`, `rol_holds`,
 * `thm21_only`, `thm22_only`, `s_adjoint`) with `T` of shape `p x m` and
 * `S` of shape `m x k`.
 *
 * # Safety
 * `kind` must be a NUL-terminated string, `signature` readable for
 * `sig_len` values and both out pointers writable.
 */
enum PenroseStatus penrose_gen_instance(const char *kind,
                                        size_t p,
                                        size_t m,
                                        size_t k,
                                        const size_t *signature,
                                        size_t sig_len,
                                        uint64_t seed,
                                        struct PenroseOperator **out_t,
                                        struct PenroseOperator **out_s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PENROSE_H */
