#ifndef HOCHOPS_H
#define HOCHOPS_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum HochopsStatus {
  HOCHOPS_STATUS_OK = 0,
  HOCHOPS_STATUS_NULL_POINTER = 1,
  HOCHOPS_STATUS_INVALID_ARGUMENT = 2,
  HOCHOPS_STATUS_PARSE = 3,
  HOCHOPS_STATUS_FIELD_MISMATCH = 4,
  HOCHOPS_STATUS_SIZE = 5,
  HOCHOPS_STATUS_ARITHMETIC = 6,
  HOCHOPS_STATUS_IO = 7,
  HOCHOPS_STATUS_PANIC = 8,
} HochopsStatus;

/**
 * A Hochschild chain over one of the built-in algebras.
 */
typedef struct HochopsChain HochopsChain;

/**
 * A linear combination of finite-set maps.
 */
typedef struct HochopsMorphism HochopsMorphism;

/**
 * The outcome of a verification suite.
 */
typedef struct HochopsReport HochopsReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *hochops_last_error(void);

/**
 * Static version string.
 */
const char *hochops_version(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void hochops_string_free(char *s);

/**
 * Component `n` of an operation: `family` is one of `sh`, `lambda`, `l`,
 * `B`, `Bk` or `R`; `k` is ignored for `B`.
 *
 * # Safety
 * String arguments must be nul-terminated; `out` must be writable.
 */
enum HochopsStatus hochops_op(const char *family,
                              size_t k,
                              size_t n,
                              const char *field,
                              struct HochopsMorphism **out);

/**
 * `b ∘ a`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum HochopsStatus hochops_morphism_compose(const struct HochopsMorphism *a,
                                            const struct HochopsMorphism *b,
                                            struct HochopsMorphism **out);

/**
 * Number of terms, plus source and target arities. Any out pointer may be null.
 *
 * # Safety
 * `m` must be live.
 */
enum HochopsStatus hochops_morphism_shape(const struct HochopsMorphism *m,
                                          size_t *terms,
                                          size_t *source,
                                          size_t *target);

/**
 * # Safety
 * `m` must be live; free the string with [`hochops_string_free`].
 */
enum HochopsStatus hochops_morphism_to_json(const struct HochopsMorphism *m, char **out);

/**
 * # Safety
 * `m` must come from this library or be null; it is invalid afterwards.
 */
void hochops_morphism_free(struct HochopsMorphism *m);

/**
 * A chain from its JSON form `{"algebra": .., "terms": [{"word": [..], "coeff": ..}]}`.
 *
 * # Safety
 * String arguments must be nul-terminated; `out` must be writable.
 */
enum HochopsStatus hochops_chain_from_json(const char *json,
                                           const char *field,
                                           struct HochopsChain **out);

/**
 * A single word over a built-in algebra; `word` separates labels by
 * spaces, commas or `⊗`.
 *
 * # Safety
 * String arguments must be nul-terminated; `out` must be writable.
 */
enum HochopsStatus hochops_chain_word(const char *algebra,
                                      const char *word,
                                      const char *field,
                                      struct HochopsChain **out);

/**
 * Applies `sh:<k>`, `lambda:<k>`, `Bk:<k>` or `B`, truncated at the
 * chain's longest word.
 *
 * # Safety
 * `chain` must be live; `out` must be writable.
 */
enum HochopsStatus hochops_act(const char *op,
                               const struct HochopsChain *chain,
                               struct HochopsChain **out);

/**
 * # Safety
 * `c` must be live; `out` must be writable.
 */
enum HochopsStatus hochops_chain_is_zero(const struct HochopsChain *c, bool *out);

/**
 * # Safety
 * `c` must be live; free the string with [`hochops_string_free`].
 */
enum HochopsStatus hochops_chain_to_json(const struct HochopsChain *c, char **out);

/**
 * # Safety
 * `c` must come from this library or be null; it is invalid afterwards.
 */
void hochops_chain_free(struct HochopsChain *c);

/**
 * Homology table of the truncated natural-operations complex as JSON.
 *
 * # Safety
 * `out` must be writable; free the string with [`hochops_string_free`].
 */
enum HochopsStatus hochops_homology_json(size_t truncation,
                                         int64_t lmin,
                                         int64_t lmax,
                                         const char *field,
                                         char **out);

/**
 * Runs a verification suite. `bounds` is null or a JSON object overriding
 * any of `max_n`, `max_k`, `K`, `formal_truncation`, `max_signature`, `field`.
 *
 * # Safety
 * String arguments must be nul-terminated or null where allowed; `out` must be writable.
 */
enum HochopsStatus hochops_verify(const char *suite,
                                  const char *bounds,
                                  struct HochopsReport **out);

/**
 * Whether every check passed, and how many failed. Either out pointer may be null.
 *
 * # Safety
 * `r` must be live.
 */
enum HochopsStatus hochops_report_summary(const struct HochopsReport *r,
                                          bool *passed,
                                          size_t *failures);

/**
 * # Safety
 * `r` must be live; free the string with [`hochops_string_free`].
 */
enum HochopsStatus hochops_report_to_json(const struct HochopsReport *r, char **out);

/**
 * # Safety
 * `r` must come from this library or be null; it is invalid afterwards.
 */
void hochops_report_free(struct HochopsReport *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOCHOPS_H */
