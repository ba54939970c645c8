#ifndef AUTQ_H
#define AUTQ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AutqStatus {
  AUTQ_STATUS_OK = 0,
  AUTQ_STATUS_NULL_ARGUMENT = 1,
  AUTQ_STATUS_INVALID_UTF8 = 2,
  AUTQ_STATUS_PARSE = 3,
  AUTQ_STATUS_CONSTRUCTION = 4,
  AUTQ_STATUS_EVALUATION = 5,
  AUTQ_STATUS_PANIC = 6,
} AutqStatus;

/**
 * Generators and words built from a spec.
 */
typedef struct AutqBuild AutqBuild;

/**
 * A parsed sequence spec.
 */
typedef struct AutqSpec AutqSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; owned by the library, valid until the next call.
 */
const char *autq_last_error(void);

/**
 * # Safety
 * `s` must come from this library, or be null.
 */
void autq_string_free(char *s);

/**
 * Parses spec text; `*out` receives a handle.
 *
 * # Safety
 * `spec_text` must be a nul-terminated string and `out` a valid pointer.
 */
enum AutqStatus autq_spec_parse(const char *spec_text, struct AutqSpec **out);

/**
 * Number of targets in the spec.
 *
 * # Safety
 * `spec` must be a live handle.
 */
enum AutqStatus autq_spec_targets(const struct AutqSpec *spec, uintptr_t *out);

/**
 * # Safety
 * `spec` must come from [`autq_spec_parse`], or be null.
 */
void autq_spec_free(struct AutqSpec *spec);

/**
 * Runs the construction for the spec.
 *
 * # Safety
 * `spec` must be a live handle and `out` a valid pointer.
 */
enum AutqStatus autq_build(const struct AutqSpec *spec, struct AutqBuild **out);

/**
 * # Safety
 * `b` must come from [`autq_build`], or be null.
 */
void autq_build_free(struct AutqBuild *b);

/**
 * Evaluates `word` at the rational `point` ("p/q"); `*out` receives "p/q".
 * `tamed` nonzero uses the letters before the final taming conjugation.
 *
 * # Safety
 * Pointers must be valid; strings nul-terminated.
 */
enum AutqStatus autq_eval(const struct AutqBuild *b,
                          const char *word,
                          const char *point,
                          int32_t tamed,
                          char **out);

/**
 * Sampled check of every word against its target; `*verdict` is 1 when all agree.
 * `samples` and `seed` replace the spec's options.
 *
 * # Safety
 * Pointers must be valid.
 */
enum AutqStatus autq_verify(const struct AutqBuild *b,
                            uintptr_t samples,
                            uint64_t seed,
                            int32_t *verdict);

/**
 * The `n`-th universal word (`n >= 1`) for 2 or 8 letters, in compact text form.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum AutqStatus autq_word(uint32_t letters, uint64_t n, char **out);

/**
 * Length of the `n`-th universal word, as decimal text (it can exceed 64 bits).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum AutqStatus autq_word_length(uint32_t letters, uint64_t n, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AUTQ_H */
