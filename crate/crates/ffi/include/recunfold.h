#ifndef RECUNFOLD_H
#define RECUNFOLD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 `mode` value for plain SLD evaluation.
 */
#define RU_MODE_NAIVE 0

/*
 `mode` value for unfolding followed by meta-interpretation.
 */
#define RU_MODE_UNFOLD 1

/*
 Status codes. The first five match the command-line exit codes.
 */
typedef enum RuStatus {
  RU_STATUS_OK = 0,
  /*
   The query has no answer.
   */
  RU_STATUS_FAILURE = 1,
  /*
   A full round-robin cycle made no progress.
   */
  RU_STATUS_NO_PROGRESS = 2,
  /*
   Parse errors, unknown programs or schemes, bad inputs.
   */
  RU_STATUS_CONFIG = 3,
  /*
   A step or round limit was hit.
   */
  RU_STATUS_RESOURCE_LIMIT = 4,
  /*
   A null pointer, invalid UTF-8 or an unknown mode was passed.
   */
  RU_STATUS_INVALID_ARGUMENT = 5,
  /*
   The engine panicked.
   */
  RU_STATUS_INTERNAL = 6,
} RuStatus;

/*
 A loaded program.
 */
typedef struct RuProgram RuProgram;

/*
 The answer and statistics of one query.
 */
typedef struct RuResult RuResult;

typedef struct RuStats {
  uint64_t rule_applications;
  uint64_t recursive_applications;
  uint64_t rounds;
  uint64_t unfold_steps;
  uint64_t deck_size;
  double unfold_ms;
  double interp_ms;
  double total_ms;
} RuStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. Valid until
 the next call into the library on this thread.
 */
const char *ru_last_error(void);

/*
 Loads one of the shipped programs: "sum", "fib", "gcd", "rev", "sort".

 # Safety
 `name` must be a nul-terminated string and `out` a valid pointer.
 */
enum RuStatus ru_program_builtin(const char *name, struct RuProgram **out);

/*
 Parses a program from rule-file text.

 # Safety
 `text` must be a nul-terminated string and `out` a valid pointer.
 */
enum RuStatus ru_program_parse(const char *text, struct RuProgram **out);

/*
 # Safety
 `program` must come from this library and not be freed twice.
 */
void ru_program_free(struct RuProgram *program);

/*
 Runs the program's entry predicate on `nargs` inputs (integers may be
 written `2^k`, `2^k+1`, `2^k-1`); the remaining arguments are the
 outputs `R` or `R1`, `R2`, .... A result is stored in `out` for
 [`RuStatus::Ok`] and [`RuStatus::Failure`].

 # Safety
 `program` must be a live handle, `args` must point to `nargs`
 nul-terminated strings, and `out` must be a valid pointer.
 */
enum RuStatus ru_run(const struct RuProgram *program,
                     const char *const *args,
                     size_t nargs,
                     int32_t mode,
                     struct RuResult **out);

/*
 Runs a full goal such as `s(10,Total)`.

 # Safety
 As for [`ru_run`], with `query` a nul-terminated string.
 */
enum RuStatus ru_run_query(const struct RuProgram *program,
                           const char *query,
                           int32_t mode,
                           struct RuResult **out);

/*
 # Safety
 `result` must be a live handle.
 */
bool ru_result_solved(const struct RuResult *result);

/*
 The answer as text, one `Name = value` line per variable, or `false`.
 Null when `result` is null.

 # Safety
 `result` must be a live handle.
 */
char *ru_result_answer(const struct RuResult *result);

/*
 The value of one query variable, or null if there is none.

 # Safety
 `result` must be a live handle and `name` a nul-terminated string.
 */
char *ru_result_value(const struct RuResult *result, const char *name);

/*
 # Safety
 `result` must be a live handle and `out` a valid pointer.
 */
enum RuStatus ru_result_stats(const struct RuResult *result, struct RuStats *out);

/*
 # Safety
 `result` must come from this library and not be freed twice.
 */
void ru_result_free(struct RuResult *result);

/*
 Unfolds every deck of the program against the query built from `args`
 and stores the decks as rule-file text in `out`, most unfolded rule
 first.

 # Safety
 As for [`ru_run`]; the string stored in `out` is freed with
 [`ru_string_free`].
 */
enum RuStatus ru_unfold_dump(const struct RuProgram *program,
                             const char *const *args,
                             size_t nargs,
                             char **out);

/*
 # Safety
 `s` must be a string returned by this library, or null.
 */
void ru_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RECUNFOLD_H */
