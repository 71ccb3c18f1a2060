#ifndef GLYPHFORGE_H
#define GLYPHFORGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GfStatus {
  GF_STATUS_OK = 0,
  GF_STATUS_NULL_POINTER = 1,
  GF_STATUS_INVALID_ARGUMENT = 2,
  GF_STATUS_INVALID_DIMS = 3,
  GF_STATUS_DIMS_MISMATCH = 4,
  GF_STATUS_INVALID_LABEL = 5,
  GF_STATUS_UNKNOWN_LABEL = 6,
  GF_STATUS_EMPTY_RASTER = 7,
  GF_STATUS_PARSE_ERROR = 8,
  GF_STATUS_INVARIANT_VIOLATION = 9,
  GF_STATUS_IO_ERROR = 10,
  GF_STATUS_TEACH_LIMIT = 11,
  GF_STATUS_BUFFER_TOO_SMALL = 12,
  GF_STATUS_PANIC = 99,
} GfStatus;

typedef enum GfDecisionKind {
  GF_DECISION_KIND_MATCH = 0,
  GF_DECISION_KIND_UNKNOWN = 1,
  GF_DECISION_KIND_EMPTY_KB = 2,
} GfDecisionKind;

// Opaque knowledge-base handle.
typedef struct GfKnowledgeBase GfKnowledgeBase;

// Best-scoring label of a classification. When `kind` is `EmptyKb` the
// score fields are zero and `q_den` is 1.
typedef struct GfDecision {
  enum GfDecisionKind kind;
  int64_t psi;
  uint64_t mu;
  int64_t q_num;
  uint64_t q_den;
  // Number of labels that received a score.
  size_t scored;
} GfDecision;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *gf_last_error(void);

// # Safety
// `s` must be NULL or a string returned by this library and not yet freed.
void gf_string_free(char *s);

// Creates an empty knowledge base.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum GfStatus gf_kb_new(size_t width, size_t height, struct GfKnowledgeBase **out);

// Loads a profile file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum GfStatus gf_kb_load(const char *path, struct GfKnowledgeBase **out);

// Writes the profile atomically.
//
// # Safety
// `kb` must be a live handle; `path` a NUL-terminated string.
enum GfStatus gf_kb_save(const struct GfKnowledgeBase *kb, const char *path);

// # Safety
// `kb` must be NULL or a handle from `gf_kb_new`/`gf_kb_load` not yet freed.
void gf_kb_free(struct GfKnowledgeBase *kb);

// # Safety
// `kb` must be a live handle; `width` and `height` must be writable.
enum GfStatus gf_kb_dims(const struct GfKnowledgeBase *kb, size_t *width, size_t *height);

// Number of labels, or 0 for a NULL handle.
//
// # Safety
// `kb` must be NULL or a live handle.
size_t gf_kb_label_count(const struct GfKnowledgeBase *kb);

// Teaches one pattern under `label`; writes the new teach count.
//
// # Safety
// `kb` must be a live handle, `label` a NUL-terminated string, `cells` must
// point to `len` readable bytes, and `teach_count` must be NULL or writable.
enum GfStatus gf_kb_teach(struct GfKnowledgeBase *kb,
                          const char *label,
                          const uint8_t *cells,
                          size_t len,
                          uint32_t *teach_count);

// # Safety
// `kb` must be a live handle and `label` a NUL-terminated string.
enum GfStatus gf_kb_forget(struct GfKnowledgeBase *kb, const char *label);

// Copies a label's weights (row-major) into `weights`, which must hold
// `width * height` values.
//
// # Safety
// `kb` must be a live handle, `label` a NUL-terminated string, `weights`
// must point to `len` writable values, and `teach_count` must be NULL or
// writable.
enum GfStatus gf_kb_weights(const struct GfKnowledgeBase *kb,
                            const char *label,
                            int32_t *weights,
                            size_t len,
                            uint32_t *teach_count);

// Classifies a pattern. `best_label` receives a newly allocated string
// (free with `gf_string_free`) or NULL when nothing was scorable; pass NULL
// to skip it.
//
// # Safety
// `kb` must be a live handle, `cells` must point to `len` readable bytes,
// `out` must be writable and `best_label` NULL or writable.
enum GfStatus gf_kb_classify(const struct GfKnowledgeBase *kb,
                             const uint8_t *cells,
                             size_t len,
                             int64_t threshold_num,
                             uint64_t threshold_den,
                             struct GfDecision *out,
                             char **best_label);

// Full decision as JSON, in the same shape the HTTP service returns.
//
// # Safety
// As for `gf_kb_classify`; `json` must be writable.
enum GfStatus gf_kb_classify_json(const struct GfKnowledgeBase *kb,
                                  const uint8_t *cells,
                                  size_t len,
                                  int64_t threshold_num,
                                  uint64_t threshold_den,
                                  char **json);

// Digitizes an 8-bit luminance raster (0 = ink) into `grid_width *
// grid_height` cells written to `out_cells`.
//
// # Safety
// `pixels` must point to `width * height` readable bytes and `out_cells` to
// `out_len` writable bytes.
enum GfStatus gf_digitize(const uint8_t *pixels,
                          size_t width,
                          size_t height,
                          size_t grid_width,
                          size_t grid_height,
                          uint8_t ink_threshold,
                          double coverage,
                          uint8_t *out_cells,
                          size_t out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GLYPHFORGE_H */
