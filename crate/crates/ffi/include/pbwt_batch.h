#ifndef PBWT_BATCH_H
#define PBWT_BATCH_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define PBWT_NO_START UINT32_MAX

// Reporting strategy for [`pbwt_query`].
typedef enum PbwtMode {
  PBWT_MODE_INTERVAL = 0,
  PBWT_MODE_ENDPOINTS = 1,
} PbwtMode;

typedef enum PbwtStatus {
  PBWT_STATUS_OK = 0,
  PBWT_STATUS_NULL_ARGUMENT = 1,
  PBWT_STATUS_INVALID_UTF8 = 2,
  PBWT_STATUS_FORMAT = 3,
  PBWT_STATUS_EMPTY_PANEL = 4,
  PBWT_STATUS_COLUMN_RANGE = 5,
  PBWT_STATUS_CORRUPTION = 6,
  PBWT_STATUS_STATE = 7,
  PBWT_STATUS_NO_MATCH = 8,
  PBWT_STATUS_MALFORMED_REQUEST = 9,
  PBWT_STATUS_MISMATCH = 10,
  PBWT_STATUS_IO = 11,
  PBWT_STATUS_BUFFER_TOO_SMALL = 12,
  PBWT_STATUS_INVALID_MODE = 13,
  PBWT_STATUS_PANIC = 14,
} PbwtStatus;

// A run-length compressed PBWT index.
typedef struct PbwtIndex PbwtIndex;

// A parsed haplotype panel.
typedef struct PbwtPanel PbwtPanel;

// Report entries from one query call.
typedef struct PbwtReport PbwtReport;

// `start_col` is `UINT32_MAX` when starts were not requested.
typedef struct PbwtReportEntry {
  uint32_t query_id;
  uint32_t end_col;
  uint32_t haplotype_id;
  uint32_t start_col;
} PbwtReportEntry;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. Valid until the
// next call on the same thread.
const char *pbwt_last_error_message(void);

// Parses a panel from NUL-terminated text, one haplotype per line.
//
// # Safety
// `text` must be a valid C string; `out` must be writable.
enum PbwtStatus pbwt_panel_parse(const char *text_ptr, struct PbwtPanel **out);

// # Safety
// `panel` must come from [`pbwt_panel_parse`] or be NULL.
void pbwt_panel_free(struct PbwtPanel *panel);

// # Safety
// Pointers must be valid; outputs may be NULL.
enum PbwtStatus pbwt_panel_dims(const struct PbwtPanel *panel, uint32_t *height, uint32_t *length);

// # Safety
// `panel` must be valid; `out` must be writable.
enum PbwtStatus pbwt_index_build(const struct PbwtPanel *panel, struct PbwtIndex **out);

// # Safety
// `path` must be a valid C string; `out` must be writable.
enum PbwtStatus pbwt_index_load(const char *path, struct PbwtIndex **out);

// # Safety
// `index` must be valid; `path` must be a valid C string.
enum PbwtStatus pbwt_index_save(const struct PbwtIndex *index, const char *path);

// # Safety
// `index` must come from this library or be NULL.
void pbwt_index_free(struct PbwtIndex *index);

// Height, length, alphabet size and total run count. Outputs may be NULL.
//
// # Safety
// `index` must be valid.
enum PbwtStatus pbwt_index_dims(const struct PbwtIndex *index,
                                uint32_t *height,
                                uint32_t *length,
                                uint8_t *sigma,
                                uint64_t *runs);

// Default batch size for `runs` runs over `height` haplotypes.
uint64_t pbwt_threshold(uint64_t runs, uint64_t height);

// Writes `a_column` (height entries) into `buf`.
//
// # Safety
// `index` must be valid; `buf` must hold `len` elements.
enum PbwtStatus pbwt_index_prefix_array(const struct PbwtIndex *index,
                                        size_t column,
                                        uint32_t *buf,
                                        size_t len);

// Writes the absolute divergence array at `column` (height entries, `-1`
// where no earlier mismatch exists) into `buf`.
//
// # Safety
// `index` must be valid; `buf` must hold `len` elements.
enum PbwtStatus pbwt_index_divergence_array(const struct PbwtIndex *index,
                                            size_t column,
                                            int64_t *buf,
                                            size_t len);

// Finds every SMEM of the queries (NUL-terminated text, one per line) and
// reports the matching haplotypes. `threshold` 0 selects the default batch
// size.
//
// # Safety
// `index` and `panel` must be valid; `queries` must be a valid C string;
// `out` must be writable.
enum PbwtStatus pbwt_query(const struct PbwtIndex *index,
                           const struct PbwtPanel *panel,
                           const char *queries,
                           uint32_t mode,
                           uint64_t threshold,
                           bool with_starts,
                           struct PbwtReport **out);

// Number of entries; 0 for NULL.
//
// # Safety
// `report` must be valid or NULL.
size_t pbwt_report_len(const struct PbwtReport *report);

// # Safety
// `report` must be valid; `out` must be writable.
enum PbwtStatus pbwt_report_get(const struct PbwtReport *report,
                                size_t i,
                                struct PbwtReportEntry *out);

// # Safety
// `report` must come from [`pbwt_query`] or be NULL.
void pbwt_report_free(struct PbwtReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PBWT_BATCH_H */
