/* C boundary of layoutkit.
 *
 * Every entry point takes and returns only opaque handles, integers, byte
 * regions (pointer + byte count) and UTF-8 text (pointer + byte count).
 * All functions return an lk_status code; the message of the most recent
 * failure on the calling thread is available from lk_last_error.
 *
 * Hand-off protocol: lk_buffer_count / lk_buffer_name / lk_buffer_nbytes
 * report what to allocate, the caller allocates, then lk_fill_buffer copies
 * each buffer into caller-owned memory. The library never allocates memory
 * that the caller must free.
 *
 * Text outputs follow one convention: pass out == NULL to query the length
 * (written to *out_len); otherwise capacity must be at least that length,
 * else LK_ERR_TRUNCATED is returned and nothing is written. Text is not
 * NUL-terminated.
 */
#ifndef LAYOUTKIT_C_API_H
#define LAYOUTKIT_C_API_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef uint64_t lk_handle;

enum {
  LK_OK = 0,
  LK_ERR_INVALID_HANDLE = 1,
  LK_ERR_FORM = 2,
  LK_ERR_BUILDER = 3,
  LK_ERR_INVALID_STATE = 4,
  LK_ERR_SIZE_MISMATCH = 5,
  LK_ERR_ARGUMENT = 6,
  LK_ERR_TRUNCATED = 7,
  LK_ERR_INTERNAL = 8
};

/* Construction. */
int32_t lk_create_from_form(const char* form_json, size_t form_len, lk_handle* out_handle);
int32_t lk_create_dynamic(lk_handle* out_handle);

/* Filling a schema-built handle. `node` is the pre-order node number, i.e. N
 * in the form_key "nodeN". */
int32_t lk_append_integer(lk_handle handle, uint64_t node, int64_t value);
int32_t lk_extend(lk_handle handle, uint64_t node, const void* elements, size_t nbytes);
int32_t lk_begin_list(lk_handle handle, uint64_t node);
int32_t lk_end_list(lk_handle handle, uint64_t node);
int32_t lk_append_valid(lk_handle handle, uint64_t node);
int32_t lk_append_missing(lk_handle handle, uint64_t node);

/* Filling a dynamic handle: one value per call, as JSON text. */
int32_t lk_dynamic_append_json(lk_handle handle, const char* json, size_t json_len);

/* Inspection and hand-off. */
int32_t lk_is_valid(lk_handle handle, char* message, size_t capacity, size_t* message_len);
int32_t lk_length(lk_handle handle, uint64_t* out_length);
int32_t lk_form(lk_handle handle, char* out, size_t capacity, size_t* out_len);
int32_t lk_buffer_count(lk_handle handle, uint64_t* out_count);
int32_t lk_buffer_name(lk_handle handle, uint64_t index, char* out, size_t capacity, size_t* out_len);
int32_t lk_buffer_nbytes(lk_handle handle, uint64_t index, uint64_t* out_nbytes);
int32_t lk_fill_buffer(lk_handle handle, uint64_t index, void* destination, size_t destination_nbytes);

/* Lifetime. Releasing an already released handle is a no-op. */
int32_t lk_release(lk_handle handle);

int32_t lk_last_error(char* out, size_t capacity, size_t* out_len);

#ifdef __cplusplus
}
#endif

#endif /* LAYOUTKIT_C_API_H */
