// Copyright 2026 The inerd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* Flat C boundary over the grammar mask, for foreign-language adapters.
 *
 * Protocol per generated sequence:
 *   inerd_open_session   -> handle
 *   loop: inerd_process_scores (mask only; state unchanged)
 *         inerd_commit_token   (advance with the token actually chosen)
 *   inerd_close_session
 *
 * Every function returns 0 on success or an inerd::ErrorCode value. The
 * message of the most recent failure on the calling thread is available from
 * inerd_last_error(). A handle must not be used from two threads at once;
 * distinct handles are independent. */

#ifndef INERD_C_API_H_
#define INERD_C_API_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef int64_t inerd_session;

/* Sentence ids index into the vocabulary file (see vocab.hpp for the format).
 * Labels are tokenized on whitespace against that vocabulary. Compiled
 * grammars are cached per (vocab_path, labels) and shared between sessions. */
int inerd_open_session(const int32_t* sentence, size_t sentence_len,
                       const char* const* labels, size_t label_count,
                       const char* vocab_path, inerd_session* out);

/* Writes the masked copy of scores[0..n) to out[0..n); in-place (out ==
 * scores) is allowed. n must equal the vocabulary size. */
int inerd_process_scores(inerd_session session, const float* scores, size_t n,
                         float* out);

/* Allowed token ids for the current step, ascending. Writes at most
 * capacity ids and always stores the full count in *count. */
int inerd_allowed_tokens(inerd_session session, int32_t* ids, size_t capacity,
                         size_t* count);

int inerd_commit_token(inerd_session session, int32_t token, int* is_terminal);

int inerd_vocab_size(inerd_session session, size_t* size);

int inerd_close_session(inerd_session session);

const char* inerd_last_error(void);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* INERD_C_API_H_ */
