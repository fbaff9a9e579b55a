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

#include "inerd/c_api.h"

#include <algorithm>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "inerd/grammar.hpp"
#include "inerd/vocab.hpp"

namespace {

using inerd::Error;
using inerd::ErrorCode;

struct Grammar {
  inerd::Vocabulary vocab;
  inerd::EntityTypeSet types;
};

struct Session {
  std::shared_ptr<const Grammar> grammar;
  inerd::DecoderState state;
};

class Registry {
 public:
  std::shared_ptr<const Grammar> grammar(const std::string& vocab_path,
                                         std::vector<std::string> labels) {
    auto key = std::make_pair(vocab_path, labels);
    {
      std::lock_guard lock(mu_);
      if (auto it = grammars_.find(key); it != grammars_.end()) {
        if (auto live = it->second.lock()) return live;
      }
    }
    auto vocab = inerd::load_vocabulary(vocab_path);
    inerd::WhitespaceTokenizer tokenizer(vocab);
    auto types = inerd::compile_types(labels, tokenizer, vocab);
    auto built = std::make_shared<const Grammar>(
        Grammar{std::move(vocab), std::move(types)});
    std::lock_guard lock(mu_);
    grammars_[std::move(key)] = built;
    return built;
  }

  inerd_session add(Session session) {
    std::lock_guard lock(mu_);
    const inerd_session id = next_id_++;
    sessions_.emplace(id, std::make_shared<Session>(std::move(session)));
    return id;
  }

  std::shared_ptr<Session> find(inerd_session id) {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) {
      throw Error(ErrorCode::kClosedHandle,
                  "no open session " + std::to_string(id));
    }
    return it->second;
  }

  void remove(inerd_session id) {
    std::lock_guard lock(mu_);
    if (sessions_.erase(id) == 0) {
      throw Error(ErrorCode::kClosedHandle,
                  "no open session " + std::to_string(id));
    }
  }

 private:
  std::mutex mu_;
  inerd_session next_id_ = 1;
  std::map<inerd_session, std::shared_ptr<Session>> sessions_;
  std::map<std::pair<std::string, std::vector<std::string>>,
           std::weak_ptr<const Grammar>>
      grammars_;
};

Registry& registry() {
  static Registry r;
  return r;
}

thread_local std::string last_error;

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return 0;
  } catch (const Error& e) {
    last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return static_cast<int>(ErrorCode::kInvalidArgument);
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

}  // namespace

extern "C" {

int inerd_open_session(const int32_t* sentence, size_t sentence_len,
                       const char* const* labels, size_t label_count,
                       const char* vocab_path, inerd_session* out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    require(vocab_path != nullptr, "null vocabulary path");
    require(sentence != nullptr || sentence_len == 0, "null sentence");
    require(labels != nullptr || label_count == 0, "null label array");
    std::vector<std::string> names;
    for (size_t i = 0; i < label_count; ++i) {
      require(labels[i] != nullptr, "null label");
      names.emplace_back(labels[i]);
    }
    auto grammar = registry().grammar(vocab_path, std::move(names));
    inerd::TokenSeq ids(sentence, sentence + sentence_len);
    auto state = inerd::new_session(std::move(ids), grammar->types, grammar->vocab);
    *out = registry().add(Session{std::move(grammar), std::move(state)});
  });
}

int inerd_process_scores(inerd_session session, const float* scores, size_t n,
                         float* out) {
  return guarded([&] {
    auto s = registry().find(session);
    require(scores != nullptr && out != nullptr, "null score buffer");
    if (n != s->grammar->vocab.size()) {
      throw Error(ErrorCode::kLengthMismatch,
                  "got " + std::to_string(n) + " scores for a vocabulary of " +
                      std::to_string(s->grammar->vocab.size()));
    }
    const auto allowed =
        inerd::allowed_tokens(s->state, s->grammar->types, s->grammar->vocab);
    if (out != scores) std::memmove(out, scores, n * sizeof(float));
    inerd::apply_mask_in_place(std::span<float>(out, n), allowed);
  });
}

int inerd_allowed_tokens(inerd_session session, int32_t* ids, size_t capacity,
                         size_t* count) {
  return guarded([&] {
    auto s = registry().find(session);
    require(count != nullptr, "null count");
    require(ids != nullptr || capacity == 0, "null id buffer");
    const auto allowed =
        inerd::allowed_tokens(s->state, s->grammar->types, s->grammar->vocab);
    *count = allowed.size();
    std::copy_n(allowed.ids().begin(), std::min(capacity, allowed.size()), ids);
  });
}

int inerd_commit_token(inerd_session session, int32_t token, int* is_terminal) {
  return guarded([&] {
    auto s = registry().find(session);
    s->state = inerd::advance(s->state, token, s->grammar->types, s->grammar->vocab);
    if (is_terminal) *is_terminal = inerd::is_terminal(s->state) ? 1 : 0;
  });
}

int inerd_vocab_size(inerd_session session, size_t* size) {
  return guarded([&] {
    auto s = registry().find(session);
    require(size != nullptr, "null size");
    *size = s->grammar->vocab.size();
  });
}

int inerd_close_session(inerd_session session) {
  return guarded([&] { registry().remove(session); });
}

const char* inerd_last_error(void) { return last_error.c_str(); }

}  // extern "C"
