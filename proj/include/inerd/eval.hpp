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

// Exact-match span scoring pooled over sentences (micro averaging).

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "inerd/encoding.hpp"

namespace inerd {

struct Tally {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  Tally& operator+=(const Tally& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const Tally&, const Tally&) = default;
};

enum class MatchMode {
  kSurface,   // (type, content tokens); default
  kPosition,  // (type, span) after position recovery
};

namespace detail {
template <typename Key>
Tally multiset_match(std::vector<Key> gold, std::vector<Key> pred) {
  std::map<Key, std::size_t> counts;
  for (auto& k : gold) ++counts[k];
  Tally t;
  for (auto& k : pred) {
    auto it = counts.find(k);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++t.tp;
    }
  }
  t.fp = pred.size() - t.tp;
  t.fn = gold.size() - t.tp;
  return t;
}
}  // namespace detail

// tp is the size of the multiset intersection.
inline Tally match_entities(std::span<const SurfaceEntity> gold,
                            std::span<const SurfaceEntity> pred) {
  return detail::multiset_match(
      std::vector<SurfaceEntity>(gold.begin(), gold.end()),
      std::vector<SurfaceEntity>(pred.begin(), pred.end()));
}

inline Tally match_entities_by_position(std::span<const Entity> gold,
                                        std::span<const Entity> pred) {
  return detail::multiset_match(std::vector<Entity>(gold.begin(), gold.end()),
                                std::vector<Entity>(pred.begin(), pred.end()));
}

inline Tally match_entities(std::span<const Entity> gold,
                            std::span<const Entity> pred,
                            std::span<const TokenId> sentence,
                            MatchMode mode = MatchMode::kSurface) {
  if (mode == MatchMode::kPosition) return match_entities_by_position(gold, pred);
  const auto g = surfaces_of(gold, sentence);
  const auto p = surfaces_of(pred, sentence);
  return match_entities(g, p);
}

struct EvalReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double micro_f1 = 0.0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["tp"] = tp;
    j["fp"] = fp;
    j["fn"] = fn;
    j["precision"] = precision;
    j["recall"] = recall;
    j["micro_f1"] = micro_f1;
    return j;
  }

  std::string summary() const {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "tp=%zu fp=%zu fn=%zu precision=%.4f recall=%.4f "
                  "micro_f1=%.4f",
                  tp, fp, fn, precision, recall, micro_f1);
    return buf;
  }
};

// 0/0 is taken as 0 for precision, recall and F1.
inline EvalReport report_from(const Tally& total) {
  EvalReport r;
  r.tp = total.tp;
  r.fp = total.fp;
  r.fn = total.fn;
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  r.precision = ratio(total.tp, total.tp + total.fp);
  r.recall = ratio(total.tp, total.tp + total.fn);
  r.micro_f1 = (r.precision + r.recall) == 0.0
                   ? 0.0
                   : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

// Tallies are summed across sentences before any ratio is taken.
inline EvalReport micro_f1(std::span<const Tally> per_sentence) {
  Tally total;
  for (const auto& t : per_sentence) total += t;
  return report_from(total);
}

// Diagnostic per-type breakdown (surface matching).
inline std::map<std::string, Tally> per_type_tallies(
    std::span<const SurfaceEntity> gold, std::span<const SurfaceEntity> pred) {
  std::map<std::string, std::vector<SurfaceEntity>> g, p;
  for (const auto& e : gold) g[e.type].push_back(e);
  for (const auto& e : pred) p[e.type].push_back(e);
  std::map<std::string, Tally> out;
  for (auto& [type, list] : g) out[type];
  for (auto& [type, list] : p) out[type];
  for (auto& [type, tally] : out) {
    tally = detail::multiset_match(g[type], p[type]);
  }
  return out;
}

}  // namespace inerd
