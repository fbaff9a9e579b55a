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

#pragma once

#include "inerd/data.hpp"
#include "inerd/decode.hpp"
#include "inerd/encoding.hpp"
#include "inerd/error.hpp"
#include "inerd/eval.hpp"
#include "inerd/grammar.hpp"
#include "inerd/oracle.hpp"
#include "inerd/random.hpp"
#include "inerd/vocab.hpp"
