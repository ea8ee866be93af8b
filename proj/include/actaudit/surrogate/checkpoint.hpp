//
// Copyright 2026 The ActAudit Authors
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
//

#ifndef ACTAUDIT_SURROGATE_CHECKPOINT_HPP
#define ACTAUDIT_SURROGATE_CHECKPOINT_HPP

#include <filesystem>

#include "actaudit/surrogate/train.hpp"

namespace actaudit::surrogate {

// Checkpoint file: a "ckpt/1" header line carrying the step, architecture
// shape, seeds, instruction vocabulary and tokenizer bounds, followed by
// one line with the flat parameter array. Doubles round-trip exactly.
void write_checkpoint(const std::filesystem::path& path,
                      const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace actaudit::surrogate

#endif  // ACTAUDIT_SURROGATE_CHECKPOINT_HPP
