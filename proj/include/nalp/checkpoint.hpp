// Copyright 2026 The NaLP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NALP_CHECKPOINT_HPP_
#define NALP_CHECKPOINT_HPP_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "nalp/data.hpp"
#include "nalp/model.hpp"

namespace nalp {

// Binary layout:
//   "NALP1"
//   u32 manifest length, manifest as "key=value\n" lines
//   u32 array count, then per array: u32 name length, name, u64 rows,
//       u64 cols, rows*cols little-endian float64
//   u64 role count, strings; u64 value count, strings
//       (each string: u32 byte length, bytes)
inline constexpr char kCheckpointMagic[] = "NALP1";

struct Checkpoint {
  Model model;
  Vocabulary vocab;
  std::map<std::string, std::string> manifest;
};

void SaveCheckpoint(std::ostream& out, const Model& model, const Vocabulary& vocab);
void SaveCheckpoint(const std::filesystem::path& path, const Model& model,
                    const Vocabulary& vocab);

// Throws FormatError on a bad magic string or truncation and DimensionError
// when the manifest disagrees with the stored arrays or string tables.
Checkpoint LoadCheckpoint(std::istream& in);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

// Throws DimensionError when |R| / |V| differ, DataError when the strings do.
void CheckVocabularyMatches(const Checkpoint& checkpoint, const Vocabulary& vocab);

}  // namespace nalp

#endif  // NALP_CHECKPOINT_HPP_
