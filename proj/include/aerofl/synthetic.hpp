// Copyright 2026 The AeroFL Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

// Synthetic run-to-failure fleets in the C-MAPSS file format. Used for
// smoke tests and demos when the NASA files are not available; the numbers
// are not meant to resemble the real benchmark beyond shape and scale.

#ifndef AEROFL_SYNTHETIC_HPP_
#define AEROFL_SYNTHETIC_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include "aerofl/cmapss.hpp"

namespace aerofl {

struct SyntheticSpec {
  int train_engines = 100;
  int test_engines = 100;
  int min_life = 128;
  int max_life = 362;
  int operating_conditions = 1;  // 1 (FD001-like) or 6 (FD002-like)
  std::uint64_t seed = 7;
};

struct SyntheticFiles {
  std::string train;
  std::string test;
  std::string rul;
};

SyntheticFiles generate_synthetic_cmapss(const SyntheticSpec& spec);

// Writes train_/test_/RUL_<subset>.txt under root.
void write_synthetic_cmapss(const std::filesystem::path& root, Subset subset,
                            const SyntheticSpec& spec);

Dataset synthetic_dataset(Subset subset, const SyntheticSpec& spec);

}  // namespace aerofl

#endif  // AEROFL_SYNTHETIC_HPP_
