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

// Run configuration: an INI file with [data], [experiment] and [run]
// sections, plus command-line overrides applied on top.

#ifndef AEROFL_CONFIG_HPP_
#define AEROFL_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aerofl/cmapss.hpp"
#include "aerofl/fed_sim.hpp"
#include "aerofl/partition.hpp"
#include "aerofl/quantizer.hpp"

namespace aerofl {

inline constexpr const char* kDataRootEnv = "CMAPSS_ROOT";

struct RunConfig {
  // [data]
  std::filesystem::path data_root;  // empty: fall back to $CMAPSS_ROOT
  std::vector<Subset> subsets = {Subset::kFD001, Subset::kFD002};

  // [experiment]
  std::vector<BitWidth> bits = {kAllBitWidths.begin(), kAllBitWidths.end()};
  std::vector<std::uint64_t> seeds = {std::begin(kDefaultSeeds), std::end(kDefaultSeeds)};
  int rounds = 20;
  int local_epochs = 2;
  int batch_size = 32;
  double learning_rate = 1e-3;
  int clients = 10;
  bool noniid = true;
  bool iid = true;
  std::vector<Subset> iid_subsets = {Subset::kFD001};
  std::vector<BitWidth> iid_bits = {BitWidth::kFp32, BitWidth::kInt4};

  // [run]
  std::filesystem::path output = "results";
  int workers = 1;
  int client_threads = 1;

  void validate() const;  // throws ConfigError
};

// Every key the file may contain, "section.key" -> value as written.
using ConfigEcho = std::map<std::string, std::string>;

// Unknown sections or keys, and malformed values, throw ConfigError naming
// the offending key.
RunConfig parse_run_config(const std::string& ini_text);
RunConfig load_run_config(const std::filesystem::path& path);

// Canonical key/value view of a config, as would be written to an INI file.
ConfigEcho echo_config(const RunConfig& config);
std::string to_ini(const RunConfig& config);

// Command line > $CMAPSS_ROOT > [data] root. Throws ConfigError when none is set.
std::filesystem::path resolve_data_root(const RunConfig& config,
                                        const std::optional<std::string>& cli_root);

ExperimentConfig cell_config(const RunConfig& run, Subset subset, BitWidth bits,
                             PartitionMode mode, std::uint64_t seed);

}  // namespace aerofl

#endif  // AEROFL_CONFIG_HPP_
