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

// Analytical FPGA resource projection (hls4ml-style linear scaling) and
// LoRaWAN airtime arithmetic for one FL round's upload.
//
//   LUT = floor(|theta| * b / 6)
//   DSP = floor(|theta| * b / 18)
//   latency = b / 2 us at 500 MHz

#ifndef AEROFL_FPGA_HPP_
#define AEROFL_FPGA_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "aerofl/model.hpp"
#include "aerofl/quantizer.hpp"

namespace aerofl {

struct DeviceBudget {
  std::string name;
  long luts = 0;
  long dsps = 0;
  long bram36 = 0;
};

// Xilinx Zynq UltraScale+ ZCU102 (xczu9eg-ffvb1156-2-e).
DeviceBudget zcu102();

// Reads [device] name/luts/dsps/bram36 from an INI file. Throws
// ConfigError on missing or nonpositive capacities.
DeviceBudget load_device(const std::filesystem::path& path);

struct FpgaProjection {
  BitWidth bits = BitWidth::kFp32;
  long luts = 0;
  double lut_percent = 0.0;
  long dsps = 0;
  double dsp_percent = 0.0;
  double latency_us = 0.0;
  bool fits = false;
  long spare_dsps = 0;  // negative when over budget
};

FpgaProjection project(BitWidth bits, const DeviceBudget& device,
                       std::size_t param_count = kExpectedParamCount);

struct LinkSchedule {
  double airtime_s = 0.0;
  double min_interval_s = 0.0;
};

// airtime = bytes * 8 / bps; interval = airtime / duty_cycle. Throws
// std::invalid_argument on nonpositive inputs or duty_cycle > 1.
LinkSchedule lorawan_schedule(double payload_bytes, double link_bps = 5000.0,
                              double duty_cycle = 0.01);

// Table with columns Cfg, LUT, %LUT, DSP, %DSP, Lat., Fit.
std::string format_fpga_table(const std::vector<FpgaProjection>& rows,
                              const DeviceBudget& device);
std::string format_fpga_csv(const std::vector<FpgaProjection>& rows);

}  // namespace aerofl

#endif  // AEROFL_FPGA_HPP_
