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

#include "aerofl/fpga.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "aerofl/error.hpp"

namespace aerofl {

DeviceBudget zcu102() { return {"ZCU102", 274080, 2520, 912}; }

DeviceBudget load_device(const std::filesystem::path& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  DeviceBudget d;
  d.name = tree.get<std::string>("device.name", path.stem().string());
  auto capacity = [&](const char* key) {
    auto v = tree.get_optional<long>(std::string("device.") + key);
    if (!v || *v <= 0) {
      throw ConfigError(path.string() + ": device." + key +
                        " must be a positive integer");
    }
    return *v;
  };
  d.luts = capacity("luts");
  d.dsps = capacity("dsps");
  d.bram36 = capacity("bram36");
  return d;
}

FpgaProjection project(BitWidth bits, const DeviceBudget& device,
                       std::size_t param_count) {
  if (device.luts <= 0 || device.dsps <= 0) {
    throw std::invalid_argument("device capacities must be positive");
  }
  const long weight_bits = static_cast<long>(param_count) * bits_of(bits);
  FpgaProjection p;
  p.bits = bits;
  // Integer division is the floor for these nonnegative operands.
  p.luts = weight_bits / 6;
  p.dsps = weight_bits / 18;
  p.lut_percent = 100.0 * static_cast<double>(p.luts) / static_cast<double>(device.luts);
  p.dsp_percent = 100.0 * static_cast<double>(p.dsps) / static_cast<double>(device.dsps);
  p.latency_us = bits_of(bits) / 2.0;
  p.fits = p.luts <= device.luts && p.dsps <= device.dsps;
  p.spare_dsps = device.dsps - p.dsps;
  return p;
}

LinkSchedule lorawan_schedule(double payload_bytes, double link_bps,
                              double duty_cycle) {
  if (!(payload_bytes > 0.0) || !(link_bps > 0.0) || !(duty_cycle > 0.0) ||
      duty_cycle > 1.0) {
    throw std::invalid_argument(
        "lorawan_schedule: payload and link rate must be positive and the "
        "duty cycle in (0, 1]");
  }
  LinkSchedule s;
  s.airtime_s = payload_bytes * 8.0 / link_bps;
  s.min_interval_s = s.airtime_s / duty_cycle;
  return s;
}

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

}  // namespace

std::string format_fpga_table(const std::vector<FpgaProjection>& rows,
                              const DeviceBudget& device) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "Device: %s (%ld LUT | %ld DSP | %ld BRAM36)\n",
                device.name.c_str(), device.luts, device.dsps, device.bram36);
  out += line;
  std::snprintf(line, sizeof(line), "%-5s %8s %7s %8s %8s %7s %4s\n", "Cfg",
                "LUT", "%LUT", "DSP", "%DSP", "Lat.", "Fit");
  out += line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%-5s %8ld %7s %8ld %8s %7s %4s\n",
                  std::string(bit_width_label(r.bits)).c_str(), r.luts,
                  (fmt("%.1f", r.lut_percent) + "%").c_str(), r.dsps,
                  (fmt("%.1f", r.dsp_percent) + "%").c_str(),
                  (fmt("%g", r.latency_us) + "us").c_str(), r.fits ? "yes" : "no");
    out += line;
  }
  return out;
}

std::string format_fpga_csv(const std::vector<FpgaProjection>& rows) {
  std::string out = "config,bits,lut,lut_percent,dsp,dsp_percent,latency_us,fits,spare_dsp\n";
  for (const auto& r : rows) {
    out += std::string(bit_width_label(r.bits)) + "," + std::to_string(bits_of(r.bits)) +
           "," + std::to_string(r.luts) + "," + fmt("%.1f", r.lut_percent) + "," +
           std::to_string(r.dsps) + "," + fmt("%.1f", r.dsp_percent) + "," +
           fmt("%g", r.latency_us) + "," + (r.fits ? "1" : "0") + "," +
           std::to_string(r.spare_dsps) + "\n";
  }
  return out;
}

}  // namespace aerofl
