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

// Static SVG figures from per-round results. Each file embeds the plotted
// numbers as CSV inside an XML comment.

#ifndef AEROFL_PLOT_HPP_
#define AEROFL_PLOT_HPP_

#include <map>
#include <string>
#include <vector>

#include "aerofl/results.hpp"

namespace aerofl {

// Mean line with a +/- one std band, one point per round.
struct BandSeries {
  std::string label;
  std::string color;
  std::vector<double> mean;
  std::vector<double> stddev;
};

struct ChartText {
  std::string title;
  std::string x_label;
  std::string y_label;
};

// Throws std::invalid_argument on a log axis with nonpositive values.
std::string svg_round_bands(const ChartText& text, const std::vector<BandSeries>& series,
                            bool log_y);

struct ParetoPoint {
  std::string label;
  std::string color;
  double payload_kib = 0.0;
  double mae_mean = 0.0;
  double mae_std = 0.0;
};

std::string svg_pareto(const ChartText& text, const std::vector<ParetoPoint>& points);

// Per-round mean and sample std across seeds (zero for a single seed),
// truncated to the shortest run.
BandSeries round_band(const std::vector<const CellSeries*>& cells, double RoundMetrics::*field);

struct SvgFile {
  std::string name;  // "FD001_noniid_mae.svg"
  std::string content;
};

// For every (subset, partition) present: MAE and score convergence, the
// privacy proxy on a log axis (FP32 omitted), and payload against final MAE.
std::vector<SvgFile> render_plots(const std::map<CellKey, CellSeries>& cells);

}  // namespace aerofl

#endif  // AEROFL_PLOT_HPP_
