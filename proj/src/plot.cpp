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

#include "aerofl/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>

#include "aerofl/stats.hpp"

namespace aerofl {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 78.0;
constexpr double kRight = 150.0;  // legend column
constexpr double kTop = 40.0;
constexpr double kBottom = 56.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string data_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string color_for(BitWidth b) {
  switch (b) {
    case BitWidth::kFp32:
      return "#1f77b4";
    case BitWidth::kInt8:
      return "#2ca02c";
    case BitWidth::kInt4:
      return "#ff7f0e";
    case BitWidth::kInt2:
      return "#d62728";
  }
  return "#000000";
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::vector<double> nice_ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  const double step = (r <= 1.0 ? 1.0 : r <= 2.0 ? 2.0 : r <= 5.0 ? 5.0 : 10.0) * mag;
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) out.push_back(t);
  return out;
}

// Maps data coordinates to the plot area.
class Frame {
 public:
  Frame(double x0, double x1, double y0, double y1, bool log_y)
      : x0_(x0), x1_(x1), log_y_(log_y) {
    if (log_y_) {
      y0_ = std::floor(std::log10(y0));
      y1_ = std::ceil(std::log10(y1));
      if (y1_ == y0_) y1_ += 1.0;
    } else {
      if (y1 == y0) {
        const double pad = y0 == 0.0 ? 1.0 : 0.1 * std::abs(y0);
        y0 -= pad;
        y1 += pad;
      }
      const double pad = 0.05 * (y1 - y0);
      y0_ = y0 - pad;
      y1_ = y1 + pad;
    }
    if (x1_ == x0_) {
      x0_ -= 1.0;
      x1_ += 1.0;
    }
  }

  double x(double v) const { return kLeft + (v - x0_) / (x1_ - x0_) * (kWidth - kLeft - kRight); }
  double y(double v) const {
    const double t = log_y_ ? std::log10(v) : v;
    return kHeight - kBottom - (t - y0_) / (y1_ - y0_) * (kHeight - kTop - kBottom);
  }

  std::string axes(const ChartText& text, const std::vector<double>& xticks) const {
    std::string s;
    const double bx = kHeight - kBottom;
    const double rx = kWidth - kRight;
    s += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(rx - kLeft) +
         "\" height=\"" + num(bx - kTop) + "\" fill=\"none\" stroke=\"#333333\"/>\n";
    for (double t : xticks) {
      s += "<line x1=\"" + num(x(t)) + "\" y1=\"" + num(bx) + "\" x2=\"" + num(x(t)) +
           "\" y2=\"" + num(bx + 5) + "\" stroke=\"#333333\"/>\n";
      s += "<text x=\"" + num(x(t)) + "\" y=\"" + num(bx + 18) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + tick_label(t) + "</text>\n";
    }
    std::vector<double> yt;
    if (log_y_) {
      for (double e = y0_; e <= y1_ + 1e-9; e += 1.0) yt.push_back(std::pow(10.0, e));
    } else {
      yt = nice_ticks(y0_, y1_);
    }
    for (double t : yt) {
      char lab[32];
      if (log_y_) {
        std::snprintf(lab, sizeof(lab), "1e%d", static_cast<int>(std::lround(std::log10(t))));
      } else {
        std::snprintf(lab, sizeof(lab), "%s", tick_label(t).c_str());
      }
      s += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(y(t)) + "\" x2=\"" + num(rx) +
           "\" y2=\"" + num(y(t)) + "\" stroke=\"#dddddd\"/>\n";
      s += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(y(t) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">" + lab + "</text>\n";
    }
    s += "<text x=\"" + num((kLeft + rx) / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(text.title) + "</text>\n";
    s += "<text x=\"" + num((kLeft + rx) / 2) + "\" y=\"" + num(kHeight - 14) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + escape(text.x_label) + "</text>\n";
    s += "<text transform=\"translate(18," + num((kTop + bx) / 2) +
         ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" + escape(text.y_label) +
         "</text>\n";
    return s;
  }

 private:
  double x0_, x1_, y0_ = 0.0, y1_ = 1.0;
  bool log_y_;
};

std::string header() {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
}

std::string legend(const std::vector<std::pair<std::string, std::string>>& entries) {
  std::string s;
  double y = kTop + 10;
  for (const auto& [label, color] : entries) {
    const double x = kWidth - kRight + 14;
    s += "<rect x=\"" + num(x) + "\" y=\"" + num(y - 9) + "\" width=\"14\" height=\"10\" fill=\"" +
         color + "\"/>\n";
    s += "<text x=\"" + num(x + 20) + "\" y=\"" + num(y) + "\" font-size=\"12\">" + escape(label) +
         "</text>\n";
    y += 18;
  }
  return s;
}

}  // namespace

std::string svg_round_bands(const ChartText& text, const std::vector<BandSeries>& series,
                            bool log_y) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::size_t rounds = 0;
  std::string data = "<!-- data\nlabel,round,mean,std\n";
  for (const auto& s : series) {
    if (s.mean.size() != s.stddev.size()) throw std::invalid_argument("band size mismatch");
    rounds = std::max(rounds, s.mean.size());
    for (std::size_t i = 0; i < s.mean.size(); ++i) {
      double a = s.mean[i] - s.stddev[i];
      const double b = s.mean[i] + s.stddev[i];
      if (log_y) {
        if (!(s.mean[i] > 0.0)) {
          throw std::invalid_argument("log axis needs positive values (" + s.label + ")");
        }
        // A band reaching zero or below is clipped to the mean's decade.
        if (a <= 0.0) a = s.mean[i];
      }
      lo = std::min(lo, a);
      hi = std::max(hi, b);
      data += s.label + "," + std::to_string(i + 1) + "," + data_num(s.mean[i]) + "," +
              data_num(s.stddev[i]) + "\n";
    }
  }
  data += "-->\n";
  if (rounds == 0) {
    lo = log_y ? 1.0 : 0.0;
    hi = log_y ? 10.0 : 1.0;
  }
  Frame f(1.0, static_cast<double>(std::max<std::size_t>(rounds, 1)), lo, hi, log_y);

  std::string svg = header() + data;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::vector<double> xt = rounds > 1 ? nice_ticks(1.0, static_cast<double>(rounds))
                                      : std::vector<double>{1.0};
  svg += f.axes(text, xt);
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& s : series) {
    if (s.mean.empty()) continue;
    std::string band = "M";
    for (std::size_t i = 0; i < s.mean.size(); ++i) {
      double up = s.mean[i] + s.stddev[i];
      band += (i ? " L" : "") + num(f.x(i + 1.0)) + "," + num(f.y(up));
    }
    for (std::size_t i = s.mean.size(); i-- > 0;) {
      double down = s.mean[i] - s.stddev[i];
      if (log_y && down <= 0.0) down = s.mean[i];
      band += " L" + num(f.x(i + 1.0)) + "," + num(f.y(down));
    }
    svg += "<path d=\"" + band + " Z\" fill=\"" + s.color +
           "\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";
    std::string pts;
    for (std::size_t i = 0; i < s.mean.size(); ++i)
      pts += (i ? " " : "") + num(f.x(i + 1.0)) + "," + num(f.y(s.mean[i]));
    svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + s.color +
           "\" stroke-width=\"2\"/>\n";
    entries.push_back({s.label, s.color});
  }
  svg += legend(entries);
  return svg + "</svg>\n";
}

std::string svg_pareto(const ChartText& text, const std::vector<ParetoPoint>& points) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  std::string data = "<!-- data\nlabel,payload_kib,mae_mean,mae_std\n";
  for (const auto& p : points) {
    x0 = std::min(x0, p.payload_kib);
    x1 = std::max(x1, p.payload_kib);
    y0 = std::min(y0, p.mae_mean - p.mae_std);
    y1 = std::max(y1, p.mae_mean + p.mae_std);
    data += p.label + "," + data_num(p.payload_kib) + "," + data_num(p.mae_mean) + "," +
            data_num(p.mae_std) + "\n";
  }
  data += "-->\n";
  if (points.empty()) {
    x0 = y0 = 0.0;
    x1 = y1 = 1.0;
  }
  const double xpad = 0.06 * std::max(x1 - x0, 1.0);
  Frame f(std::max(0.0, x0 - xpad), x1 + xpad, y0, y1, false);
  std::string svg = header() + data;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += f.axes(text, nice_ticks(std::max(0.0, x0 - xpad), x1 + xpad));
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& p : points) {
    const double cx = f.x(p.payload_kib);
    svg += "<line x1=\"" + num(cx) + "\" y1=\"" + num(f.y(p.mae_mean - p.mae_std)) + "\" x2=\"" +
           num(cx) + "\" y2=\"" + num(f.y(p.mae_mean + p.mae_std)) + "\" stroke=\"" + p.color +
           "\" stroke-width=\"1.5\"/>\n";
    svg += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(f.y(p.mae_mean)) + "\" r=\"5\" fill=\"" +
           p.color + "\"/>\n";
    svg += "<text x=\"" + num(cx + 8) + "\" y=\"" + num(f.y(p.mae_mean) - 8) +
           "\" font-size=\"11\">" + escape(p.label) + "</text>\n";
    entries.push_back({p.label, p.color});
  }
  svg += legend(entries);
  return svg + "</svg>\n";
}

BandSeries round_band(const std::vector<const CellSeries*>& cells, double RoundMetrics::*field) {
  BandSeries b;
  if (cells.empty()) return b;
  std::size_t rounds = cells.front()->rounds.size();
  for (const auto* c : cells) rounds = std::min(rounds, c->rounds.size());
  for (std::size_t r = 0; r < rounds; ++r) {
    std::vector<double> v;
    for (const auto* c : cells) v.push_back(c->rounds[r].*field);
    if (v.size() >= 2) {
      auto ms = mean_std(v);
      b.mean.push_back(ms.mean);
      b.stddev.push_back(ms.stddev);
    } else {
      b.mean.push_back(v[0]);
      b.stddev.push_back(0.0);
    }
  }
  return b;
}

std::vector<SvgFile> render_plots(const std::map<CellKey, CellSeries>& cells) {
  const auto groups = group_cells(cells);
  std::set<std::pair<Subset, PartitionMode>> panels;
  for (const auto& [k, v] : groups) panels.insert({k.subset, k.partition});

  std::vector<SvgFile> out;
  for (const auto& [subset, mode] : panels) {
    const std::string stem =
        std::string(subset_name(subset)) + "_" + std::string(partition_name(mode));
    const std::string where = std::string(subset_name(subset)) + ", " +
                              (mode == PartitionMode::kIid ? "IID" : "Non-IID");
    std::vector<BandSeries> mae, score, lpriv;
    std::vector<ParetoPoint> pareto;
    for (auto bits : kAllBitWidths) {
      auto it = groups.find({subset, mode, bits});
      if (it == groups.end()) continue;
      const std::string label = std::string(bit_width_label(bits));
      const std::string color = color_for(bits);
      auto add = [&](std::vector<BandSeries>& dst, double RoundMetrics::*field) {
        auto b = round_band(it->second, field);
        b.label = label;
        b.color = color;
        dst.push_back(std::move(b));
      };
      add(mae, &RoundMetrics::mae);
      add(score, &RoundMetrics::nasa_score);
      if (bits != BitWidth::kFp32) {
        add(lpriv, &RoundMetrics::l_priv);
        // Zero distortion (no training) has no place on a log axis.
        const auto& m = lpriv.back().mean;
        if (std::any_of(m.begin(), m.end(), [](double v) { return !(v > 0.0); })) lpriv.pop_back();
      }

      std::vector<double> final_mae;
      for (const auto* c : it->second) final_mae.push_back(c->final().mae);
      ParetoPoint p;
      p.label = label;
      p.color = color;
      p.payload_kib = it->second.front()->final().payload_bytes / 1024.0;
      p.mae_mean = final_mae.size() >= 2 ? mean_std(final_mae).mean : final_mae[0];
      p.mae_std = final_mae.size() >= 2 ? mean_std(final_mae).stddev : 0.0;
      pareto.push_back(p);
    }
    out.push_back({stem + "_mae.svg",
                   svg_round_bands({"Test MAE per round (" + where + ")", "FL round", "MAE (cycles)"},
                                   mae, false)});
    out.push_back({stem + "_score.svg",
                   svg_round_bands({"NASA score per round (" + where + ")", "FL round",
                                    "Score S"},
                                   score, false)});
    if (!lpriv.empty()) {
      out.push_back({stem + "_lpriv.svg",
                     svg_round_bands({"Quantization distortion per round (" + where + ")",
                                      "FL round", "L_priv (log scale)"},
                                     lpriv, true)});
    }
    out.push_back({stem + "_pareto.svg",
                   svg_pareto({"Payload vs final MAE (" + where + ")", "Payload per client (KiB)",
                               "Final MAE (cycles)"},
                              pareto)});
  }
  return out;
}

}  // namespace aerofl
