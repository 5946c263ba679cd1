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

#include "aerofl/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "aerofl/error.hpp"

namespace aerofl {

namespace {

// Column width in characters; the tables contain a few multi-byte glyphs.
std::size_t display_width(const std::string& s) {
  return static_cast<std::size_t>(std::count_if(
      s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string pad(const std::string& s, std::size_t width, bool right = false) {
  const std::size_t w = display_width(s);
  if (w >= width) return s;
  const std::string fill(width - w, ' ');
  return right ? fill + s : s + fill;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string pm(double mean, double sd, const char* f) {
  return fmt(f, mean) + " ± " + fmt(f, sd);
}

std::string p_cell(const PairedTestResult& t) {
  std::string s = t.p < 0.001 ? "<0.001" : fmt("%.3f", t.p);
  if (t.p < 0.05) s += "*";
  if (t.degenerate) s += "!";
  return s;
}

std::string row(const std::vector<std::pair<std::string, std::size_t>>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const bool last = i + 1 == cells.size();
    out += last ? cells[i].first : pad(cells[i].first, cells[i].second) + "  ";
  }
  return out + "\n";
}

// FP32 first, then decreasing precision.
int bits_rank(BitWidth b) {
  switch (b) {
    case BitWidth::kFp32:
      return 0;
    case BitWidth::kInt8:
      return 1;
    case BitWidth::kInt4:
      return 2;
    case BitWidth::kInt2:
      return 3;
  }
  return 4;
}

std::vector<GroupKey> ordered_groups(const std::map<GroupKey, std::vector<const CellSeries*>>& g,
                                     PartitionMode mode) {
  std::vector<GroupKey> keys;
  for (const auto& [k, v] : g)
    if (k.partition == mode) keys.push_back(k);
  std::sort(keys.begin(), keys.end(), [](const GroupKey& a, const GroupKey& b) {
    return std::pair(a.subset, bits_rank(a.bits)) < std::pair(b.subset, bits_rank(b.bits));
  });
  return keys;
}

std::string csv_number(double v) { return fmt("%.6f", v); }

}  // namespace

ConfigSummary summarize(const GroupKey& group, const std::vector<const CellSeries*>& cells) {
  if (cells.size() < 2) {
    throw DataError(group_stem(group) + ": statistics need at least two seeds, found " +
                    std::to_string(cells.size()));
  }
  ConfigSummary s;
  s.group = group;
  for (const auto* c : cells) {
    s.seeds.push_back(c->key.seed);
    s.final_mae.push_back(c->final().mae);
    s.final_score.push_back(c->final().nasa_score);
  }
  s.mae = mean_std(s.final_mae);
  s.score = mean_std(s.final_score);
  s.score_cv = s.score.mean != 0.0 ? coefficient_of_variation(s.final_score) : 0.0;
  return s;
}

std::vector<BaselineComparison> compare_to_baseline(
    const std::map<CellKey, CellSeries>& cells, PartitionMode mode) {
  const auto groups = group_cells(cells);
  std::vector<BaselineComparison> out;
  std::map<Subset, const ConfigSummary*> baseline;
  std::vector<ConfigSummary> summaries;
  const auto keys = ordered_groups(groups, mode);
  summaries.reserve(keys.size());
  for (const auto& k : keys) summaries.push_back(summarize(k, groups.at(k)));
  for (const auto& s : summaries)
    if (s.group.bits == BitWidth::kFp32) baseline[s.group.subset] = &s;

  for (const auto& s : summaries) {
    auto it = baseline.find(s.group.subset);
    if (it == baseline.end()) {
      throw DataError(std::string(subset_name(s.group.subset)) + " " +
                      std::string(partition_name(mode)) +
                      ": no FP32 baseline to compare against");
    }
    const ConfigSummary& base = *it->second;
    if (s.seeds != base.seeds) {
      throw DataError(group_stem(s.group) + ": seeds do not pair with the FP32 baseline");
    }
    BaselineComparison c;
    c.summary = s;
    c.is_baseline = &s == &base;
    if (!c.is_baseline) {
      c.mae_test = paired_t_test(s.final_mae, base.final_mae);
      c.score_test = paired_t_test(s.final_score, base.final_score);
    }
    out.push_back(c);
  }
  return out;
}

std::string format_results_table(const std::vector<BaselineComparison>& rows,
                                  PartitionMode mode) {
  constexpr std::size_t W[] = {5, 4, 2, 13, 7, 5, 11, 7, 5, 6};
  std::string out = std::string(mode == PartitionMode::kIid ? "IID" : "Non-IID") +
                    " partition: final-round test metrics, mean ± std over n seeds\n";
  out += "p: two-tailed paired t-test vs FP32 (df = n - 1), * p < 0.05; "
         "d: Cohen's d of Cfg - FP32\n\n";
  out += row({{"Sub.", W[0]}, {"Cfg", W[1]}, {"n", W[2]}, {"MAE (cycles)", W[3]},
              {"p_MAE", W[4]}, {"d_MAE", W[5]}, {"S (x10^3)", W[6]}, {"p_S", W[7]},
              {"d_S", W[8]}, {"CV_S", W[9]}});
  bool degenerate = false;
  Subset last = rows.empty() ? Subset::kFD001 : rows.front().summary.group.subset;
  for (const auto& r : rows) {
    const auto& s = r.summary;
    if (s.group.subset != last) out += "\n";
    last = s.group.subset;
    const std::string dash = "-";
    degenerate = degenerate || r.mae_test.degenerate || r.score_test.degenerate;
    out += row({{std::string(subset_name(s.group.subset)), W[0]},
                {std::string(bit_width_label(s.group.bits)), W[1]},
                {std::to_string(s.seeds.size()), W[2]},
                {pm(s.mae.mean, s.mae.stddev, "%.2f"), W[3]},
                {r.is_baseline ? dash : p_cell(r.mae_test), W[4]},
                {r.is_baseline ? dash : fmt("%+.2f", r.mae_test.cohens_d), W[5]},
                {pm(s.score.mean / 1e3, s.score.stddev / 1e3, "%.0f"), W[6]},
                {r.is_baseline ? dash : p_cell(r.score_test), W[7]},
                {r.is_baseline ? dash : fmt("%+.2f", r.score_test.cohens_d), W[8]},
                {fmt("%.1f%%", s.score_cv), W[9]}});
  }
  if (degenerate) out += "\n! zero-variance differences; p set by convention\n";
  return out;
}

std::string results_table_csv(const std::vector<BaselineComparison>& rows) {
  std::string out =
      "subset,partition,config,bits,n,mae_mean,mae_std,p_mae,d_mae,score_mean,score_std,"
      "p_score,d_score,cv_score_percent,significant_mae,significant_score\n";
  for (const auto& r : rows) {
    const auto& s = r.summary;
    auto opt = [&](double v) { return r.is_baseline ? std::string() : csv_number(v); };
    auto sig = [&](const PairedTestResult& t) {
      return r.is_baseline ? std::string() : std::string(t.p < 0.05 ? "1" : "0");
    };
    out += std::string(subset_name(s.group.subset)) + "," +
           std::string(partition_name(s.group.partition)) + "," +
           std::string(bit_width_label(s.group.bits)) + "," +
           std::to_string(bits_of(s.group.bits)) + "," + std::to_string(s.seeds.size()) + "," +
           csv_number(s.mae.mean) + "," + csv_number(s.mae.stddev) + "," + opt(r.mae_test.p) +
           "," + opt(r.mae_test.cohens_d) + "," + csv_number(s.score.mean) + "," +
           csv_number(s.score.stddev) + "," + opt(r.score_test.p) + "," +
           opt(r.score_test.cohens_d) + "," + csv_number(s.score_cv) + "," +
           sig(r.mae_test) + "," + sig(r.score_test) + "\n";
  }
  return out;
}

std::vector<PartitionPair> compare_partitions(const std::map<CellKey, CellSeries>& cells) {
  const auto groups = group_cells(cells);
  std::vector<PartitionPair> out;
  for (const auto& k : ordered_groups(groups, PartitionMode::kIid)) {
    GroupKey other = k;
    other.partition = PartitionMode::kNonIid;
    auto it = groups.find(other);
    if (it == groups.end()) continue;
    out.push_back({summarize(k, groups.at(k)), summarize(other, it->second)});
  }
  return out;
}

std::string format_partition_table(const std::vector<PartitionPair>& rows) {
  constexpr std::size_t W[] = {5, 9, 4, 2, 13, 11};
  std::string out = "IID vs Non-IID partitioning: mean ± std over n seeds\n\n";
  out += row({{"Sub.", W[0]}, {"Partition", W[1]}, {"Cfg", W[2]}, {"n", W[3]},
              {"MAE (cycles)", W[4]}, {"S (x10^3)", W[5]}});
  std::set<Subset> subsets;
  for (const auto& r : rows) subsets.insert(r.iid.group.subset);
  bool first = true;
  for (auto subset : subsets) {
    for (auto mode : {PartitionMode::kIid, PartitionMode::kNonIid}) {
      if (!first) out += "\n";
      first = false;
      for (const auto& r : rows) {
        if (r.iid.group.subset != subset) continue;
        const auto& s = mode == PartitionMode::kIid ? r.iid : r.noniid;
        out += row({{std::string(subset_name(subset)), W[0]},
                    {mode == PartitionMode::kIid ? "IID" : "Non-IID", W[1]},
                    {std::string(bit_width_label(s.group.bits)), W[2]},
                    {std::to_string(s.seeds.size()), W[3]},
                    {pm(s.mae.mean, s.mae.stddev, "%.2f"), W[4]},
                    {pm(s.score.mean / 1e3, s.score.stddev / 1e3, "%.0f"), W[5]}});
      }
    }
  }
  return out;
}

std::string partition_table_csv(const std::vector<PartitionPair>& rows) {
  std::string out = "subset,partition,config,bits,n,mae_mean,mae_std,score_mean,score_std\n";
  for (const auto& r : rows) {
    for (const auto* s : {&r.iid, &r.noniid}) {
      out += std::string(subset_name(s->group.subset)) + "," +
             std::string(partition_name(s->group.partition)) + "," +
             std::string(bit_width_label(s->group.bits)) + "," +
             std::to_string(bits_of(s->group.bits)) + "," + std::to_string(s->seeds.size()) +
             "," + csv_number(s->mae.mean) + "," + csv_number(s->mae.stddev) + "," +
             csv_number(s->score.mean) + "," + csv_number(s->score.stddev) + "\n";
    }
  }
  return out;
}

std::string format_heterogeneity_table(const std::vector<SubsetHeterogeneity>& rows) {
  std::string out = "Per-client mean RUL and EMD to the global label distribution (cycles)\n";
  for (const auto& r : rows) {
    out += "  " + std::string(subset_name(r.subset)) + ": " +
           std::string(partition_name(r.mode)) + " partition, seed " + std::to_string(r.seed) +
           "\n";
  }
  out += "\n";
  std::vector<std::pair<std::string, std::size_t>> header = {{"Client", 8}};
  for (const auto& r : rows) {
    header.push_back({std::string(subset_name(r.subset)) + " mean", 10});
    header.push_back({"EMD", 5});
  }
  out += row(header);
  std::size_t clients = 0;
  for (const auto& r : rows) clients = std::max(clients, r.report.client_mean_rul.size());
  for (std::size_t k = 0; k < clients; ++k) {
    std::vector<std::pair<std::string, std::size_t>> cells = {{"k=" + std::to_string(k + 1), 8}};
    for (const auto& r : rows) {
      const bool has = k < r.report.client_mean_rul.size();
      cells.push_back({has ? fmt("%.1f", r.report.client_mean_rul[k]) : "", 10});
      cells.push_back({has ? fmt("%.1f", r.report.client_emd[k]) : "", 5});
    }
    out += row(cells);
  }
  std::vector<std::pair<std::string, std::size_t>> global = {{"Global", 8}};
  std::vector<std::pair<std::string, std::size_t>> avg = {{"Avg. EMD", 8}};
  for (const auto& r : rows) {
    global.push_back({fmt("%.1f", r.report.global_mean_rul), 10});
    global.push_back({"-", 5});
    avg.push_back({"-", 10});
    avg.push_back({fmt("%.1f", r.report.average_emd), 5});
  }
  out += "\n" + row(global) + row(avg);
  return out;
}

std::string heterogeneity_csv(const std::vector<SubsetHeterogeneity>& rows) {
  std::string out = "subset,partition,seed,client,windows,mean_rul,emd\n";
  for (const auto& r : rows) {
    const std::string prefix = std::string(subset_name(r.subset)) + "," +
                               std::string(partition_name(r.mode)) + "," +
                               std::to_string(r.seed) + ",";
    std::size_t total = 0;
    for (std::size_t k = 0; k < r.report.client_mean_rul.size(); ++k) {
      total += r.report.client_windows[k];
      out += prefix + std::to_string(k + 1) + "," + std::to_string(r.report.client_windows[k]) +
             "," + csv_number(r.report.client_mean_rul[k]) + "," +
             csv_number(r.report.client_emd[k]) + "\n";
    }
    out += prefix + "global," + std::to_string(total) + "," +
           csv_number(r.report.global_mean_rul) + ",\n";
    out += prefix + "average,,," + csv_number(r.report.average_emd) + "\n";
  }
  return out;
}

}  // namespace aerofl
