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

#include "aerofl/runner.hpp"

#include <boost/crc.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "aerofl/error.hpp"
#include "aerofl/stats.hpp"
#include "json.hpp"

#ifndef AEROFL_VERSION
#define AEROFL_VERSION "unknown"
#endif

namespace aerofl {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string_view library_version() noexcept { return AEROFL_VERSION; }

std::vector<CellKey> build_grid(const RunConfig& config) {
  std::vector<CellKey> grid;
  if (config.noniid) {
    for (auto subset : config.subsets)
      for (auto bits : config.bits)
        for (auto seed : config.seeds)
          grid.push_back({subset, PartitionMode::kNonIid, bits, seed});
  }
  if (config.iid) {
    for (auto subset : config.iid_subsets)
      for (auto bits : config.iid_bits)
        for (auto seed : config.seeds)
          grid.push_back({subset, PartitionMode::kIid, bits, seed});
  }
  return grid;
}

bool GridFilter::matches(const CellKey& c) const {
  auto has = [](const auto& opt, const auto& v) {
    return !opt || std::find(opt->begin(), opt->end(), v) != opt->end();
  };
  return has(subsets, c.subset) && has(bits, c.bits) && has(seeds, c.seed) &&
         (!partition || *partition == c.partition);
}

DatasetLoader directory_loader(const fs::path& root) {
  struct Cache {
    std::mutex mu;
    std::map<Subset, std::shared_ptr<const Dataset>> loaded;
  };
  auto cache = std::make_shared<Cache>();
  return [root, cache](Subset subset) {
    std::lock_guard lock(cache->mu);
    auto& slot = cache->loaded[subset];
    if (!slot) slot = std::make_shared<const Dataset>(load_dataset(root, subset));
    return slot;
  };
}

std::string_view cell_status_name(CellStatus s) noexcept {
  switch (s) {
    case CellStatus::kDone:
      return "done";
    case CellStatus::kReused:
      return "reused";
    case CellStatus::kFailed:
      return "failed";
    case CellStatus::kExcluded:
      return "excluded";
  }
  return "?";
}

std::size_t RunReport::count(CellStatus s) const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [s](const auto& c) { return c.status == s; }));
}

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string crc32_hex(std::string_view bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08x", crc.checksum());
  return buf;
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

ordered_json cell_json(const CellKey& k) {
  return {{"cell", cell_stem(k)},
          {"subset", subset_name(k.subset)},
          {"partition", partition_name(k.partition)},
          {"bits", bits_of(k.bits)},
          {"seed", k.seed}};
}

ordered_json dataset_checksums(const fs::path& root, const std::set<Subset>& subsets) {
  ordered_json out = ordered_json::object();
  if (root.empty()) return out;
  for (auto s : subsets) {
    const auto files = subset_files(root, s);
    ordered_json entry = ordered_json::object();
    for (const auto& f : {files.train, files.test, files.rul}) {
      if (!fs::exists(f)) continue;
      const auto text = read_text_file(f);
      entry[f.filename().string()] = {{"bytes", text.size()}, {"crc32", crc32_hex(text)}};
    }
    out[std::string(subset_name(s))] = entry;
  }
  return out;
}

// A cell on disk counts as complete when its CSV parses, belongs to the
// cell, has every round, and the checkpoint exists.
std::optional<CellSeries> complete_cell(const fs::path& csv, const fs::path& ckpt,
                                        const CellKey& key, int rounds) {
  if (!fs::exists(csv) || !fs::exists(ckpt)) return std::nullopt;
  try {
    auto s = parse_results_csv(read_text_file(csv));
    if (s.key == key && static_cast<int>(s.rounds.size()) == rounds) return s;
  } catch (const DataError&) {
  }
  return std::nullopt;
}

ordered_json optional_number(double v, bool ok) { return ok ? ordered_json(v) : ordered_json(); }

}  // namespace

RunReport run_grid(const RunConfig& config, const DatasetLoader& loader,
                   const RunOptions& options) {
  config.validate();
  const auto grid = build_grid(config);
  RunReport report;
  std::vector<std::size_t> todo;
  std::set<Subset> needed;
  for (const auto& key : grid) {
    CellOutcome o;
    o.key = key;
    if (options.filter.matches(key)) {
      todo.push_back(report.cells.size());
      needed.insert(key.subset);
    }
    report.cells.push_back(o);
  }

  const fs::path out = config.output;
  fs::create_directories(out / "runs");
  fs::create_directories(out / "checkpoints");
  fs::create_directories(out / "summary");

  const std::string config_ini = to_ini(config);
  std::string grid_text;
  for (const auto& k : grid) grid_text += cell_stem(k) + "\n";
  const std::string run_id = crc32_hex(config_ini + grid_text);
  const std::string started = utc_now();

  // Load every dataset up front so missing files fail before any training.
  std::map<Subset, std::shared_ptr<const Dataset>> data;
  for (auto s : needed) data[s] = loader(s);

  std::mutex log_mu;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> finished{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= todo.size()) return;
      CellOutcome& o = report.cells[todo[t]];
      const std::string stem = cell_stem(o.key);
      const fs::path csv = out / "runs" / (stem + ".csv");
      const fs::path ckpt = out / "checkpoints" / (stem + ".json");
      const auto t0 = std::chrono::steady_clock::now();
      try {
        std::optional<CellSeries> existing;
        if (options.resume) existing = complete_cell(csv, ckpt, o.key, config.rounds);
        if (existing) {
          o.status = CellStatus::kReused;
          o.final_mae = existing->final().mae;
          o.final_score = existing->final().nasa_score;
        } else {
          auto cfg = cell_config(config, o.key.subset, o.key.bits, o.key.partition, o.key.seed);
          auto result = run_experiment(cfg, data.at(o.key.subset));
          const std::string text = to_csv(result);
          write_file_atomic(csv, text);
          write_file_atomic(ckpt, params_to_json(result.final_params));
          // Summaries use the values as written, so they agree with reports
          // rebuilt from the CSVs.
          const auto written = parse_results_csv(text);
          o.status = CellStatus::kDone;
          o.final_mae = written.final().mae;
          o.final_score = written.final().nasa_score;
        }
      } catch (const std::exception& e) {
        o.status = CellStatus::kFailed;
        o.error = e.what();
      }
      o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const std::size_t done = ++finished;
      if (!options.quiet) {
        std::lock_guard lock(log_mu);
        char line[256];
        if (o.status == CellStatus::kFailed) {
          std::snprintf(line, sizeof(line), "[%3zu/%zu] %-24s FAILED: %s\n", done, todo.size(),
                        stem.c_str(), o.error.c_str());
        } else {
          std::snprintf(line, sizeof(line), "[%3zu/%zu] %-24s MAE %7.3f  S %12.1f  %s%.1f s\n",
                        done, todo.size(), stem.c_str(), o.final_mae, o.final_score,
                        o.status == CellStatus::kReused ? "reused " : "", o.seconds);
        }
        std::cerr << line << std::flush;
      }
    }
  };
  const int n_workers = std::max(1, std::min<int>(config.workers, static_cast<int>(todo.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  // Per-configuration summaries over the seeds that completed.
  std::map<GroupKey, std::vector<const CellOutcome*>> groups;
  for (const auto& o : report.cells) {
    if (o.status == CellStatus::kDone || o.status == CellStatus::kReused) {
      groups[{o.key.subset, o.key.partition, o.key.bits}].push_back(&o);
    }
  }
  for (const auto& [g, cells] : groups) {
    std::vector<double> mae, score;
    ordered_json seeds = ordered_json::array();
    for (const auto* c : cells) {
      seeds.push_back(c->key.seed);
      mae.push_back(c->final_mae);
      score.push_back(c->final_score);
    }
    const bool stats_ok = cells.size() >= 2;
    MeanStd m{}, s{};
    if (stats_ok) {
      m = mean_std(mae);
      s = mean_std(score);
    }
    ordered_json j = {
        {"subset", subset_name(g.subset)},
        {"partition", partition_name(g.partition)},
        {"bits", bits_of(g.bits)},
        {"config", bit_width_label(g.bits)},
        {"rounds", config.rounds},
        {"run_id", run_id},
        {"manifest", "../manifest.json"},
        {"seeds", seeds},
        {"final_mae", mae},
        {"final_score", score},
        {"mae_mean", optional_number(m.mean, stats_ok)},
        {"mae_std", optional_number(m.stddev, stats_ok)},
        {"score_mean", optional_number(s.mean, stats_ok)},
        {"score_std", optional_number(s.stddev, stats_ok)},
        {"score_cv_percent",
         optional_number(stats_ok && s.mean != 0.0 ? 100.0 * s.stddev / std::abs(s.mean) : 0.0,
                         stats_ok && s.mean != 0.0)},
    };
    write_file_atomic(out / "summary" / (group_stem(g) + ".json"), j.dump(2) + "\n");
  }

  write_file_atomic(out / "config.ini", config_ini);

  ordered_json cells = ordered_json::array();
  ordered_json skipped = ordered_json::array();
  for (const auto& o : report.cells) {
    auto c = cell_json(o.key);
    c["status"] = cell_status_name(o.status);
    if (o.status == CellStatus::kDone || o.status == CellStatus::kReused) {
      c["csv"] = "runs/" + cell_stem(o.key) + ".csv";
      c["checkpoint"] = "checkpoints/" + cell_stem(o.key) + ".json";
      c["final_mae"] = o.final_mae;
      c["final_score"] = o.final_score;
      c["seconds"] = o.seconds;
    } else {
      c["reason"] = o.status == CellStatus::kFailed ? o.error : "excluded by command-line filter";
      skipped.push_back(cell_stem(o.key));
    }
    cells.push_back(c);
  }
  ordered_json manifest = {
      {"tool", "aerofl"},
      {"version", library_version()},
      {"run_id", run_id},
      {"started_utc", started},
      {"finished_utc", utc_now()},
      {"config", echo_config(config)},
      {"config_ini", config_ini},
      {"data_root", options.data_root.string()},
      {"datasets", dataset_checksums(options.data_root, needed)},
      {"seeds", config.seeds},
      {"seed_convention",
       {{"client_seed", "s * 10000 + r * 100 + k"},
        {"r", "0-based round index, r in [0, rounds)"},
        {"k", "1-based client index, k in [1, clients]"},
        {"csv_round", "1-based; row n holds metrics after aggregating r = n - 1"},
        {"init_stream", "derive_seed(s, 1)"},
        {"partition_stream", "derive_seed(s, 2)"}}},
      {"grid_size", grid.size()},
      {"cells", cells},
      {"skipped", skipped},
  };
  write_file_atomic(out / "manifest.json", manifest.dump(2) + "\n");
  return report;
}

}  // namespace aerofl
