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

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "aerofl/runner.hpp"
#include "aerofl/synthetic.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace aerofl;
namespace fs = std::filesystem;

namespace {

std::shared_ptr<const Dataset> tiny(Subset subset, int engines) {
  SyntheticSpec spec;
  spec.train_engines = engines;
  spec.test_engines = 6;
  spec.min_life = 55;
  spec.max_life = 70;
  spec.operating_conditions = subset == Subset::kFD002 ? 6 : 1;
  spec.seed = 11;
  return std::make_shared<const Dataset>(synthetic_dataset(subset, spec));
}

// FD002 gets fewer engines than clients, so every FD002 cell fails.
DatasetLoader test_loader() {
  auto fd1 = tiny(Subset::kFD001, 8);
  auto fd2 = tiny(Subset::kFD002, 2);
  return [fd1, fd2](Subset s) { return s == Subset::kFD001 ? fd1 : fd2; };
}

RunConfig tiny_config(const fs::path& out) {
  RunConfig c;
  c.seeds = {1, 2};
  c.rounds = 2;
  c.local_epochs = 1;
  c.clients = 4;
  c.output = out;
  c.workers = 2;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const char* name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("default grid: Non-IID over both subsets, IID addendum on FD001") {
  const auto grid = build_grid(RunConfig{});
  REQUIRE(grid.size() == 100);
  std::size_t iid = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].partition == PartitionMode::kIid) {
      ++iid;
      CHECK(i >= 80);
      CHECK(grid[i].subset == Subset::kFD001);
      CHECK((grid[i].bits == BitWidth::kFp32 || grid[i].bits == BitWidth::kInt4));
    }
  }
  CHECK(iid == 20);
  auto c = RunConfig{};
  c.iid = false;
  CHECK(build_grid(c).size() == 80);
}

TEST_CASE("grid filter") {
  GridFilter f;
  const CellKey k{Subset::kFD001, PartitionMode::kNonIid, BitWidth::kInt4, 42};
  CHECK(f.matches(k));
  f.bits = std::vector<BitWidth>{BitWidth::kInt2};
  CHECK_FALSE(f.matches(k));
  f.bits = std::vector<BitWidth>{BitWidth::kInt2, BitWidth::kInt4};
  f.partition = PartitionMode::kIid;
  CHECK_FALSE(f.matches(k));
  f.partition = PartitionMode::kNonIid;
  f.seeds = std::vector<std::uint64_t>{42};
  f.subsets = std::vector<Subset>{Subset::kFD001};
  CHECK(f.matches(k));
}

TEST_CASE("run_grid writes results, summaries and a manifest; resume reuses cells") {
  const auto dir = fresh_dir("aerofl_runner");
  const auto cfg = tiny_config(dir);
  RunOptions opt;
  opt.quiet = true;
  opt.filter.bits = std::vector<BitWidth>{BitWidth::kFp32, BitWidth::kInt4};

  const auto report = run_grid(cfg, test_loader(), opt);
  REQUIRE(report.cells.size() == 2 * 4 * 2 + 2 * 2);
  // FD001: 2 Non-IID bit widths x 2 seeds + 4 IID cells. FD002: 4 failures.
  CHECK(report.count(CellStatus::kDone) == 8);
  CHECK(report.count(CellStatus::kFailed) == 4);
  CHECK(report.count(CellStatus::kExcluded) == 8);
  for (const auto& o : report.cells) {
    if (o.status == CellStatus::kFailed) {
      CHECK(o.key.subset == Subset::kFD002);
      CHECK(o.error.find("fewer") != std::string::npos);
    }
  }

  const auto cells = read_results_dir(dir / "runs");
  CHECK(cells.size() == 8);
  for (const auto& [k, s] : cells) CHECK(s.rounds.size() == 2);
  CHECK(fs::exists(dir / "checkpoints" / "FD001_iid_b4_s2.json"));
  CHECK(fs::exists(dir / "summary" / "FD001_noniid_b32.json"));
  CHECK_FALSE(fs::exists(dir / "summary" / "FD002_noniid_b32.json"));

  const auto summary = nlohmann::json::parse(slurp(dir / "summary" / "FD001_noniid_b4.json"));
  CHECK(summary["seeds"] == nlohmann::json({1, 2}));
  const auto& s1 = cells.at({Subset::kFD001, PartitionMode::kNonIid, BitWidth::kInt4, 1});
  CHECK(summary["final_mae"][0].get<double>() == s1.final().mae);

  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m["version"] == std::string(library_version()));
  CHECK(m["grid_size"] == 20);
  CHECK(m["cells"].size() == 20);
  CHECK(m["skipped"].size() == 12);
  CHECK(m["seeds"] == nlohmann::json({1, 2}));
  CHECK(m["seed_convention"].is_object());
  CHECK(m["config"]["experiment.rounds"] == "2");
  CHECK(parse_run_config(m["config_ini"].get<std::string>()).rounds == 2);
  CHECK(parse_run_config(slurp(dir / "config.ini")).clients == 4);

  const auto csv_before = slurp(dir / "runs" / "FD001_noniid_b4_s1.csv");
  opt.resume = true;
  const auto again = run_grid(cfg, test_loader(), opt);
  CHECK(again.count(CellStatus::kReused) == 8);
  CHECK(again.count(CellStatus::kDone) == 0);
  CHECK(slurp(dir / "runs" / "FD001_noniid_b4_s1.csv") == csv_before);

  // A truncated CSV is recomputed, and reproduces the same bytes.
  {
    std::ofstream(dir / "runs" / "FD001_noniid_b4_s1.csv") << csv_before.substr(0, 60);
  }
  const auto third = run_grid(cfg, test_loader(), opt);
  CHECK(third.count(CellStatus::kDone) == 1);
  CHECK(slurp(dir / "runs" / "FD001_noniid_b4_s1.csv") == csv_before);
  fs::remove_all(dir);
}
