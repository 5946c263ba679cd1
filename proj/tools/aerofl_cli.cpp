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

// aerofl: command-line front end.
//
//   aerofl ingest-check      dataset sanity report
//   aerofl run               experiment grid
//   aerofl partition-stats   per-client label heterogeneity
//   aerofl fpga              resource and link projections
//   aerofl report DIR        result tables from per-round CSVs
//   aerofl plot DIR          SVG figures from per-round CSVs
//   aerofl synth DIR         synthetic data in the C-MAPSS file layout
//
// Exit codes: 0 success, 1 configuration error, 2 data error, 3 runtime failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aerofl/cmapss.hpp"
#include "aerofl/config.hpp"
#include "aerofl/error.hpp"
#include "aerofl/fpga.hpp"
#include "aerofl/partition.hpp"
#include "aerofl/plot.hpp"
#include "aerofl/quantizer.hpp"
#include "aerofl/report.hpp"
#include "aerofl/rng.hpp"
#include "aerofl/runner.hpp"
#include "aerofl/synthetic.hpp"

namespace fs = std::filesystem;
using namespace aerofl;

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kData = 2, kRuntime = 3 };

std::vector<Subset> subsets_from(const std::vector<std::string>& names) {
  std::vector<Subset> out;
  for (const auto& n : names) out.push_back(parse_subset(n));
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// ---------------------------------------------------------------- ingest-check

struct IngestArgs {
  std::optional<std::string> data;
  std::vector<std::string> subsets = {"FD001", "FD002"};
};

int cmd_ingest(const IngestArgs& a) {
  const auto root = resolve_data_root(RunConfig{}, a.data);
  bool ok = true;
  for (auto subset : subsets_from(a.subsets)) {
    const auto ds = load_dataset(root, subset);
    std::size_t rows = 0, usable = 0, short_train = 0;
    for (const auto& e : ds.train_engines) {
      rows += e.length();
      if (e.length() >= kWindowLength) {
        usable += e.length() - (kWindowLength - 1);
      } else {
        ++short_train;
      }
    }
    float lo = 1e9f, hi = -1e9f;
    bool finite = true;
    for (const auto* set : {&ds.train, &ds.test}) {
      for (const auto& w : *set) {
        lo = std::min(lo, w.label);
        hi = std::max(hi, w.label);
        for (float v : w.values) finite = finite && std::isfinite(v);
      }
    }
    const bool counts_ok = ds.train.size() == usable;
    const bool labels_ok = lo >= 0.0f && hi <= static_cast<float>(kRulCap);
    ok = ok && counts_ok && labels_ok && finite;
    std::printf("%s\n", std::string(subset_name(subset)).c_str());
    std::printf("  train engines        %zu (%zu rows, %zu shorter than %zu skipped)\n",
                ds.train_engines.size(), rows, short_train, kWindowLength);
    std::printf("  train windows        %zu (expected %zu) %s\n", ds.train.size(), usable,
                counts_ok ? "ok" : "MISMATCH");
    std::printf("  test engines         %zu (%zu shorter than %zu, padded)\n",
                ds.test_engines.size(), ds.short_test_trajectories, kWindowLength);
    std::printf("  test windows         %zu\n", ds.test.size());
    std::printf("  label range          [%g, %g] %s\n", lo, hi, labels_ok ? "ok" : "OUT OF RANGE");
    std::printf("  normalized values    %s\n", finite ? "finite" : "NON-FINITE");
    std::printf("  channel mean/std    ");
    for (std::size_t c = 0; c < kNumChannels; ++c) {
      std::printf(" s%d %.4g/%.3g", kRetainedSensors[c], ds.stats.mean[c], ds.stats.stddev[c]);
    }
    std::printf("\n");
  }
  if (!ok) throw DataError("ingest check failed");
  return kOk;
}

// ------------------------------------------------------------------------- run

struct RunArgs {
  std::string config;
  std::optional<std::string> data;
  std::optional<std::string> output;
  std::vector<std::string> subsets;
  std::vector<std::string> bits;
  std::vector<std::uint64_t> seeds;
  std::optional<std::string> partition;
  std::optional<int> rounds;
  std::optional<int> workers;
  std::optional<int> client_threads;
  bool resume = false;
  bool quiet = false;
};

int cmd_run(const RunArgs& a) {
  RunConfig cfg = a.config.empty() ? RunConfig{} : load_run_config(a.config);
  if (a.output) cfg.output = *a.output;
  if (a.rounds) cfg.rounds = *a.rounds;
  if (a.workers) cfg.workers = *a.workers;
  if (a.client_threads) cfg.client_threads = *a.client_threads;
  cfg.validate();

  RunOptions opt;
  opt.resume = a.resume;
  opt.quiet = a.quiet;
  if (!a.subsets.empty()) opt.filter.subsets = subsets_from(a.subsets);
  if (!a.bits.empty()) {
    std::vector<BitWidth> b;
    for (const auto& s : a.bits) b.push_back(parse_bit_width(s));
    opt.filter.bits = b;
  }
  if (!a.seeds.empty()) opt.filter.seeds = a.seeds;
  if (a.partition) {
    opt.filter.partition = parse_partition(*a.partition);
  } else if (!a.subsets.empty() || !a.bits.empty() || !a.seeds.empty()) {
    // Selecting cells on the command line means the main Non-IID grid unless
    // the IID addendum is asked for explicitly.
    opt.filter.partition = PartitionMode::kNonIid;
  }

  // Cells outside the configured grid are an error, not an empty run.
  std::size_t selected = 0;
  for (const auto& c : build_grid(cfg)) selected += opt.filter.matches(c) ? 1 : 0;
  if (selected == 0) throw ConfigError("the command-line selection matches no grid cell");

  opt.data_root = resolve_data_root(cfg, a.data);
  auto report = run_grid(cfg, directory_loader(opt.data_root), opt);
  const auto failed = report.count(CellStatus::kFailed);
  std::fprintf(stderr, "%zu done, %zu reused, %zu failed, %zu excluded; results in %s\n",
               report.count(CellStatus::kDone), report.count(CellStatus::kReused), failed,
               report.count(CellStatus::kExcluded), cfg.output.string().c_str());
  return failed == 0 ? kOk : kRuntime;
}

// ------------------------------------------------------------- partition-stats

struct PartitionArgs {
  std::optional<std::string> data;
  std::vector<std::string> subsets = {"FD001", "FD002"};
  std::uint64_t seed = 42;
  std::string partition = "noniid";
  int clients = 10;
  bool compare = false;
  std::optional<std::string> out;
};

int cmd_partition_stats(const PartitionArgs& a) {
  const auto root = resolve_data_root(RunConfig{}, a.data);
  const auto mode = parse_partition(a.partition);
  std::vector<SubsetHeterogeneity> rows;
  std::vector<Dataset> data;
  for (auto subset : subsets_from(a.subsets)) {
    data.push_back(load_dataset(root, subset));
    const auto& ds = data.back();
    rows.push_back({subset, mode, a.seed,
                    heterogeneity_report(simulation_partition(ds, mode, a.clients, a.seed), ds.train)});
  }
  const auto text = format_heterogeneity_table(rows);
  std::cout << text;

  std::string compare_csv;
  if (a.compare) {
    std::cout << "\nAverage EMD by seed, window shuffling (IID) vs engine blocks (Non-IID)\n";
    compare_csv = "subset,seed,noniid_avg_emd,iid_avg_emd\n";
    for (const auto& ds : data) {
      int smaller = 0, total = 0;
      for (auto seed : kDefaultSeeds) {
        const double non = heterogeneity_report(
            simulation_partition(ds, PartitionMode::kNonIid, a.clients, seed), ds.train).average_emd;
        const double iid = heterogeneity_report(
            simulation_partition(ds, PartitionMode::kIid, a.clients, seed), ds.train).average_emd;
        ++total;
        smaller += iid < non ? 1 : 0;
        std::printf("  %s seed %-5llu Non-IID %6.2f  IID %6.2f\n",
                    std::string(subset_name(ds.subset)).c_str(),
                    static_cast<unsigned long long>(seed), non, iid);
        compare_csv += std::string(subset_name(ds.subset)) + "," + std::to_string(seed) + "," +
                       fmt("%.6f", non) + "," + fmt("%.6f", iid) + "\n";
      }
      std::printf("  %s: IID below Non-IID in %d/%d seeds\n",
                  std::string(subset_name(ds.subset)).c_str(), smaller, total);
    }
  }
  if (a.out) {
    const fs::path dir = *a.out;
    write_text(dir / "partition_stats.txt", text);
    write_text(dir / "partition_stats.csv", heterogeneity_csv(rows));
    if (a.compare) write_text(dir / "partition_emd_by_seed.csv", compare_csv);
  }
  return kOk;
}

// ------------------------------------------------------------------------ fpga

struct FpgaArgs {
  std::optional<std::string> device;
  std::size_t params = kExpectedParamCount;
  double link_bps = 5000.0;
  double duty = 0.01;
  std::optional<std::string> csv;
};

int cmd_fpga(const FpgaArgs& a) {
  const DeviceBudget dev = a.device ? load_device(*a.device) : zcu102();
  std::vector<FpgaProjection> rows;
  for (auto b : kAllBitWidths) rows.push_back(project(b, dev, a.params));
  std::cout << format_fpga_table(rows, dev);
  for (const auto& r : rows) {
    if (r.bits == BitWidth::kInt4) std::printf("Spare DSP at INT4: %ld\n", r.spare_dsps);
  }

  std::printf("\nPayload per client per round (%zu parameters)\n", a.params);
  std::printf("%-5s %9s %12s %14s %16s\n", "Cfg", "KiB", "+scales KiB", "airtime (s)",
              "min interval");
  for (auto b : kAllBitWidths) {
    const double bytes = payload_bytes(a.params, b);
    const auto link = lorawan_schedule(bytes, a.link_bps, a.duty);
    std::printf("%-5s %9s %12s %14.2f %11.1f min\n", std::string(bit_width_label(b)).c_str(),
                format_kib(bytes).c_str(), format_kib(payload_bytes(a.params, b, true)).c_str(),
                link.airtime_s, link.min_interval_s / 60.0);
  }
  std::printf("Link: %g bit/s, duty cycle %g\n", a.link_bps, a.duty);
  if (a.csv) write_text(*a.csv, format_fpga_csv(rows));
  return kOk;
}

// ---------------------------------------------------------------- report, plot

int cmd_report(const std::string& dir, const std::optional<std::string>& out_dir) {
  const auto cells = read_results_dir(dir);
  if (cells.empty()) throw DataError("no per-round result CSVs under " + dir);
  const fs::path out = out_dir ? fs::path(*out_dir) : fs::path(dir) / "report";
  bool any = false;
  for (auto mode : {PartitionMode::kNonIid, PartitionMode::kIid}) {
    bool present = false;
    for (const auto& [k, v] : cells) present = present || k.partition == mode;
    if (!present) continue;
    const auto rows = compare_to_baseline(cells, mode);
    const auto text = format_results_table(rows, mode);
    const std::string stem = std::string("results_") + std::string(partition_name(mode));
    std::cout << (any ? "\n" : "") << text;
    write_text(out / (stem + ".txt"), text);
    write_text(out / (stem + ".csv"), results_table_csv(rows));
    any = true;
  }
  const auto pairs = compare_partitions(cells);
  if (!pairs.empty()) {
    const auto text = format_partition_table(pairs);
    std::cout << "\n" << text;
    write_text(out / "partition_bias.txt", text);
    write_text(out / "partition_bias.csv", partition_table_csv(pairs));
  }
  std::fprintf(stderr, "tables written to %s\n", out.string().c_str());
  return kOk;
}

int cmd_plot(const std::string& dir, const std::optional<std::string>& out_dir) {
  const auto cells = read_results_dir(dir);
  if (cells.empty()) throw DataError("no per-round result CSVs under " + dir);
  const fs::path out = out_dir ? fs::path(*out_dir) : fs::path(dir) / "plots";
  for (const auto& f : render_plots(cells)) {
    write_text(out / f.name, f.content);
    std::cout << (out / f.name).string() << "\n";
  }
  return kOk;
}

// ----------------------------------------------------------------------- synth

struct SynthArgs {
  std::string out;
  std::vector<std::string> subsets = {"FD001", "FD002"};
  std::uint64_t seed = 7;
  std::optional<int> train_engines;
  std::optional<int> test_engines;
};

int cmd_synth(const SynthArgs& a) {
  for (auto subset : subsets_from(a.subsets)) {
    SyntheticSpec spec;
    const bool fd2 = subset == Subset::kFD002;
    spec.train_engines = a.train_engines.value_or(fd2 ? 260 : 100);
    spec.test_engines = a.test_engines.value_or(fd2 ? 259 : 100);
    spec.operating_conditions = fd2 ? 6 : 1;
    spec.seed = a.seed + (fd2 ? 1 : 0);
    write_synthetic_cmapss(a.out, subset, spec);
    std::printf("%s: %d train / %d test engines -> %s\n",
                std::string(subset_name(subset)).c_str(), spec.train_engines, spec.test_engines,
                a.out.c_str());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantized federated learning simulator for turbofan RUL estimation"};
  app.set_version_flag("--version", std::string(library_version()));
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest-check", "Parse a dataset and report protocol counts");
  c_ingest->add_option("--data", ingest.data, "Dataset root (default: $CMAPSS_ROOT)");
  c_ingest->add_option("--subset", ingest.subsets, "Subsets to check")->delimiter(',');

  RunArgs run;
  auto* c_run = app.add_subcommand("run", "Run the experiment grid");
  c_run->add_option("-c,--config", run.config, "INI config file")->check(CLI::ExistingFile);
  c_run->add_option("--data", run.data, "Dataset root (overrides $CMAPSS_ROOT and data.root)");
  c_run->add_option("-o,--output", run.output, "Results directory");
  c_run->add_option("--subset", run.subsets, "Only these subsets")->delimiter(',');
  c_run->add_option("--bits", run.bits, "Only these bit widths (32, 8, 4, 2)")->delimiter(',');
  c_run->add_option("--seed", run.seeds, "Only these seeds")->delimiter(',');
  c_run->add_option("--partition", run.partition,
                    "noniid or iid (default: both, or noniid when cells are selected)");
  c_run->add_option("--rounds", run.rounds, "Override experiment.rounds");
  c_run->add_option("-j,--workers", run.workers, "Concurrent cells");
  c_run->add_option("--client-threads", run.client_threads, "Threads per cell for local training");
  c_run->add_flag("--resume", run.resume, "Reuse complete cells already in the output directory");
  c_run->add_flag("-q,--quiet", run.quiet, "No per-cell progress lines");

  PartitionArgs part;
  auto* c_part = app.add_subcommand("partition-stats", "Per-client mean RUL and EMD");
  c_part->add_option("--data", part.data, "Dataset root (default: $CMAPSS_ROOT)");
  c_part->add_option("--subset", part.subsets, "Subsets")->delimiter(',');
  c_part->add_option("--seed", part.seed, "Experiment seed")->capture_default_str();
  c_part->add_option("--partition", part.partition, "noniid or iid")->capture_default_str();
  c_part->add_option("--clients", part.clients, "Number of clients")->capture_default_str();
  c_part->add_flag("--compare", part.compare, "Average EMD of both partitions over the default seeds");
  c_part->add_option("-o,--out", part.out, "Also write text and CSV here");

  FpgaArgs fpga;
  auto* c_fpga = app.add_subcommand("fpga", "FPGA resource and link projections");
  c_fpga->add_option("--device", fpga.device, "Device INI with [device] name/luts/dsps/bram36")
      ->check(CLI::ExistingFile);
  c_fpga->add_option("--params", fpga.params, "Parameter count")->capture_default_str();
  c_fpga->add_option("--link-bps", fpga.link_bps, "Link rate in bit/s")->capture_default_str();
  c_fpga->add_option("--duty", fpga.duty, "Duty-cycle limit")->capture_default_str();
  c_fpga->add_option("--csv", fpga.csv, "Write the projection table as CSV");

  std::string report_dir;
  std::optional<std::string> report_out;
  auto* c_report = app.add_subcommand("report", "Result tables from a results directory");
  c_report->add_option("results", report_dir, "Results directory")->required();
  c_report->add_option("-o,--out", report_out, "Output directory (default: <results>/report)");

  std::string plot_dir;
  std::optional<std::string> plot_out;
  auto* c_plot = app.add_subcommand("plot", "SVG figures from a results directory");
  c_plot->add_option("results", plot_dir, "Results directory")->required();
  c_plot->add_option("-o,--out", plot_out, "Output directory (default: <results>/plots)");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Write synthetic data in the C-MAPSS file layout");
  c_synth->add_option("out", synth.out, "Output directory")->required();
  c_synth->add_option("--subset", synth.subsets, "Subsets")->delimiter(',');
  c_synth->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  c_synth->add_option("--train-engines", synth.train_engines, "Training engines per subset");
  c_synth->add_option("--test-engines", synth.test_engines, "Test engines per subset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*c_ingest) return cmd_ingest(ingest);
    if (*c_run) return cmd_run(run);
    if (*c_part) return cmd_partition_stats(part);
    if (*c_fpga) return cmd_fpga(fpga);
    if (*c_report) return cmd_report(report_dir, report_out);
    if (*c_plot) return cmd_plot(plot_dir, plot_out);
    if (*c_synth) return cmd_synth(synth);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kRuntime;
}
