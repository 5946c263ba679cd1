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

#include "aerofl/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "aerofl/error.hpp"

namespace aerofl {

namespace {

namespace pt = boost::property_tree;

std::vector<std::string> split_list(const std::string& key, const std::string& value) {
  std::vector<std::string> parts;
  boost::split(parts, value, boost::is_any_of(", \t"), boost::token_compress_on);
  std::erase_if(parts, [](const std::string& s) { return s.empty(); });
  if (parts.empty()) throw ConfigError(key + ": empty list");
  return parts;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const auto t = boost::to_lower_copy(text);
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

template <typename Fn>
auto rethrow_with_key(const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.rfind(key, 0) == 0) throw;
    throw ConfigError(key + ": " + what);
  }
}

std::vector<Subset> parse_subsets(const std::string& key, const std::string& v) {
  std::vector<Subset> out;
  for (const auto& s : split_list(key, v))
    out.push_back(rethrow_with_key(key, [&] { return parse_subset(s); }));
  return out;
}

std::vector<BitWidth> parse_bits(const std::string& key, const std::string& v) {
  std::vector<BitWidth> out;
  for (const auto& s : split_list(key, v))
    out.push_back(rethrow_with_key(key, [&] { return parse_bit_width(s); }));
  return out;
}

std::string join_subsets(const std::vector<Subset>& v) {
  std::string out;
  for (auto s : v) out += (out.empty() ? "" : ", ") + std::string(subset_name(s));
  return out;
}

std::string join_bits(const std::vector<BitWidth>& v) {
  std::string out;
  for (auto b : v) out += (out.empty() ? "" : ", ") + std::to_string(bits_of(b));
  return out;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"data.root", [](RunConfig& c, auto&, auto& v) { c.data_root = v; }},
      {"data.subsets", [](RunConfig& c, auto& k, auto& v) { c.subsets = parse_subsets(k, v); }},
      {"experiment.bits", [](RunConfig& c, auto& k, auto& v) { c.bits = parse_bits(k, v); }},
      {"experiment.seeds",
       [](RunConfig& c, auto& k, auto& v) {
         c.seeds.clear();
         for (const auto& s : split_list(k, v))
           c.seeds.push_back(parse_number<std::uint64_t>(k, s));
       }},
      {"experiment.rounds", [](RunConfig& c, auto& k, auto& v) { c.rounds = parse_number<int>(k, v); }},
      {"experiment.local_epochs",
       [](RunConfig& c, auto& k, auto& v) { c.local_epochs = parse_number<int>(k, v); }},
      {"experiment.batch_size",
       [](RunConfig& c, auto& k, auto& v) { c.batch_size = parse_number<int>(k, v); }},
      {"experiment.learning_rate",
       [](RunConfig& c, auto& k, auto& v) { c.learning_rate = parse_number<double>(k, v); }},
      {"experiment.clients", [](RunConfig& c, auto& k, auto& v) { c.clients = parse_number<int>(k, v); }},
      {"experiment.noniid", [](RunConfig& c, auto& k, auto& v) { c.noniid = parse_bool(k, v); }},
      {"experiment.iid", [](RunConfig& c, auto& k, auto& v) { c.iid = parse_bool(k, v); }},
      {"experiment.iid_subsets",
       [](RunConfig& c, auto& k, auto& v) { c.iid_subsets = parse_subsets(k, v); }},
      {"experiment.iid_bits", [](RunConfig& c, auto& k, auto& v) { c.iid_bits = parse_bits(k, v); }},
      {"run.output", [](RunConfig& c, auto&, auto& v) { c.output = v; }},
      {"run.workers", [](RunConfig& c, auto& k, auto& v) { c.workers = parse_number<int>(k, v); }},
      {"run.client_threads",
       [](RunConfig& c, auto& k, auto& v) { c.client_threads = parse_number<int>(k, v); }},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  if (subsets.empty() && noniid) throw ConfigError("data.subsets: empty");
  if (bits.empty() && noniid) throw ConfigError("experiment.bits: empty");
  if (seeds.empty()) throw ConfigError("experiment.seeds: empty");
  if (workers < 1) throw ConfigError("run.workers: must be >= 1");
  if (!noniid && !iid) throw ConfigError("experiment.noniid/iid: both disabled, nothing to run");
  ExperimentConfig probe;
  probe.rounds = rounds;
  probe.local_epochs = local_epochs;
  probe.batch_size = batch_size;
  probe.learning_rate = learning_rate;
  probe.clients = clients;
  probe.client_threads = client_threads;
  try {
    probe.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("experiment: ") + e.what());
  }
}

RunConfig parse_run_config(const std::string& ini_text) {
  pt::ptree tree;
  std::istringstream in(ini_text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig cfg;
  const auto& table = setters();
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError(section + ": key outside of any section");
    }
    for (const auto& [name, node] : body) {
      const std::string key = section + "." + name;
      auto it = table.find(key);
      if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
      it->second(cfg, key, boost::trim_copy(node.data()));
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

ConfigEcho echo_config(const RunConfig& c) {
  ConfigEcho e;
  e["data.root"] = c.data_root.string();
  e["data.subsets"] = join_subsets(c.subsets);
  e["experiment.bits"] = join_bits(c.bits);
  std::string seeds;
  for (auto s : c.seeds) seeds += (seeds.empty() ? "" : ", ") + std::to_string(s);
  e["experiment.seeds"] = seeds;
  e["experiment.rounds"] = std::to_string(c.rounds);
  e["experiment.local_epochs"] = std::to_string(c.local_epochs);
  e["experiment.batch_size"] = std::to_string(c.batch_size);
  e["experiment.learning_rate"] = format_double(c.learning_rate);
  e["experiment.clients"] = std::to_string(c.clients);
  e["experiment.noniid"] = c.noniid ? "true" : "false";
  e["experiment.iid"] = c.iid ? "true" : "false";
  e["experiment.iid_subsets"] = join_subsets(c.iid_subsets);
  e["experiment.iid_bits"] = join_bits(c.iid_bits);
  e["run.output"] = c.output.string();
  e["run.workers"] = std::to_string(c.workers);
  e["run.client_threads"] = std::to_string(c.client_threads);
  return e;
}

std::string to_ini(const RunConfig& config) {
  std::string out;
  // Section order as documented rather than alphabetical.
  for (const char* section : {"data", "experiment", "run"}) {
    out += std::string(out.empty() ? "" : "\n") + "[" + section + "]\n";
    for (const auto& [key, value] : echo_config(config)) {
      const auto dot = key.find('.');
      if (key.substr(0, dot) != section) continue;
      if (key == "data.root" && value.empty()) continue;
      out += key.substr(dot + 1) + " = " + value + "\n";
    }
  }
  return out;
}

std::filesystem::path resolve_data_root(const RunConfig& config,
                                        const std::optional<std::string>& cli_root) {
  if (cli_root && !cli_root->empty()) return *cli_root;
  if (const char* env = std::getenv(kDataRootEnv); env != nullptr && *env != '\0') {
    return env;
  }
  if (!config.data_root.empty()) return config.data_root;
  throw ConfigError(std::string("no dataset root: pass --data, set ") + kDataRootEnv +
                    ", or set data.root in the config");
}

ExperimentConfig cell_config(const RunConfig& run, Subset subset, BitWidth bits,
                             PartitionMode mode, std::uint64_t seed) {
  ExperimentConfig c;
  c.subset = subset;
  c.bits = bits;
  c.partition = mode;
  c.rounds = run.rounds;
  c.local_epochs = run.local_epochs;
  c.batch_size = run.batch_size;
  c.learning_rate = run.learning_rate;
  c.clients = run.clients;
  c.seed = seed;
  c.client_threads = run.client_threads;
  return c;
}

}  // namespace aerofl
