// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

// sarcr: command-line driver over the C interface.
//
//   sarcr <command> --config run.json --out results/ [--seed N] [--jobs N]
//                   [--set key.path=value ...]
//
// Every run writes results/manifest.json holding the resolved config, the
// seed, and git-style hashes of every input file the config names.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sarcr/sarcr.h"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

int exitCode(sarcr_status s) {
  switch (s) {
    case SARCR_OK: return 0;
    case SARCR_ERR_INVALID_ARGUMENT:
    case SARCR_ERR_CONFIG: return kExitConfig;
    case SARCR_ERR_DATA:
    case SARCR_ERR_IO: return kExitData;
    case SARCR_ERR_NUMERICAL: return kExitNumerical;
    case SARCR_ERR_INTERNAL: break;
  }
  return 1;
}

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --set a.b.c=value; value is JSON when it parses, a string otherwise.
void applyOverride(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got " + assignment);
  const std::string path = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  Json* node = &config;
  std::stringstream ss(path);
  std::string key;
  std::vector<std::string> keys;
  while (std::getline(ss, key, '.')) keys.push_back(key);
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    if (!node->contains(keys[i])) (*node)[keys[i]] = Json::object();
    node = &(*node)[keys[i]];
    if (!node->is_object()) throw ConfigError("--set: " + keys[i] + " is not a section");
  }
  (*node)[keys.back()] = value;
}

void setIfAbsent(Json& config, const std::vector<std::string>& path, const Json& value) {
  Json* node = &config;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!node->contains(path[i])) (*node)[path[i]] = Json::object();
    node = &(*node)[path[i]];
  }
  if (!node->contains(path.back())) (*node)[path.back()] = value;
}

// Routes the global seed and worker cap into the sections that use them.
void applyGlobals(Json& config, const std::string& command, std::uint64_t seed, bool haveSeed, int jobs) {
  if (haveSeed) {
    if (command == "synth" || command == "desk") setIfAbsent(config, {"synth", "seed"}, seed);
    if (command == "attack" || command == "desk") {
      setIfAbsent(config, {"attack", "de", "seed"}, seed);
      setIfAbsent(config, {"attack", "pso", "seed"}, seed);
    }
  }
  if (jobs > 0 && (command == "attack" || command == "desk")) {
    setIfAbsent(config, {"attack", "de", "jobs"}, jobs);
    setIfAbsent(config, {"attack", "pso", "jobs"}, jobs);
  }
}

std::string hashOf(const std::string& path) {
  char hex[41];
  if (sarcr_hash_file(path.c_str(), hex) != SARCR_OK) return "";
  return hex;
}

// Hashes every existing file named by a string in the config; directories
// contribute each regular file below them.
void collectInputs(const Json& node, Json& inputs) {
  if (node.is_object() || node.is_array()) {
    for (const auto& child : node) collectInputs(child, inputs);
    return;
  }
  if (!node.is_string()) return;
  const std::string p = node.get<std::string>();
  std::error_code ec;
  if (p.empty() || !fs::exists(p, ec)) return;
  if (fs::is_regular_file(p, ec)) {
    inputs[p] = hashOf(p);
  } else if (fs::is_directory(p, ec)) {
    std::vector<std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(p, ec)) {
      if (e.is_regular_file()) files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) inputs[f] = hashOf(f);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corner-reflector attacks on SAR image classifiers"};
  app.require_subcommand(1);
  std::string configPath, outDir = "out";
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  int jobs = 0;
  app.set_version_flag("--version", std::string(sarcr_version()));

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"synth", "Render a synthetic dataset"},
      {"train", "Train the reference prototype classifier"},
      {"simulate", "Image a reflector configuration from given aspects"},
      {"attack", "Optimize reflector parameters against a classifier"},
      {"evaluate", "Fooling rates and transfer matrix of saved attacks"},
      {"bbox", "Target bounding boxes and overlays"},
      {"desk", "End-to-end synthetic attack experiment"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", configPath, "JSON config file");
    sub->add_option("-o,--out", outDir, "Output directory");
    sub->add_option("--set", overrides, "Override a config key, e.g. --set attack.reflectors=8");
    sub->add_option("--seed", seed, "Global seed");
    sub->add_option("--jobs", jobs, "Maximum worker threads")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0; usage errors share the config exit code.
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  const bool haveSeed = app.get_subcommands().front()->count("--seed") > 0;

  Json config = Json::object();
  try {
    if (!configPath.empty()) {
      std::ifstream in(configPath);
      if (!in) throw ConfigError("cannot read config " + configPath);
      config = Json::parse(in);
      if (!config.is_object()) throw ConfigError("config must be a JSON object");
    }
    for (const auto& o : overrides) applyOverride(config, o);
    applyGlobals(config, command, seed, haveSeed, jobs);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }

  std::error_code ec;
  fs::create_directories(outDir, ec);
  if (ec) {
    std::fprintf(stderr, "cannot create %s: %s\n", outDir.c_str(), ec.message().c_str());
    return kExitData;
  }
  Json manifest = {{"command", command}, {"config", config}, {"seed", haveSeed ? Json(seed) : Json(nullptr)}};
  Json inputs = Json::object();
  if (!configPath.empty()) inputs[configPath] = hashOf(configPath);
  collectInputs(config, inputs);
  manifest["inputs"] = inputs;
  std::ofstream(outDir + "/manifest.json") << manifest.dump(2) << "\n";

  char* summary = nullptr;
  const sarcr_status status = sarcr_run(command.c_str(), config.dump().c_str(), outDir.c_str(), &summary);
  if (status != SARCR_OK) {
    std::fprintf(stderr, "%s failed [%s]: %s\n", command.c_str(), sarcr_last_error_kind(), sarcr_last_error());
    return exitCode(status);
  }
  std::printf("%s\n", Json::parse(summary).dump(2).c_str());
  sarcr_string_free(summary);
  return 0;
}
