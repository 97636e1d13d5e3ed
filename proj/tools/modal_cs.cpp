// modal-cs: runs the synthetic and field-data experiments and writes result
// tables and plot data.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "modal_cs/error.hpp"
#include "modal_cs/harness/config.hpp"
#include "modal_cs/harness/csv.hpp"
#include "modal_cs/harness/experiments.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumeric = 3, kIo = 4 };

int exit_code(modal_cs::ErrorKind kind) {
  using modal_cs::ErrorKind;
  switch (kind) {
    case ErrorKind::kConfigError: return kConfig;
    case ErrorKind::kIoError:
    case ErrorKind::kParseError:
    case ErrorKind::kRaggedRows: return kIo;
    default: return kNumeric;
  }
}

modal_cs::Json read_config(const std::string& path) {
  const std::string text = modal_cs::read_text_file(path);
  try {
    return modal_cs::Json::parse(text);
  } catch (const modal_cs::Json::parse_error& e) {
    throw modal_cs::Error(modal_cs::ErrorKind::kConfigError, path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mode-shape recovery from compressive vibration measurements"};
  app.require_subcommand(1);

  std::string experiment;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool header = false;
  auto* run = app.add_subcommand("run", "Run an experiment and write results.csv, manifest.json and figures/");
  run->add_option("--experiment", experiment, "exp1 | exp2 | exp3 | exp4 | exp5 | realdata")->required();
  run->add_option("--config", config_path, "JSON overrides on top of the experiment preset");
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--seed", seed, "replaces the config seed");
  run->add_flag("--header", header, "sensor CSV has a header row (realdata)");

  std::string preset_id;
  auto* preset = app.add_subcommand("preset", "Print the default config of an experiment");
  preset->add_option("experiment", preset_id, "experiment id")->required();

  app.add_subcommand("list", "List experiment ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (app.got_subcommand("list")) {
      for (const auto& id : modal_cs::experiment_ids()) std::cout << id << '\n';
      return kOk;
    }
    if (app.got_subcommand("preset")) {
      std::cout << modal_cs::resolve_config(preset_id).dump(2) << '\n';
      return kOk;
    }
    modal_cs::Json user = modal_cs::Json::object();
    if (!config_path.empty()) user = read_config(config_path);
    const auto cfg = modal_cs::resolve_config(experiment, user, seed);
    const auto table = modal_cs::run_experiment(cfg, header);
    modal_cs::write_results(table, out_dir);
    std::cout << "wrote " << table.summary.size() << " rows to " << out_dir << "/results.csv\n";
    return kOk;
  } catch (const modal_cs::Error& e) {
    std::cerr << "modal-cs: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "modal-cs: " << e.what() << '\n';
    return kNumeric;
  }
}
