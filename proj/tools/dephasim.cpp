// dephasim: command-line front end.
//
//   dephasim run --config <path> --out <path>
//   dephasim preset --name <id> --out <path>
//   dephasim converge --config <path>
//
// Exit status: 0 success, 1 invalid input, 2 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dephasim/dephasim.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

dephasim::RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dephasim::Error(dephasim::ErrorCode::IoError, "cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return dephasim::parse_config(text.str(), std::filesystem::path(path).parent_path());
}

void write_rows(const dephasim::RunConfig& cfg, const std::string& out) {
  const dephasim::SweepModel model = dephasim::build_model(cfg);
  for (const auto& note : model.notes) std::cerr << "note: " << note << "\n";
  const auto rows = dephasim::run_sweep(model, cfg);
  if (out == "-") {
    dephasim::emit_csv(rows, std::cout);
  } else {
    dephasim::emit_csv(rows, std::filesystem::path(out));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement and decoherence in time-dependent pure dephasing"};
  app.require_subcommand(1);

  std::string config_path, out_path, preset_name;

  auto* run = app.add_subcommand("run", "Sweep a JSON configuration and write CSV");
  run->add_option("--config", config_path, "Run configuration (JSON)")->required();
  run->add_option("--out", out_path, "Output CSV path, '-' for stdout")->required();

  auto* preset = app.add_subcommand("preset", "Sweep a built-in figure preset and write CSV");
  preset->add_option("--name", preset_name, "Preset id")
      ->required()
      ->check(CLI::IsMember(dephasim::preset_names()));
  preset->add_option("--out", out_path, "Output CSV path, '-' for stdout")->required();

  auto* converge = app.add_subcommand("converge", "Compare a sweep at cutoff and 2 x cutoff");
  converge->add_option("--config", config_path, "Run configuration (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*run) {
      write_rows(load_config(config_path), out_path);
    } else if (*preset) {
      write_rows(dephasim::preset(preset_name), out_path);
    } else if (*converge) {
      dephasim::print_convergence(dephasim::convergence_report(load_config(config_path)), std::cout);
    }
  } catch (const dephasim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_validation() ? kExitValidation : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
