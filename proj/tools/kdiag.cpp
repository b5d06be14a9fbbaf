// kdiag: run diagnostic episodes, validate axiom files, export scenarios.
//
// Exit codes for `run`: 0 committed diagnosis, 2 no committed theory,
// 1 configuration error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kripkediag/agents.hpp"
#include "kripkediag/formula_parser.hpp"
#include "kripkediag/http_transport.hpp"
#include "kripkediag/model_io.hpp"
#include "kripkediag/scenarios.hpp"
#include "kripkediag/sim_io.hpp"

#ifndef KDIAG_DATA_DIR
#define KDIAG_DATA_DIR "."
#endif

namespace fs = std::filesystem;
using namespace kdiag;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNoDiagnosis = 2;

int fail(const std::string& what) {
  std::string line = what;
  for (auto& c : line)
    if (c == '\n' || c == '\r') c = ' ';
  std::cerr << "kdiag: error: " << line << "\n";
  return kExitConfig;
}

struct RunOptions {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string generator = "rule";
  std::string axioms = std::string(KDIAG_DATA_DIR) + "/axioms/accelerator.ax";
  std::string topology = std::string(KDIAG_DATA_DIR) + "/topology/accelerator_sector.json";
  std::string prompts = std::string(KDIAG_DATA_DIR) + "/prompts";
  std::string out_dir = ".";
  std::vector<std::string> formats{"csv", "trace-json", "model-json"};
};

sim::ScenarioSpec resolve_scenario(const std::string& scenario) {
  for (auto id : sim::kBuiltinScenarioIds)
    if (scenario == id) return sim::builtin_scenario(id);
  if (fs::exists(scenario)) return sim::load_scenario_file(scenario);
  throw sim::ScenarioError("'" + scenario + "' is neither a built-in scenario nor a readable file");
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

int cmd_run(const RunOptions& opts) {
  const std::set<std::string> known{"csv", "trace-json", "model-json", "dot"};
  std::set<std::string> formats;
  for (const auto& f : opts.formats) {
    if (!known.contains(f)) return fail("unknown output format '" + f + "'");
    formats.insert(f);
  }

  sim::ScenarioSpec spec;
  agents::SystemConfig cfg;
  std::unique_ptr<hypo::HttpChatTransport> transport;
  std::unique_ptr<hypo::RemoteGenerator> remote;
  try {
    spec = resolve_scenario(opts.scenario);
    if (opts.seed) spec.seed = *opts.seed;
    cfg.axioms = lang::load_axiom_file(opts.axioms).to_axiom_set();
    cfg.topology = agents::load_topology_file(opts.topology);
    if (opts.generator == "remote") {
      auto endpoint = hypo::endpoint_from_env();
      if (!endpoint) return fail(std::string("generator=remote requires ") + hypo::kEndpointEnv);
      transport = std::make_unique<hypo::HttpChatTransport>(*endpoint);
      remote = std::make_unique<hypo::RemoteGenerator>(*transport, hypo::load_prompts(opts.prompts));
      cfg.generator = remote.get();
    } else if (opts.generator != "rule") {
      return fail("unknown generator '" + opts.generator + "'");
    }
    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec || !fs::is_directory(opts.out_dir)) return fail("output directory '" + opts.out_dir + "' is not writable");
  } catch (const lang::AxiomFileError& e) {
    return fail(opts.axioms + ":" + e.what());
  } catch (const std::exception& e) {
    return fail(e.what());
  }

  std::optional<agents::Episode> result;
  try {
    result = agents::run_episode_full(spec, cfg);
  } catch (const agents::ConfigError& e) {
    return fail(e.what());
  }
  const agents::Episode& episode = *result;

  try {
    const fs::path dir(opts.out_dir);
    if (formats.contains("csv")) write_file(dir / "timeseries.csv", sim::to_csv(episode.records));
    if (formats.contains("trace-json")) write_file(dir / "diagnosis.json", agents::dump_diagnosis(episode.diagnosis));
    if (formats.contains("model-json"))
      write_file(dir / "final_model.json", modal::dump_model(episode.diagnosis.final_model));
    if (formats.contains("dot")) write_file(dir / "model.dot", modal::to_dot(episode.diagnosis.final_model));
  } catch (const std::exception& e) {
    return fail(e.what());
  }

  if (!episode.diagnosis.committed()) {
    std::cout << "ROOT CAUSE: none\n";
    return kExitNoDiagnosis;
  }
  std::cout << "ROOT CAUSE: " << episode.diagnosis.root_cause->name() << "\n";
  return kExitOk;
}

int cmd_check_axioms(const std::string& path, bool unicode) {
  try {
    auto file = lang::load_axiom_file(path);
    for (const auto& e : file.entries)
      std::cout << e.label << ": "
                << lang::render(e.formula, unicode ? lang::RenderStyle::Unicode : lang::RenderStyle::Ascii) << "\n";
    return kExitOk;
  } catch (const lang::AxiomFileError& e) {
    return fail(path + ":" + e.what());
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int cmd_show_scenario(const std::string& id) {
  try {
    std::cout << sim::to_json(sim::builtin_scenario(id)).dump(2) << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modal-logic fault diagnosis for a simulated accelerator sector"};
  app.require_subcommand(1);

  RunOptions run;
  std::string format_list;
  auto* run_cmd = app.add_subcommand("run", "Run one diagnostic episode");
  run_cmd->add_option("--scenario", run.scenario, "Built-in scenario id or scenario JSON file")->required();
  run_cmd->add_option("--seed", run.seed, "Override the scenario noise seed");
  run_cmd->add_option("--generator", run.generator, "Hypothesis generator: rule or remote")
      ->check(CLI::IsMember({"rule", "remote"}));
  run_cmd->add_option("--axioms", run.axioms, "Axiom file");
  run_cmd->add_option("--topology", run.topology, "Topology JSON file");
  run_cmd->add_option("--prompts", run.prompts, "Directory with remote prompt templates");
  run_cmd->add_option("--out", run.out_dir, "Output directory");
  run_cmd->add_option("--formats", format_list, "Comma-separated subset of csv,trace-json,model-json,dot");

  std::string axiom_path;
  bool unicode = false;
  auto* check_cmd = app.add_subcommand("check-axioms", "Parse an axiom file and print canonical forms");
  check_cmd->add_option("path", axiom_path, "Axiom file")->required();
  check_cmd->add_flag("--unicode", unicode, "Render with modal symbols instead of ASCII");

  std::string scenario_id;
  auto* show_cmd = app.add_subcommand("show-scenario", "Print a built-in scenario as JSON");
  show_cmd->add_option("id", scenario_id, "Built-in scenario id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail(e.what());
  }

  if (*run_cmd) {
    if (!format_list.empty()) {
      run.formats.clear();
      std::stringstream ss(format_list);
      for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) run.formats.push_back(item);
    }
    return cmd_run(run);
  }
  if (*check_cmd) return cmd_check_axioms(axiom_path, unicode);
  if (*show_cmd) return cmd_show_scenario(scenario_id);
  return kExitConfig;
}
