// rcm_lab: batch driver for the random conductance lab.
//
//   rcm_lab relax --config relax.json --out runs/relax --seed 7 --threads 4
//
// Exit status: 0 success, 2 invalid config, 3 runtime failure. Failures print
// one JSON object on stderr.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rcm/experiment.hpp"

using nlohmann::json;

namespace {

int fail(int code, const char* kind, const std::vector<std::string>& messages) {
  json err{{"status", "error"}, {"error", kind}, {"messages", messages}};
  std::cerr << err.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random conductance model lab"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;

  for (const char* name : {"relax", "kernel", "corrector", "weights", "necessity"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--threads", threads, "worker threads, 0 = all cores (overrides the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "usage", {e.what()});
  }

  const std::string kind_name = app.get_subcommands().front()->get_name();
  const rcm::ExperimentKind kind = *rcm::parse_kind(kind_name);

  rcm::ExperimentConfig cfg;
  try {
    std::ifstream in(config_path);
    if (!in) return fail(2, "validation", {"cannot read config file " + config_path});
    std::stringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
      doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      return fail(2, "validation", {std::string("config is not valid JSON: ") + e.what()});
    }
    if (doc.is_object()) {
      if (seed) doc["seed"] = *seed;
      if (out) doc["output"] = *out;
      if (threads) doc["threads"] = *threads;
    }
    cfg = rcm::parse_config(doc, kind);
  } catch (const rcm::ConfigError& e) {
    return fail(2, "validation", e.messages());
  } catch (const rcm::ValidationError& e) {
    return fail(2, "validation", {e.what()});
  }

  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";

  try {
    const rcm::RunReport report = rcm::run_experiment(cfg);
    for (const auto& p : report.outputs) std::cout << p.string() << "\n";
  } catch (const rcm::ValidationError& e) {
    return fail(2, "validation", {e.what()});
  } catch (const std::exception& e) {
    return fail(3, "runtime", {e.what()});
  }
  return 0;
}
