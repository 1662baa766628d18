#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rcm/experiment.hpp"

using namespace rcm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rcm_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::string> errors_of(const json& doc, std::optional<ExperimentKind> kind = std::nullopt) {
  try {
    parse_config(doc, kind);
  } catch (const ConfigError& e) {
    return e.messages();
  }
  return {};
}

bool mentions(const std::vector<std::string>& msgs, const std::string& needle) {
  for (const auto& m : msgs) {
    if (m.find(needle) != std::string::npos) return true;
  }
  return false;
}

const json kUniform = {{"type", "uniform"}, {"lo", 0.2}, {"hi", 1.0}};

}  // namespace

TEST_CASE("minimal relax config is filled with defaults") {
  const ExperimentConfig cfg =
      parse_config(R"({"schema_version": 1, "experiment": "relax", "d": 2, "L": 16,
                       "law": {"type": "bernoulli", "p": 0.5, "lo": 0, "hi": 1}})");
  CHECK(cfg.kind == ExperimentKind::kRelax);
  CHECK(cfg.reps == 20);
  CHECK(cfg.dt == 0.125);
  CHECK(cfg.moments == std::vector<double>{1.0});
  CHECK(cfg.times.front() == 0.0);
  CHECK(cfg.times.back() == doctest::Approx(16.0));
  CHECK(cfg.fit_lo == 4.0);
  CHECK(cfg.fit_hi == 16.0);
  CHECK(cfg.observable.has_value());
  CHECK(cfg.warnings.empty());
  const json echo = cfg.echo();
  CHECK(echo["reps"] == 20);
  CHECK(echo["law"].size() == 2);
  CHECK(echo["observable"]["type"] == "centered_conductance");
  // the echo parses back to the same config
  CHECK(parse_config(echo).echo() == echo);
}

TEST_CASE("validation errors are collected") {
  const auto l2 = errors_of({{"schema_version", 1}, {"experiment", "relax"}, {"d", 2}, {"L", 2}, {"law", kUniform}});
  CHECK(mentions(l2, "L >= 3"));

  const auto dt = errors_of({{"schema_version", 1}, {"experiment", "relax"}, {"d", 3}, {"L", 8}, {"dt", 1.0}, {"law", kUniform}});
  CHECK(mentions(dt, "dt <= 1/(2d)"));

  const auto many = errors_of({{"schema_version", 2}, {"experiment", "relax"}, {"d", 2}, {"L", 2}, {"dt", 1.0},
                               {"law", kUniform}, {"lenght", 3}, {"reps", 1}});
  CHECK(mentions(many, "schema_version"));
  CHECK(mentions(many, "unknown key 'lenght'"));
  CHECK(mentions(many, "L >= 3"));
  CHECK(mentions(many, "dt <= 1/(2d)"));
  CHECK(mentions(many, "reps"));

  const auto missing = errors_of({{"experiment", "weights"}});
  CHECK(mentions(missing, "'schema_version'"));
  CHECK(mentions(missing, "'d'"));
  CHECK(mentions(missing, "'L'"));
  CHECK(mentions(missing, "'law'"));

  CHECK(mentions(errors_of({{"schema_version", 1}, {"d", 3}, {"L", 300}, {"law", kUniform}}, ExperimentKind::kWeights),
                 "2^24"));
  CHECK(mentions(errors_of({{"schema_version", 1}, {"experiment", "kernel"}, {"d", 2}, {"L", 8}, {"law", kUniform}},
                           ExperimentKind::kRelax),
                 "requested 'relax'"));
  // keys of another experiment kind are typos here
  CHECK(mentions(errors_of({{"schema_version", 1}, {"d", 2}, {"L", 8}, {"law", kUniform}, {"mu", 0.1}},
                           ExperimentKind::kRelax),
                 "unknown key 'mu'"));
  CHECK_THROWS_AS(parse_config(std::string("{not json")), ConfigError);
}

TEST_CASE("long horizons are flagged") {
  const ExperimentConfig cfg = parse_config(
      json{{"schema_version", 1}, {"d", 2}, {"L", 8}, {"law", kUniform}, {"times", {1.0, 10.0}}}, ExperimentKind::kKernel);
  REQUIRE(cfg.warnings.size() == 1);
  CHECK(cfg.warnings[0].find("(L/4)^2") != std::string::npos);
}

TEST_CASE("git blob hash") {
  CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("plot data") {
  const fs::path dir = scratch("plot");
  fs::create_directories(dir);
  std::vector<double> t, v;
  for (double x = 1.0; x <= 64.0; x *= 2.0) {
    t.push_back(x);
    v.push_back(std::pow(x, -1.5));
  }
  const PlotDataReport r = emit_plot_data(t, v, dir / "a.dat");
  REQUIRE(r.exponent);
  CHECK(*r.exponent == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(slurp(dir / "a.dat").find("# fitted_exponent 1.5") != std::string::npos);

  t.push_back(128.0);
  v.push_back(0.0);
  t.insert(t.begin(), 0.0);
  v.insert(v.begin(), 1.0);
  const PlotDataReport dropped = emit_plot_data(t, v, dir / "b.dat");
  CHECK(dropped.dropped == 2);
  CHECK(dropped.rows == 7);
  CHECK(slurp(dir / "b.dat").find("# dropped_nonpositive 2") != std::string::npos);

  CHECK_THROWS_AS(emit_plot_data({}, {}, dir / "c.dat"), ValidationError);
  CHECK_THROWS_AS(emit_plot_data({1.0}, {1.0}, dir / "missing" / "x.dat"), Error);
}

TEST_CASE("kernel run conserves mass") {
  const fs::path dir = scratch("kernel");
  ExperimentConfig cfg = parse_config(json{{"schema_version", 1},
                                           {"d", 2},
                                           {"L", 16},
                                           {"law", {{"type", "constant"}, {"c", 1.0}}},
                                           {"output", dir.string()}},
                                      ExperimentKind::kKernel);
  run_experiment(cfg);
  std::istringstream csv(slurp(dir / "kernel.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "t,p00,mass,l2_half_identity_gap");
  int rows = 0;
  while (std::getline(csv, line)) {
    std::vector<double> cols;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cols.push_back(std::stod(cell));
    REQUIRE(cols.size() == 4);
    CHECK(std::abs(cols[2] - 1.0) <= 1e-9);
    ++rows;
  }
  CHECK(rows == static_cast<int>(cfg.times.size()));
  const json manifest = json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["config"] == cfg.echo());
  CHECK(manifest["config_hash"] == git_blob_hash(cfg.echo().dump()));
  CHECK(manifest.contains("wall_time_seconds"));
}

TEST_CASE("relax run: verdict, determinism, hash sensitivity") {
  const json base{{"schema_version", 1},
                  {"d", 2},
                  {"L", 8},
                  {"reps", 3},
                  {"law", {{"type", "bernoulli"}, {"p", 0.5}, {"lo", 0.0}, {"hi", 1.0}}},
                  {"t_max", 4.0},
                  {"num_times", 6},
                  {"fit_window", {0.5, 4.0}}};
  json a = base, b = base;
  a["output"] = scratch("relax_a").string();
  b["output"] = scratch("relax_b").string();
  b["threads"] = 3;
  run_experiment(parse_config(a, ExperimentKind::kRelax));
  run_experiment(parse_config(b, ExperimentKind::kRelax));
  for (const char* f : {"moments.csv", "fits.csv", "plot_p1.dat"}) {
    CHECK(slurp(fs::path(a["output"].get<std::string>()) / f) == slurp(fs::path(b["output"].get<std::string>()) / f));
  }
  const json manifest = json::parse(slurp(fs::path(a["output"].get<std::string>()) / "manifest.json"));
  CHECK(manifest["moment_condition_verdict"] == "FAIL");

  json c = a;
  c["seed"] = 2;
  CHECK(git_blob_hash(parse_config(c, ExperimentKind::kRelax).echo().dump()) !=
        git_blob_hash(parse_config(a, ExperimentKind::kRelax).echo().dump()));
}
