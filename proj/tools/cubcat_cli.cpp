// cubcat: index pairs, Morse decompositions, Conley indices, and category
// bounds for multivalued cell maps, driven by a JSON config.
//
// Exit codes: 0 all requested verdicts pass, 1 stage error or failed verdict,
// 2 malformed config or usage.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cubcat/report.hpp"

namespace {

struct Opts {
  std::string config, output, dot;
  std::optional<std::uint64_t> seed;
};

bool write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    std::cerr << "cannot write '" << path << "'\n";
    return false;
  }
  out << text;
  return true;
}

bool emit(const Opts& o, const std::string& text) {
  if (o.output.empty()) {
    std::cout << text;
    return true;
  }
  return write_text(o.output, text);
}

int run_command(const Opts& o, cubcat::RunRequest req) {
  try {
    cubcat::Config cfg = cubcat::load_config_file(o.config);
    if (o.seed) cfg.seed = *o.seed;
    cubcat::RunResult r = cubcat::run_pipeline(cfg, req);
    if (!emit(o, cubcat::report_json(r).dump(2) + "\n")) return 2;
    if (!o.dot.empty()) {
      if (!r.stage_morse.ok()) {
        std::cerr << "no Morse decomposition to export\n";
        return 1;
      }
      if (!write_text(o.dot, cubcat::export_dot(r))) return 2;
    }
    return cubcat::overall_pass(r) ? 0 : 1;
  } catch (const cubcat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
}

int verify_command(const Opts& o) {
  std::ifstream in(o.config);
  if (!in) {
    std::cerr << "cannot open report '" << o.config << "'\n";
    return 2;
  }
  nlohmann::json rep;
  try {
    in >> rep;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "report is not valid JSON: " << e.what() << "\n";
    return 2;
  }
  std::vector<cubcat::ReCheck> checks;
  try {
    checks = cubcat::verify_report(rep);
  } catch (const cubcat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  bool all_ok = true;
  nlohmann::json out_checks = nlohmann::json::array();
  for (const auto& c : checks) {
    all_ok = all_ok && c.ok;
    std::cout << c.name << ": " << (c.ok ? "ok" : "FAIL");
    if (!c.ok && !c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << "\n";
    out_checks.push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
  }
  if (!o.output.empty()) {
    nlohmann::json out = {{"schema", "v1"}, {"checks", out_checks}, {"ok", all_ok}};
    if (!write_text(o.output, out.dump(2) + "\n")) return 2;
  }
  return all_ok ? 0 : 1;
}

int oracle_command(const Opts& o) {
  try {
    cubcat::Config cfg = cubcat::load_config_file(o.config);
    if (o.seed) cfg.seed = *o.seed;
    cubcat::BuiltSystem sys = cubcat::build_from_config(cfg);
    cubcat::CellSet S = cubcat::config_S(cfg, sys.grid);
    cubcat::HlsOracle oracle = cubcat::HlsOracle::make(sys.grid, S, cfg.oracle_max_size);
    auto nu = oracle.nu(S);
    cubcat::AxiomCheck ax = cubcat::axioms_check(oracle, &sys.F, cfg.seed, 25);
    nlohmann::json out;
    out["schema"] = "v1";
    nlohmann::json oj;
    oj["ambient_cells"] = S.size();
    oj["max_pieces"] = cfg.oracle_max_size;
    if (nu)
      oj["nu"] = *nu;
    else
      oj["nu"] = nullptr;  // exceeds max_pieces: unknown, not infinite
    oj["axioms"] = {{"samples", ax.samples}, {"violations", ax.violations}};
    out["oracle"] = oj;
    if (!emit(o, out.dump(2) + "\n")) return 2;
    return nu && ax.ok() ? 0 : 1;
  } catch (const cubcat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "oracle error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conley indices, Morse decompositions, and category bounds on cubical grids"};
  app.require_subcommand(1);

  Opts o;
  std::uint64_t seed_val = 0;

  auto add_common = [&](CLI::App* sc, const char* config_help, bool with_dot) {
    sc->add_option("--config", o.config, config_help)->required();
    sc->add_option("--output", o.output, "write the JSON result here instead of stdout");
    if (with_dot)
      sc->add_option("--dot", o.dot, "export the condensation digraph to this path");
    sc->add_option("--seed", seed_val, "override the config seed");
    return sc;
  };

  auto* c_run = add_common(app.add_subcommand("run", "all stages and verdicts"),
                           "run configuration (JSON)", true);
  auto* c_pair = add_common(app.add_subcommand("index-pair", "index pair only"),
                            "run configuration (JSON)", false);
  auto* c_morse = add_common(app.add_subcommand("morse", "index pair and Morse decomposition"),
                             "run configuration (JSON)", true);
  auto* c_conley = add_common(app.add_subcommand("conley", "index pair and index homology"),
                              "run configuration (JSON)", false);
  auto* c_ls = add_common(app.add_subcommand("ls-bounds", "category bounds and verdicts"),
                          "run configuration (JSON)", true);
  auto* c_verify = add_common(app.add_subcommand("verify", "recompute a report's claims"),
                              "report to verify (JSON)", false);
  auto* c_oracle = add_common(
      app.add_subcommand("oracle-hls", "exhaustive category bound on a small ambient set"),
      "run configuration (JSON)", false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (auto* sc : {c_run, c_pair, c_morse, c_conley, c_ls, c_verify, c_oracle})
    if (sc->parsed() && sc->count("--seed") > 0) o.seed = seed_val;

  cubcat::RunRequest all{true, true, true};
  if (c_run->parsed()) return run_command(o, all);
  if (c_pair->parsed()) return run_command(o, {false, false, false});
  if (c_morse->parsed()) return run_command(o, {true, false, false});
  if (c_conley->parsed()) return run_command(o, {false, true, false});
  if (c_ls->parsed()) return run_command(o, all);
  if (c_verify->parsed()) return verify_command(o);
  return oracle_command(o);
}
