#pragma once

// Staged run: system build, index pair, Morse decomposition, index homology,
// category bounds. A failed stage is recorded and later stages are skipped.

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "cubcat/category.hpp"
#include "cubcat/config.hpp"
#include "cubcat/homology.hpp"
#include "cubcat/isolation.hpp"
#include "cubcat/morse.hpp"
#include "cubcat/quotient.hpp"
#include "cubcat/simplicial.hpp"

namespace cubcat {

struct RunRequest {
  bool morse = true;
  bool conley = true;
  bool category = true;  // implies morse and conley
};

struct Stage {
  std::string status = "not-applicable";  // ok | error | not-applicable
  std::string error;

  bool ok() const { return status == "ok"; }
  void fail(const std::string& msg) {
    status = "error";
    error = msg;
  }
};

struct RunResult {
  Config cfg;
  RunRequest req;
  BuiltSystem sys;
  nlohmann::json map_doc;  // resolved explicit-map document, when one was used

  Stage stage_map, stage_pair, stage_morse, stage_conley, stage_category;
  std::vector<std::pair<std::string, double>> timings;  // stage name, ms

  CellSet S;
  IndexPair pair;
  ValidationReport validation;

  CellSet i_plus;
  MorseDecomposition morse;

  BettiVector betti;
  int euler = 0;
  int cup_len = 0;
  int lower = 0;

  CategoricalCover cover;
  InequalityVerdicts ineq;
  std::string corollary_3_2 = "not-applicable";
  std::string theorem_4_6 = "not-applicable";
  RestClusters rest;
  std::vector<std::string> hypotheses;
};

namespace detail {

class StageTimer {
 public:
  StageTimer(RunResult& r, std::string name)
      : r_(r), name_(std::move(name)), t0_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    auto dt = std::chrono::steady_clock::now() - t0_;
    r_.timings.emplace_back(name_, std::chrono::duration<double, std::milli>(dt).count());
  }

 private:
  RunResult& r_;
  std::string name_;
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace detail

inline bool config_uses_map(const Config& cfg) {
  return cfg.has_inline_map || !cfg.map_file.empty();
}

// The explicit-map document, file contents resolved so the report can carry
// a self-contained copy.
inline nlohmann::json resolve_map_document(const Config& cfg) {
  if (cfg.has_inline_map) return cfg.inline_map;
  std::string path = cfg.map_file;
  if (!path.empty() && path[0] != '/') path = cfg.base_dir + "/" + path;
  std::ifstream in(path);
  if (!in) throw ConfigError("field 'system.map_file': cannot open '" + cfg.map_file + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("field 'system.map_file': '" + cfg.map_file +
                      "' is not valid JSON: " + e.what());
  }
  return doc;
}

inline RunResult run_pipeline(const Config& cfg, RunRequest req) {
  if (req.category) req.morse = req.conley = true;
  RunResult r;
  r.cfg = cfg;
  r.req = req;

  {
    detail::StageTimer t(r, "map");
    try {
      if (config_uses_map(cfg)) r.map_doc = resolve_map_document(cfg);
      r.sys = build_from_config(cfg);
      r.stage_map.status = "ok";
    } catch (const ConfigError&) {
      throw;  // malformed configuration belongs to the caller, not the report
    } catch (const std::exception& e) {
      r.stage_map.fail(e.what());
      return r;
    }
  }

  {
    detail::StageTimer t(r, "index_pair");
    try {
      r.S = config_S(cfg, r.sys.grid);
      r.pair = build_index_pair(r.sys.F, r.S);
      r.validation = validate_index_pair(r.sys.F, r.pair.N, r.pair.L);
      r.stage_pair.status = "ok";
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      r.stage_pair.fail(e.what());
      return r;
    }
  }

  if (req.morse) {
    detail::StageTimer t(r, "morse");
    try {
      PointedMap pm = make_pointed(r.sys.F, r.pair);
      r.i_plus = forward_invariant_part(pm);
      r.morse = morse_sets(pm);
      r.stage_morse.status = "ok";
    } catch (const std::exception& e) {
      r.stage_morse.fail(e.what());
      return r;
    }
  }

  if (req.conley) {
    detail::StageTimer t(r, "conley_index");
    try {
      CubicalPair cp = build_pair(r.sys.grid, r.pair.N, r.pair.L);
      r.betti = relative_betti(cp);
      r.euler = euler_characteristic(cp);
      r.cup_len = cup_length(r.sys.grid, r.pair.N, r.pair.L);
      r.lower = hls_lower(r.sys.grid, r.pair.N, r.pair.L);
      r.stage_conley.status = "ok";
    } catch (const std::exception& e) {
      r.stage_conley.fail(e.what());
      return r;
    }
  }

  if (req.category) {
    detail::StageTimer t(r, "ls_category");
    try {
      PointedMap pm = make_pointed(r.sys.F, r.pair);
      r.cover = cover_from_morse(pm, r.morse);
      bool exit_empty = r.pair.L.empty();
      r.ineq = verify_category_bounds(r.cover, r.lower, exit_empty);
      r.corollary_3_2 = invariant_budget_verdict(r.cover, exit_empty);
      r.rest = verify_rest_points(r.sys.F, r.morse, r.sys.gradient_like,
                                  cfg.rest_cluster_diameter);
      r.theorem_4_6 = r.rest.count >= r.lower - 1 ? "pass" : "fail";
      bool flowed = false;
      for (const auto& e : r.cover.elements)
        if (e.flow_time > 0 || e.kind == "residual-collapse") flowed = true;
      if (flowed)
        r.hypotheses.push_back(
            "flow certificates treat each cell image of the enclosure map as "
            "connected and contractible");
      if (!r.rest.is_cluster.empty())
        r.hypotheses.push_back(
            "each rest cluster certifies at least one equilibrium of the "
            "generating field; exactly one only at sufficient resolution");
      r.stage_category.status = "ok";
    } catch (const std::exception& e) {
      r.stage_category.fail(e.what());
      return r;
    }
  }

  return r;
}

inline bool overall_pass(const RunResult& r) {
  if (!r.stage_map.ok() || !r.stage_pair.ok()) return false;
  if (!r.validation.all()) return false;
  if (r.req.morse && !r.stage_morse.ok()) return false;
  if (r.req.conley && !r.stage_conley.ok()) return false;
  if (r.req.category) {
    if (!r.stage_category.ok()) return false;
    if (!r.ineq.upper_within_morse_budget || !r.ineq.lower_at_most_upper) return false;
    if (r.corollary_3_2 == "fail") return false;
    if (r.theorem_4_6 == "fail") return false;
  }
  return true;
}

}  // namespace cubcat
