#pragma once

// Report serialization, DOT export of the condensation, and the re-check
// pass that recomputes every verdict from a serialized report.

#include <algorithm>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cubcat/pipeline.hpp"

namespace cubcat {

// Cells serialize as multi-index arrays in lexicographic order.
inline nlohmann::json cells_json(const Grid& g, const CellSet& cells) {
  std::vector<std::vector<int>> multis;
  multis.reserve(cells.size());
  for (CellId c : cells) multis.push_back(g.multi(c));
  std::sort(multis.begin(), multis.end());
  return nlohmann::json(multis);
}

inline CellSet cells_from_json(const Grid& g, const nlohmann::json& j) {
  CellSet out;
  for (const auto& m : j) out.push_back(g.id(m.get<std::vector<int>>()));
  return canon(std::move(out));
}

// The inputs echo doubles as a runnable config: feeding it back through
// parse_config reproduces the run.
inline nlohmann::json inputs_echo(const RunResult& r) {
  nlohmann::json in;
  in["schema"] = "v1";
  nlohmann::json sys;
  if (!r.cfg.fixture.empty()) {
    sys["fixture"] = r.cfg.fixture;
  } else if (!r.cfg.field.empty()) {
    sys["field"] = r.cfg.field;
    nlohmann::json grid;
    nlohmann::json box = nlohmann::json::array();
    for (std::size_t a = 0; a < r.cfg.lo.size(); ++a)
      box.push_back({r.cfg.lo[a], r.cfg.hi[a]});
    grid["box"] = box;
    grid["subdivisions"] = r.cfg.counts;
    nlohmann::json per = nlohmann::json::array();
    for (auto p : r.cfg.periodic) per.push_back(p != 0);
    grid["periodic"] = per;
    in["grid"] = grid;
    in["tau"] = r.cfg.tau;
    in["padding"] = r.cfg.padding;
  } else {
    sys["map"] = r.map_doc;
  }
  in["system"] = sys;
  if (r.cfg.has_S) {
    auto multis = r.cfg.S;
    std::sort(multis.begin(), multis.end());
    multis.erase(std::unique(multis.begin(), multis.end()), multis.end());
    in["S"] = multis;
  }
  if (r.stage_map.ok()) in["gradient_like"] = r.sys.gradient_like;
  in["rest_cluster_diameter"] = r.cfg.rest_cluster_diameter;
  in["seed"] = r.cfg.seed;
  in["oracle"] = {{"max_size", r.cfg.oracle_max_size}};
  return in;
}

inline nlohmann::json stage_json(const Stage& s) {
  nlohmann::json j;
  j["status"] = s.status;
  if (s.status == "error") j["error"] = s.error;
  return j;
}

inline nlohmann::json report_json(const RunResult& r) {
  nlohmann::json rep;
  rep["schema"] = "v1";
  rep["inputs"] = inputs_echo(r);

  nlohmann::json stages;
  stages["map"] = stage_json(r.stage_map);
  stages["index_pair"] = stage_json(r.stage_pair);
  stages["morse"] = stage_json(r.stage_morse);
  stages["conley_index"] = stage_json(r.stage_conley);
  stages["ls_category"] = stage_json(r.stage_category);
  rep["stages"] = stages;

  const Grid& g = r.sys.grid;

  if (r.stage_pair.ok()) {
    nlohmann::json ip;
    ip["A"] = cells_json(g, r.pair.A);
    ip["N"] = cells_json(g, r.pair.N);
    ip["L"] = cells_json(g, r.pair.L);
    ip["sizes"] = {{"S", r.S.size()},
                   {"A", r.pair.A.size()},
                   {"N", r.pair.N.size()},
                   {"L", r.pair.L.size()}};
    nlohmann::json val;
    val["positive_invariance"] = r.validation.positive_invariance;
    val["exit_through_L"] = r.validation.exit_through_L;
    val["isolation"] = r.validation.isolation;
    if (r.validation.pi_witness)
      val["positive_invariance_witness"] = g.multi(*r.validation.pi_witness);
    if (r.validation.exit_witness)
      val["exit_witness"] = g.multi(*r.validation.exit_witness);
    if (r.validation.iso_witness)
      val["isolation_witness"] = g.multi(*r.validation.iso_witness);
    ip["validation"] = val;
    rep["index_pair"] = ip;
  }

  if (r.stage_morse.ok()) {
    nlohmann::json mo;
    mo["count"] = r.morse.count();
    nlohmann::json sets = nlohmann::json::array();
    for (const auto& M : r.morse.sets) sets.push_back(cells_json(g, M));
    mo["sets"] = sets;
    nlohmann::json order = nlohmann::json::array();
    for (int j = 1; j <= r.morse.count(); ++j) order.push_back(j);
    mo["order"] = order;  // admissible order, most attracting first
    nlohmann::json edges = nlohmann::json::array();
    for (std::size_t j = 0; j < r.morse.dag.size(); ++j)
      for (int i : r.morse.dag[j])
        edges.push_back({static_cast<int>(j) + 1, i + 1});
    mo["dag_edges"] = edges;
    mo["i_plus"] = cells_json(g, r.i_plus);
    nlohmann::json filt = nlohmann::json::array();
    for (const auto& F : r.morse.filtration) filt.push_back(cells_json(g, F));
    mo["filtration"] = filt;
    rep["morse"] = mo;
  }

  if (r.stage_conley.ok()) {
    nlohmann::json ci;
    ci["betti"] = r.betti;
    ci["euler"] = r.euler;
    ci["cup_length"] = r.cup_len;
    ci["hls_lower"] = r.lower;
    rep["conley_index"] = ci;
  }

  if (r.stage_category.ok()) {
    nlohmann::json ls;
    ls["lower"] = r.lower;
    ls["upper"] = r.cover.upper;
    ls["per_morse_upper"] = r.cover.per_morse_upper;
    ls["basepoint_term"] = r.cover.basepoint_element ? 1 : 0;
    nlohmann::json certs = nlohmann::json::array();
    for (const auto& e : r.cover.elements) {
      nlohmann::json c;
      c["morse_index"] = e.morse_index;
      c["kind"] = e.kind;
      c["cells"] = cells_json(g, e.cells);
      c["target"] = cells_json(g, e.target);
      c["flow_time"] = e.flow_time;
      c["target_collapse_steps"] = e.target_collapse.size();
      certs.push_back(c);
    }
    ls["certificates"] = certs;
    if (r.cover.basepoint_element)
      ls["residual"] = {{"cells", cells_json(g, r.cover.residual)},
                        {"collapse_time", r.cover.residual_collapse_time}};
    ls["theorem_3_1"] = {{"a", r.ineq.upper_within_morse_budget ? "pass" : "fail"},
                         {"b", r.ineq.lower_at_most_upper ? "pass" : "fail"},
                         {"sum_morse_upper", r.ineq.sum_morse_upper}};
    ls["corollary_3_2"] = r.corollary_3_2;
    nlohmann::json clusters = nlohmann::json::array();
    for (auto b : r.rest.is_cluster) clusters.push_back(b != 0);
    ls["theorem_4_6"] = {{"verdict", r.theorem_4_6},
                         {"rest_points", r.rest.count},
                         {"clusters", clusters}};
    ls["hypotheses"] = r.hypotheses;
    rep["ls_category"] = ls;
  }

  rep["verdicts"] = {{"overall", overall_pass(r) ? "pass" : "fail"}};

  nlohmann::json tm;
  for (const auto& [name, ms] : r.timings) tm[name + "_ms"] = ms;
  rep["timings"] = tm;
  return rep;
}

// Byte-stable condensation digraph; the invisible chain pins the admissible
// order as a layout hint.
inline std::string export_dot(const RunResult& r) {
  std::ostringstream out;
  out << "digraph condensation {\n";
  out << "  rankdir=TB;\n";
  out << "  node [shape=box];\n";
  for (int j = 0; j < r.morse.count(); ++j) {
    std::size_t n = r.morse.sets[static_cast<std::size_t>(j)].size();
    out << "  M_" << j + 1 << " [label=\"M_" << j + 1 << " (" << n
        << (n == 1 ? " cell" : " cells") << ")\"];\n";
  }
  for (std::size_t j = 0; j < r.morse.dag.size(); ++j)
    for (int i : r.morse.dag[j]) out << "  M_" << j + 1 << " -> M_" << i + 1 << ";\n";
  for (int j = r.morse.count(); j >= 2; --j)
    out << "  M_" << j << " -> M_" << j - 1 << " [style=invis];\n";
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Re-checks: everything below recomputes claims of a serialized report.

struct ReCheck {
  std::string name;
  bool ok = false;
  std::string detail;
};

namespace detail {

inline nlohmann::json strip_timings(nlohmann::json j) {
  j.erase("timings");
  return j;
}

}  // namespace detail

// Re-runs the pipeline from the inputs echo and recomputes each serialized
// verdict independently. Only reports whose stages all ran can be verified.
inline std::vector<ReCheck> verify_report(const nlohmann::json& rep) {
  std::vector<ReCheck> out;
  auto push = [&out](const std::string& name, bool ok, const std::string& detail = "") {
    out.push_back({name, ok, detail});
  };

  if (!rep.contains("inputs") || !rep.contains("stages")) {
    push("report shape", false, "missing 'inputs' or 'stages'");
    return out;
  }
  push("report shape", true);

  Config cfg = parse_config(rep["inputs"], ".");
  RunRequest req;
  req.morse = rep["stages"]["morse"]["status"] != "not-applicable";
  req.conley = rep["stages"]["conley_index"]["status"] != "not-applicable";
  req.category = rep["stages"]["ls_category"]["status"] != "not-applicable";
  RunResult r = run_pipeline(cfg, req);

  nlohmann::json fresh = report_json(r);
  bool same = detail::strip_timings(fresh) == detail::strip_timings(rep);
  push("report reproducible", same,
       same ? "" : "rerun from the inputs echo produced a different report");

  if (!rep.contains("index_pair")) return out;
  const Grid& g = r.sys.grid;
  CellSet N = cells_from_json(g, rep["index_pair"]["N"]);
  CellSet L = cells_from_json(g, rep["index_pair"]["L"]);

  ValidationReport val = validate_index_pair(r.sys.F, N, L);
  const auto& vj = rep["index_pair"]["validation"];
  bool val_ok = val.positive_invariance == vj["positive_invariance"].get<bool>() &&
                val.exit_through_L == vj["exit_through_L"].get<bool>() &&
                val.isolation == vj["isolation"].get<bool>();
  push("pair validation from cells", val_ok);

  if (rep.contains("conley_index")) {
    CubicalPair cp = build_pair(g, N, L);
    BettiVector betti = relative_betti(cp);
    int cup = cup_length(g, N, L);
    bool hom_ok = betti == rep["conley_index"]["betti"].get<BettiVector>() &&
                  euler_characteristic(cp) == rep["conley_index"]["euler"].get<int>() &&
                  cup == rep["conley_index"]["cup_length"].get<int>();
    push("index homology from cells", hom_ok);
    if (rep.contains("ls_category"))
      push("lower bound from cup length",
           cup + (N.empty() ? 0 : 1) == rep["ls_category"]["lower"].get<int>());
  }

  if (!rep.contains("ls_category") || !rep.contains("morse")) return out;
  const auto& ls = rep["ls_category"];

  // Collapse replay on each certified carrier.
  bool collapses_ok = true;
  std::string collapse_detail;
  for (const auto& e : r.cover.elements) {
    if (e.target_collapse.empty()) continue;
    Complex hull = hull_complex(g, e.target);
    if (!verify_collapse(hull, e.target_collapse)) {
      collapses_ok = false;
      collapse_detail = "carrier of element for stage " + std::to_string(e.morse_index) +
                        " failed replay";
      break;
    }
  }
  push("collapse certificates replay", collapses_ok, collapse_detail);

  // Flow containment: iterating each element inside itself lands in its
  // carrier after the recorded number of steps.
  bool flow_ok = true;
  for (const auto& ej : ls["certificates"]) {
    if (ej["kind"] == "residual-collapse") continue;
    CellSet cells = cells_from_json(g, ej["cells"]);
    CellSet target = cells_from_json(g, ej["target"]);
    CellSet X = cells;
    for (int t = 0; t < ej["flow_time"].get<int>(); ++t)
      X = set_intersect(r.sys.F.image_of(X), cells);
    if (!subset_of(X, target)) flow_ok = false;
  }
  push("flow certificates re-iterated", flow_ok);

  // Stagewise coverage: elements up to stage j union to filtration stage j.
  bool cover_ok = true;
  const auto& filt = rep["morse"]["filtration"];
  int count = rep["morse"]["count"].get<int>();
  for (int j = 1; j <= count; ++j) {
    CellSet un;
    for (const auto& ej : ls["certificates"]) {
      int mi = ej["morse_index"].get<int>();
      if (mi >= 1 && mi <= j) un = set_union(un, cells_from_json(g, ej["cells"]));
    }
    if (un != cells_from_json(g, filt[static_cast<std::size_t>(j) - 1])) cover_ok = false;
  }
  CellSet interior = set_minus(N, L);
  CellSet all_covered;
  for (const auto& ej : ls["certificates"])
    all_covered = set_union(all_covered, cells_from_json(g, ej["cells"]));
  if (all_covered != interior) cover_ok = false;
  push("cover matches the filtration", cover_ok);

  // Verdict arithmetic from the serialized numbers alone.
  int upper = ls["upper"].get<int>();
  int lower = ls["lower"].get<int>();
  int basepoint = ls["basepoint_term"].get<int>();
  int sum = 0;
  for (const auto& p : ls["per_morse_upper"]) sum += p.get<int>();
  bool a = upper <= basepoint + sum;
  bool b = lower <= upper;
  bool arith_ok = (a ? "pass" : "fail") == ls["theorem_3_1"]["a"].get<std::string>() &&
                  (b ? "pass" : "fail") == ls["theorem_3_1"]["b"].get<std::string>() &&
                  sum == ls["theorem_3_1"]["sum_morse_upper"].get<int>() &&
                  static_cast<std::size_t>(upper) == ls["certificates"].size();
  std::string cor = L.empty() ? (upper <= sum ? "pass" : "fail") : "not-applicable";
  arith_ok = arith_ok && cor == ls["corollary_3_2"].get<std::string>();
  int rest = ls["theorem_4_6"]["rest_points"].get<int>();
  arith_ok = arith_ok && (rest >= lower - 1 ? "pass" : "fail") ==
                             ls["theorem_4_6"]["verdict"].get<std::string>();
  push("verdict arithmetic", arith_ok);

  return out;
}

}  // namespace cubcat
