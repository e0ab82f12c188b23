// Acceptance gate: one line per criterion, exit code counts the failures.

#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "cubcat/category.hpp"
#include "cubcat/fixtures.hpp"

using namespace cubcat;

namespace {

class Criterion {
 public:
  explicit Criterion(std::string label) : label_(std::move(label)) {}
  void expect(bool cond, const std::string& what) {
    if (!cond && why_.empty()) why_ = what;
  }
  bool report() const {
    if (why_.empty())
      std::printf("%s: pass\n", label_.c_str());
    else
      std::printf("%s: FAIL (%s)\n", label_.c_str(), why_.c_str());
    return why_.empty();
  }

 private:
  std::string label_, why_;
};

// Full run of one system: pair, decomposition, index homology, cover, verdicts.
struct Pipe {
  BuiltSystem sys;
  IndexPair pair;
  ValidationReport val;
  PointedMap pm;
  MorseDecomposition md;
  CategoricalCover cover;
  BettiVector betti;
  int cup = 0;
  int lower = 0;
  InequalityVerdicts ineq;
  std::string corollary;
  RestClusters rest;

  explicit Pipe(BuiltSystem s) : sys(std::move(s)) {
    pair = build_index_pair(sys.F, all_cells(sys.grid));
    val = validate_index_pair(sys.F, pair.N, pair.L);
    pm = make_pointed(sys.F, pair);
    md = morse_sets(pm);
    cover = cover_from_morse(pm, md);
    betti = relative_betti(build_pair(sys.grid, pair.N, pair.L));
    cup = cup_length(sys.grid, pair.N, pair.L);
    lower = hls_lower(sys.grid, pair.N, pair.L);
    ineq = verify_category_bounds(cover, lower, pair.L.empty());
    corollary = invariant_budget_verdict(cover, pair.L.empty());
    rest = verify_rest_points(sys.F, md, sys.gradient_like, 2);
  }
};

Pipe& pipe(const std::string& fixture) {
  static std::map<std::string, Pipe> cache;
  auto it = cache.find(fixture);
  if (it == cache.end()) it = cache.emplace(fixture, Pipe(build_fixture(fixture))).first;
  return it->second;
}

BuiltSystem circle8_system() {
  BuiltSystem s;
  s.grid = build_grid({0.0}, {1.0}, {8}, {1});
  s.F = enclose_flow_map(parse_field({"-sin(6.283185307179586*x1)"}, 1), s.grid, 0.2, 0.01);
  s.gradient_like = true;
  return s;
}

Pipe& circle8_pipe() {
  static Pipe p(circle8_system());
  return p;
}

CellSet draw_subset(std::mt19937& rng, const CellSet& from, double p) {
  std::bernoulli_distribution coin(p);
  CellSet out;
  for (CellId c : from)
    if (coin(rng)) out.push_back(c);
  return out;
}

CellSet block(const Grid& g, int x0, int x1, int y0, int y1) {
  CellSet out;
  for (int j = y0; j <= y1; ++j)
    for (int i = x0; i <= x1; ++i) out.push_back(g.id({i, j}));
  return canon(std::move(out));
}

// Seeded lattice walk; the visited cells form a small connected target.
CellSet random_walk_cells(std::mt19937& rng, const Grid& g, std::vector<int> at, int steps) {
  CellSet out{g.id(at)};
  std::uniform_int_distribution<int> axis(0, g.dim - 1);
  std::bernoulli_distribution dir(0.5);
  for (int s = 0; s < steps; ++s) {
    int a = axis(rng);
    int next = at[static_cast<std::size_t>(a)] + (dir(rng) ? 1 : -1);
    if (next < 0 || next >= g.counts[static_cast<std::size_t>(a)]) continue;
    at[static_cast<std::size_t>(a)] = next;
    out.push_back(g.id(at));
  }
  return canon(std::move(out));
}

const std::vector<std::string>& fixtures() {
  static std::vector<std::string> names = {"saddle", "attractor", "circle", "torus", "line4"};
  return names;
}

std::string ints(const BettiVector& b) {
  std::string s = "(";
  for (std::size_t i = 0; i < b.size(); ++i) s += (i ? "," : "") + std::to_string(b[i]);
  return s + ")";
}

}  // namespace

int main() {
  int failed = 0;
  auto run = [&failed](const std::string& label, auto&& body) {
    Criterion c(label);
    try {
      body(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    if (!c.report()) ++failed;
  };

  run("criterion 1 (saddle pair, circle-type index, cover budget)", [](Criterion& c) {
    Pipe& p = pipe("saddle");
    c.expect(p.val.all(), "index pair validation failed");
    c.expect(p.betti == BettiVector{0, 1, 0}, "index betti " + ints(p.betti));
    c.expect(p.ineq.upper_within_morse_budget, "upper bound exceeds its budget");
    c.expect(p.ineq.lower_at_most_upper, "lower bound exceeds the upper bound");
    c.expect(p.cover.upper == 2, "cover has " + std::to_string(p.cover.upper) + " elements");
    c.expect(p.cover.basepoint_element, "missing the basepoint element");
  });

  run("criterion 1 addendum (short-step saddle has no isolated pair)", [](Criterion& c) {
    BuiltSystem s;
    s.grid = build_grid({-1.0, -1.0}, {1.0, 1.0}, {8, 8}, {0, 0});
    s.F = enclose_flow_map(parse_field({"x1", "-x2"}, 2), s.grid, 0.1, 0.05);
    bool threw = false;
    try {
      build_index_pair(s.F, all_cells(s.grid));
    } catch (const NotIsolating&) {
      threw = true;
    }
    c.expect(threw, "a pair was built even though nothing is isolated at this step");
  });

  run("criterion 2 (attractor point index, single cover element)", [](Criterion& c) {
    Pipe& p = pipe("attractor");
    c.expect(p.betti == BettiVector{1, 0, 0}, "index betti " + ints(p.betti));
    c.expect(p.cover.upper == 1, "cover has " + std::to_string(p.cover.upper) + " elements");
    int basepoint = p.cover.basepoint_element ? 1 : 0;
    c.expect(p.cover.upper - basepoint <= p.rest.count,
             "invariant-part bound exceeds the rest cluster count");
    c.expect(p.rest.count == 1, "expected one rest cluster");
    c.expect(p.corollary == "pass", "invariant budget verdict " + p.corollary);
  });

  run("criterion 3 (circle decomposition and matching bounds)", [](Criterion& c) {
    Pipe& p = pipe("circle");
    c.expect(p.md.count() == 2, std::to_string(p.md.count()) + " Morse sets");
    c.expect(subset_of(p.md.filtration[0], p.md.filtration[1]), "stages not nested");
    c.expect(p.md.filtration[1] == p.md.iplus, "last stage misses the invariant part");
    c.expect(p.lower == 2, "lower bound " + std::to_string(p.lower));
    c.expect(p.cover.upper == 2, "upper bound " + std::to_string(p.cover.upper));
    c.expect(p.ineq.sum_morse_upper == 2, "per-set bounds sum off");
    c.expect(p.pair.L.empty() && p.corollary == "pass",
             "empty exit set should sharpen the budget");
    c.expect(p.rest.count >= p.lower - 1, "too few rest clusters");
  });

  run("criterion 4 (torus decomposition, cup length three-bound)", [](Criterion& c) {
    Pipe& p = pipe("torus");
    c.expect(p.md.count() == 4, std::to_string(p.md.count()) + " Morse sets");
    c.expect(p.cup == 2, "cup length " + std::to_string(p.cup));
    c.expect(p.lower == 3, "lower bound " + std::to_string(p.lower));
    c.expect(p.cover.upper == 4, "upper bound " + std::to_string(p.cover.upper));
    c.expect(p.cover.upper <= p.ineq.sum_morse_upper, "cover exceeds the per-set budget");
    c.expect(p.ineq.upper_within_morse_budget && p.ineq.lower_at_most_upper,
             "bound verdicts failed");
    c.expect(p.corollary == "pass", "invariant budget verdict " + p.corollary);
    c.expect(p.rest.count >= p.lower - 1, "too few rest clusters");
  });

  run("criterion 5 (pair homology independent of the starting set)", [](Criterion& c) {
    Pipe& p = pipe("saddle");
    IndexPair central = build_index_pair(p.sys.F, block(p.sys.grid, 1, 6, 1, 6));
    BettiVector b = relative_betti(build_pair(p.sys.grid, central.N, central.L));
    c.expect(b == p.betti, "central block gives betti " + ints(b));
    c.expect(b == BettiVector{0, 1, 0}, "betti " + ints(b));
  });

  run("criterion 6 (collapse times: finite off the invariant part)", [](Criterion& c) {
    std::mt19937 rng(61803);
    for (const auto& name : fixtures()) {
      Pipe& p = pipe(name);
      CellSet transient = set_minus(p.pm.interior, p.md.iplus);
      for (int i = 0; i < 200; ++i) {
        CellSet a = draw_subset(rng, transient, 0.5);
        c.expect(std::holds_alternative<int>(collapse_time(p.pm, a)),
                 name + ": a set off the invariant part failed to collapse");
      }
      for (int i = 0; i < 200; ++i) {
        CellSet a = draw_subset(rng, p.pm.interior, 0.3);
        a = set_union(a, {p.md.iplus[static_cast<std::size_t>(i) % p.md.iplus.size()]});
        auto r = collapse_time(p.pm, a);
        bool refused = std::holds_alternative<NoCollapse>(r);
        c.expect(refused, name + ": a set meeting the invariant part collapsed");
        if (refused) {
          CellId w = std::get<NoCollapse>(r).witness;
          c.expect(set_contains(set_intersect(a, p.md.iplus), w), name + ": witness invalid");
        }
      }
    }
  });

  run("criterion 7 (confinement times finite on every stage band)", [](Criterion& c) {
    std::mt19937 rng(31415);
    for (const auto& name : {std::string("circle"), std::string("torus")}) {
      Pipe& p = pipe(name);
      for (int j = 1; j <= p.md.count(); ++j) {
        const CellSet& stage = p.md.filtration[static_cast<std::size_t>(j) - 1];
        CellSet band =
            j >= 2 ? set_minus(stage, p.md.filtration[static_cast<std::size_t>(j) - 2])
                   : stage;
        CellSet U = set_union(p.md.sets[static_cast<std::size_t>(j) - 1],
                              one_ring(p.sys.grid, p.md.sets[static_cast<std::size_t>(j) - 1]));
        if (j >= 2) U = set_union(U, p.md.filtration[static_cast<std::size_t>(j) - 2]);
        for (int i = 0; i < 50; ++i) {
          CellSet a = draw_subset(rng, band, 0.4);
          auto r = confinement_time(p.pm, p.md, a, j, U);
          c.expect(std::holds_alternative<int>(r),
                   name + " stage " + std::to_string(j) + ": confinement failed");
        }
      }
    }
  });

  run("criterion 8 (cover elements refine every filtration stage)", [](Criterion& c) {
    for (const auto& name : fixtures()) {
      Pipe& p = pipe(name);
      for (int j = 1; j <= p.md.count(); ++j) {
        CellSet u;
        for (const auto& e : p.cover.elements)
          if (e.morse_index >= 1 && e.morse_index <= j) u = set_union(u, e.cells);
        c.expect(subset_of(p.md.filtration[static_cast<std::size_t>(j) - 1], u),
                 name + ": stage " + std::to_string(j) + " not covered");
      }
    }
  });

  run("criterion 9 (exhaustive bound sits between the two-sided bounds)", [](Criterion& c) {
    Pipe& p = circle8_pipe();
    auto nu = brute_force_hls(p.sys.grid, all_cells(p.sys.grid), all_cells(p.sys.grid));
    c.expect(nu.has_value(), "exhaustive bound gave up on the circle");
    c.expect(nu == std::optional<int>(2), "circle bound is not two");
    c.expect(p.lower <= *nu && *nu <= p.cover.upper, "circle bounds out of order");

    std::mt19937 rng(27182);
    Grid g = build_grid({-1.0, -1.0}, {1.0, 1.0}, {8, 8}, {0, 0});
    for (auto start : {std::vector<int>{3, 3}, std::vector<int>{5, 2}}) {
      CellSet target = random_walk_cells(rng, g, start, 8);
      auto tiny = brute_force_hls(g, target, target, 8);
      c.expect(tiny.has_value(), "exhaustive bound gave up on a walk target");
      if (!tiny) continue;
      c.expect(hls_lower(g, target, {}) <= *tiny, "lower bound exceeds the exhaustive one");
      c.expect(*tiny <= singleton_cover(g, target).upper,
               "exhaustive bound exceeds the singleton cover");
    }
  });

  run("criterion 10 (sampled axioms clean on the eight cell circle)", [](Criterion& c) {
    Pipe& p = circle8_pipe();
    HlsOracle oracle = HlsOracle::make(p.sys.grid, all_cells(p.sys.grid), 6);
    AxiomCheck ax = axioms_check(oracle, &p.sys.F, 2024, 100);
    c.expect(ax.samples == 100, "sample count off");
    c.expect(ax.ok(), ax.violations.empty() ? "" : ax.violations.front());
  });

  return failed;
}
