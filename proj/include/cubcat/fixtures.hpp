#pragma once

// Built-in example systems, addressable by name from configs and tests.

#include <stdexcept>
#include <string>
#include <vector>

#include "cubcat/core.hpp"
#include "cubcat/expr.hpp"
#include "cubcat/flow.hpp"

namespace cubcat {

struct FixtureDef {
  std::string name;
  std::vector<std::string> field;  // empty means the images are listed below
  std::vector<double> lo, hi;
  std::vector<int> counts;
  std::vector<std::uint8_t> periodic;
  double tau = 0.0;
  double padding = 0.0;
  bool gradient_like = false;
  std::vector<std::pair<CellId, ExplicitImage>> images;
};

inline std::vector<std::string> fixture_names() {
  return {"saddle", "attractor", "circle", "torus", "line4"};
}

inline FixtureDef fixture_def(const std::string& name) {
  FixtureDef d;
  d.name = name;
  if (name == "saddle") {
    d.field = {"x1", "-x2"};
    d.lo = {-1.0, -1.0};
    d.hi = {1.0, 1.0};
    d.counts = {8, 8};
    d.periodic = {0, 0};
    d.tau = 1.0;
    d.padding = 0.05;
    d.gradient_like = true;
  } else if (name == "attractor") {
    d.field = {"-x1", "-x2"};
    d.lo = {-1.0, -1.0};
    d.hi = {1.0, 1.0};
    d.counts = {8, 8};
    d.periodic = {0, 0};
    d.tau = 1.0;
    d.padding = 0.05;
    d.gradient_like = true;
  } else if (name == "circle") {
    d.field = {"-sin(6.283185307179586*x1)"};
    d.lo = {0.0};
    d.hi = {1.0};
    d.counts = {16};
    d.periodic = {1};
    d.tau = 0.2;
    d.padding = 0.01;
    d.gradient_like = true;
  } else if (name == "torus") {
    d.field = {"sin(6.283185307179586*x1)", "sin(6.283185307179586*x2)"};
    d.lo = {0.0, 0.0};
    d.hi = {1.0, 1.0};
    d.counts = {16, 16};
    d.periodic = {1, 1};
    d.tau = 0.2;
    d.padding = 0.01;
    d.gradient_like = true;
  } else if (name == "line4") {
    d.lo = {0.0};
    d.hi = {4.0};
    d.counts = {4};
    d.periodic = {0};
    d.gradient_like = true;
    d.images = {{0, {{0}, false}},
                {1, {{0, 1}, false}},
                {2, {{1, 3}, false}},
                {3, {{}, true}}};
  } else {
    throw std::invalid_argument("unknown fixture '" + name + "'");
  }
  return d;
}

struct BuiltSystem {
  Grid grid;
  CellMap F;
  bool gradient_like = false;
  std::string fixture;             // empty when not built from a named fixture
  std::vector<std::string> field;  // empty for explicit systems
  double tau = 0.0;
  double padding = 0.0;
};

inline BuiltSystem build_system(const FixtureDef& d) {
  BuiltSystem s;
  s.grid = build_grid(d.lo, d.hi, d.counts, d.periodic);
  if (!d.field.empty()) {
    VectorField f = parse_field(d.field, s.grid.dim);
    s.F = enclose_flow_map(f, s.grid, d.tau, d.padding);
  } else {
    s.F = explicit_map(s.grid, d.images);
  }
  s.gradient_like = d.gradient_like;
  s.fixture = d.name;
  s.field = d.field;
  s.tau = d.tau;
  s.padding = d.padding;
  return s;
}

inline BuiltSystem build_fixture(const std::string& name) {
  return build_system(fixture_def(name));
}

}  // namespace cubcat
