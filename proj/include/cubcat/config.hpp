#pragma once

// JSON configuration: one system source (named fixture, field expressions,
// or an explicit map document), grid geometry, and run parameters.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cubcat/core.hpp"
#include "cubcat/fixtures.hpp"
#include "cubcat/flow.hpp"

namespace cubcat {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string base_dir;  // directory the config was loaded from

  std::string fixture;
  std::vector<std::string> field;
  std::string map_file;
  bool has_inline_map = false;
  nlohmann::json inline_map;

  bool has_grid = false;
  std::vector<double> lo, hi;
  std::vector<int> counts;
  std::vector<std::uint8_t> periodic;
  bool has_tau = false;
  double tau = 0.0;
  bool has_padding = false;
  double padding = 0.0;

  bool has_S = false;
  std::vector<std::vector<int>> S;  // multi-indices

  bool has_gradient_like = false;
  bool gradient_like = false;
  int rest_cluster_diameter = 2;
  std::uint64_t seed = 0;
  int oracle_max_size = 6;
};

namespace detail {

inline const nlohmann::json& need(const nlohmann::json& j, const std::string& key,
                                  const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError("missing required field '" + where + "'");
  return *it;
}

inline void parse_grid(const nlohmann::json& g, Config& c) {
  const auto& box = need(g, "box", "grid.box");
  const auto& subs = need(g, "subdivisions", "grid.subdivisions");
  const auto& per = need(g, "periodic", "grid.periodic");
  if (!box.is_array() || box.empty())
    throw ConfigError("field 'grid.box' must be a nonempty array of [lo, hi] pairs");
  for (const auto& pair : box) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
      throw ConfigError("field 'grid.box' entries must be [lo, hi] number pairs");
    c.lo.push_back(pair[0].get<double>());
    c.hi.push_back(pair[1].get<double>());
  }
  if (!subs.is_array() || subs.size() != box.size())
    throw ConfigError("field 'grid.subdivisions' must match 'grid.box' in length");
  for (const auto& s : subs) {
    if (!s.is_number_integer() || s.get<long long>() < 1)
      throw ConfigError("field 'grid.subdivisions' entries must be positive integers");
    c.counts.push_back(s.get<int>());
  }
  if (!per.is_array() || per.size() != box.size())
    throw ConfigError("field 'grid.periodic' must match 'grid.box' in length");
  for (const auto& p : per) {
    if (!p.is_boolean()) throw ConfigError("field 'grid.periodic' entries must be booleans");
    c.periodic.push_back(p.get<bool>() ? 1 : 0);
  }
  c.has_grid = true;
}

}  // namespace detail

inline Config parse_config(const nlohmann::json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  Config c;
  c.base_dir = base_dir;
  static const std::vector<std::string> known = {
      "schema", "system",        "grid", "tau",    "padding",
      "S",      "gradient_like", "rest_cluster_diameter", "seed", "oracle"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError("unknown field '" + it.key() + "'");

  if (auto it = j.find("schema"); it != j.end() && it->get<std::string>() != "v1")
    throw ConfigError("field 'schema' must be \"v1\"");

  const auto& sys = detail::need(j, "system", "system");
  if (!sys.is_object()) throw ConfigError("field 'system' must be an object");
  int sources = 0;
  if (sys.contains("fixture")) ++sources;
  if (sys.contains("field")) ++sources;
  if (sys.contains("map_file")) ++sources;
  if (sys.contains("map")) ++sources;
  if (sources != 1)
    throw ConfigError("field 'system' needs exactly one of 'fixture', 'field', 'map_file', 'map'");

  if (sys.contains("fixture")) {
    c.fixture = sys["fixture"].get<std::string>();
    auto names = fixture_names();
    if (std::find(names.begin(), names.end(), c.fixture) == names.end())
      throw ConfigError("field 'system.fixture': unknown fixture '" + c.fixture + "'");
    for (const char* k : {"grid", "tau", "padding"})
      if (j.contains(k))
        throw ConfigError("field '" + std::string(k) + "' cannot be combined with a named fixture");
  } else if (sys.contains("field")) {
    const auto& f = sys["field"];
    if (!f.is_array() || f.empty())
      throw ConfigError("field 'system.field' must be a nonempty array of expressions");
    for (const auto& comp : f) c.field.push_back(comp.get<std::string>());
    detail::parse_grid(detail::need(j, "grid", "grid"), c);
    if (c.field.size() != c.counts.size())
      throw ConfigError("field 'system.field' must have one component per grid axis");
    const auto& tau = detail::need(j, "tau", "tau");
    if (!tau.is_number() || !(tau.get<double>() > 0))
      throw ConfigError("field 'tau' must be positive");
    c.tau = tau.get<double>();
    c.has_tau = true;
    const auto& pad = detail::need(j, "padding", "padding");
    if (!pad.is_number() || pad.get<double>() < 0)
      throw ConfigError("field 'padding' must be nonnegative");
    c.padding = pad.get<double>();
    c.has_padding = true;
  } else {
    if (sys.contains("map_file"))
      c.map_file = sys["map_file"].get<std::string>();
    else {
      c.has_inline_map = true;
      c.inline_map = sys["map"];
    }
    for (const char* k : {"grid", "tau", "padding"})
      if (j.contains(k))
        throw ConfigError("field '" + std::string(k) +
                          "' cannot be combined with an explicit map; the map document carries its own grid");
  }

  if (auto it = j.find("S"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("field 'S' must be an array of cell multi-indices");
    for (const auto& cell : *it) {
      if (!cell.is_array()) throw ConfigError("field 'S' entries must be multi-index arrays");
      std::vector<int> m;
      for (const auto& x : cell) {
        if (!x.is_number_integer()) throw ConfigError("field 'S' coordinates must be integers");
        m.push_back(x.get<int>());
      }
      c.S.push_back(std::move(m));
    }
    c.has_S = true;
  }
  if (auto it = j.find("gradient_like"); it != j.end()) {
    if (!it->is_boolean()) throw ConfigError("field 'gradient_like' must be a boolean");
    c.gradient_like = it->get<bool>();
    c.has_gradient_like = true;
  }
  if (auto it = j.find("rest_cluster_diameter"); it != j.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 0)
      throw ConfigError("field 'rest_cluster_diameter' must be a nonnegative integer");
    c.rest_cluster_diameter = it->get<int>();
  }
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned() && !it->is_number_integer())
      throw ConfigError("field 'seed' must be an integer");
    c.seed = it->get<std::uint64_t>();
  }
  if (auto it = j.find("oracle"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("field 'oracle' must be an object");
    if (auto m = it->find("max_size"); m != it->end()) {
      if (!m->is_number_integer() || m->get<long long>() < 1)
        throw ConfigError("field 'oracle.max_size' must be a positive integer");
      c.oracle_max_size = m->get<int>();
    }
  }
  return c;
}

inline Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  auto slash = path.find_last_of('/');
  return parse_config(j, slash == std::string::npos ? "." : path.substr(0, slash));
}

// Explicit map document: {"cells": [...], "periodic": [...], "box": [[lo,hi]...]
// optional, "images": {"i,j": [[..], "exterior", ...], ...}}.
inline std::pair<Grid, std::vector<std::pair<CellId, ExplicitImage>>> parse_map_document(
    const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("map document must be a JSON object");
  const auto& cells = detail::need(j, "cells", "map.cells");
  std::vector<int> counts;
  for (const auto& n : cells) {
    if (!n.is_number_integer() || n.get<long long>() < 1)
      throw ConfigError("field 'map.cells' entries must be positive integers");
    counts.push_back(n.get<int>());
  }
  if (counts.empty()) throw ConfigError("field 'map.cells' must be nonempty");
  std::vector<std::uint8_t> periodic;
  const auto& per = detail::need(j, "periodic", "map.periodic");
  if (!per.is_array() || per.size() != counts.size())
    throw ConfigError("field 'map.periodic' must match 'map.cells' in length");
  for (const auto& p : per) periodic.push_back(p.get<bool>() ? 1 : 0);
  std::vector<double> lo(counts.size(), 0.0), hi;
  if (j.contains("box")) {
    const auto& box = j["box"];
    if (!box.is_array() || box.size() != counts.size())
      throw ConfigError("field 'map.box' must match 'map.cells' in length");
    lo.clear();
    for (const auto& pair : box) {
      lo.push_back(pair[0].get<double>());
      hi.push_back(pair[1].get<double>());
    }
  } else {
    for (int n : counts) hi.push_back(static_cast<double>(n));
  }
  Grid g = Grid::make(lo, hi, counts, periodic, 1);

  const auto& images = detail::need(j, "images", "map.images");
  if (!images.is_object()) throw ConfigError("field 'map.images' must be an object");
  std::vector<std::pair<CellId, ExplicitImage>> entries;
  for (auto it = images.begin(); it != images.end(); ++it) {
    std::vector<int> m;
    std::string key = it.key();
    std::size_t pos = 0;
    while (pos < key.size()) {
      std::size_t comma = key.find(',', pos);
      std::string tok = key.substr(pos, comma == std::string::npos ? std::string::npos
                                                                   : comma - pos);
      try {
        m.push_back(std::stoi(tok));
      } catch (...) {
        throw ConfigError("field 'map.images': key '" + key + "' is not a multi-index");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (static_cast<int>(m.size()) != g.dim)
      throw ConfigError("field 'map.images': key '" + key + "' has the wrong dimension");
    for (int a = 0; a < g.dim; ++a)
      if (m[static_cast<std::size_t>(a)] < 0 ||
          m[static_cast<std::size_t>(a)] >= g.counts[static_cast<std::size_t>(a)])
        throw ConfigError("field 'map.images': key '" + key + "' lies outside the grid");
    ExplicitImage im;
    if (!it->is_array())
      throw ConfigError("field 'map.images': image of '" + key + "' must be an array");
    for (const auto& entry : *it) {
      if (entry.is_string()) {
        if (entry.get<std::string>() != "exterior")
          throw ConfigError("field 'map.images': the only string entry allowed is \"exterior\"");
        im.exterior = true;
        continue;
      }
      if (!entry.is_array() || static_cast<int>(entry.size()) != g.dim)
        throw ConfigError("field 'map.images': image cells of '" + key +
                          "' must be multi-index arrays");
      std::vector<int> t;
      for (const auto& x : entry) t.push_back(x.get<int>());
      for (int a = 0; a < g.dim; ++a)
        if (t[static_cast<std::size_t>(a)] < 0 ||
            t[static_cast<std::size_t>(a)] >= g.counts[static_cast<std::size_t>(a)])
          throw ConfigError("field 'map.images': image of '" + key + "' lies outside the grid");
      im.cells.push_back(g.id(t));
    }
    entries.emplace_back(g.id(m), std::move(im));
  }
  return {std::move(g), std::move(entries)};
}

inline BuiltSystem build_from_config(const Config& c) {
  if (!c.fixture.empty()) {
    BuiltSystem s = build_fixture(c.fixture);
    if (c.has_gradient_like) s.gradient_like = c.gradient_like;
    return s;
  }
  BuiltSystem s;
  if (!c.field.empty()) {
    s.grid = build_grid(c.lo, c.hi, c.counts, c.periodic);
    try {
      VectorField f = parse_field(c.field, s.grid.dim);
      s.F = enclose_flow_map(f, s.grid, c.tau, c.padding);
    } catch (const ParseError& e) {
      throw ConfigError("field 'system.field': " + std::string(e.what()));
    } catch (const FieldError& e) {
      throw ConfigError("field 'system.field': " + std::string(e.what()));
    }
    s.field = c.field;
    s.tau = c.tau;
    s.padding = c.padding;
  } else {
    nlohmann::json doc;
    if (c.has_inline_map) {
      doc = c.inline_map;
    } else {
      std::string path = c.map_file;
      if (!path.empty() && path[0] != '/') path = c.base_dir + "/" + path;
      std::ifstream in(path);
      if (!in) throw ConfigError("field 'system.map_file': cannot open '" + c.map_file + "'");
      try {
        in >> doc;
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("field 'system.map_file': '" + c.map_file +
                          "' is not valid JSON: " + e.what());
      }
    }
    auto [g, entries] = parse_map_document(doc);
    s.grid = g;
    s.F = explicit_map(g, entries);
  }
  s.gradient_like = c.has_gradient_like ? c.gradient_like : false;
  return s;
}

// The isolating set: explicit multi-indices, or every cell by default.
inline CellSet config_S(const Config& c, const Grid& g) {
  if (!c.has_S) return all_cells(g);
  CellSet out;
  for (const auto& m : c.S) {
    if (static_cast<int>(m.size()) != g.dim)
      throw ConfigError("field 'S': entries must have one coordinate per axis");
    for (int a = 0; a < g.dim; ++a)
      if (m[static_cast<std::size_t>(a)] < 0 ||
          m[static_cast<std::size_t>(a)] >= g.counts[static_cast<std::size_t>(a)])
        throw ConfigError("field 'S': a cell lies outside the grid");
    out.push_back(g.id(m));
  }
  return canon(std::move(out));
}

}  // namespace cubcat
