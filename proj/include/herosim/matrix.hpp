/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "herosim/error.hpp"

namespace hero {

/**
 * Test-matrix graph. Axes are ordered; each holds choices. A line
 * `compat: A B` restricts choice A to the listed choices B on an adjacent
 * axis. A choice with no compat line toward an adjacent axis is
 * compatible with every choice there.
 *
 *   [platform]
 *   juno zc706
 *   [application]
 *   matmul pagerank
 *   compat: pagerank juno
 */
struct MatrixGraph {
  struct Axis {
    std::string name;
    std::vector<std::string> choices;
  };
  std::vector<Axis> axes;
  // (axis, choice index) -> neighbour axis -> allowed choice indices
  std::map<std::pair<std::size_t, std::size_t>, std::map<std::size_t, std::set<std::size_t>>> restrict;

  bool compatible(std::size_t axis_a, std::size_t a, std::size_t axis_b, std::size_t b) const {
    const auto ok = [this](std::size_t ax, std::size_t c, std::size_t other, std::size_t oc) {
      auto it = restrict.find({ax, c});
      if (it == restrict.end()) return true;
      auto jt = it->second.find(other);
      return jt == it->second.end() || jt->second.count(oc) > 0;
    };
    return ok(axis_a, a, axis_b, b) && ok(axis_b, b, axis_a, a);
  }
};

inline MatrixGraph parse_matrix(const std::string& text) {
  MatrixGraph g;
  std::vector<std::pair<int, std::string>> compat_lines;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  const auto fail = [&lineno](const std::string& m) {
    throw ConfigError("matrix line " + std::to_string(lineno) + ": " + m);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first.front() == '[') {
      if (first.back() != ']' || first.size() < 3) fail("malformed axis header '" + first + "'");
      std::string extra;
      if (ls >> extra) fail("text after axis header");
      const auto name = first.substr(1, first.size() - 2);
      for (const auto& a : g.axes)
        if (a.name == name) fail("duplicate axis '" + name + "'");
      g.axes.push_back({name, {}});
      continue;
    }
    if (first == "compat:") {
      compat_lines.emplace_back(lineno, line);
      continue;
    }
    if (g.axes.empty()) fail("choice '" + first + "' before any axis header");
    for (std::string c = first;; ) {
      for (const auto& a : g.axes)
        for (const auto& x : a.choices)
          if (x == c) fail("duplicate choice '" + c + "'");
      g.axes.back().choices.push_back(c);
      if (!(ls >> c)) break;
    }
  }
  for (const auto& a : g.axes)
    if (a.choices.empty()) throw ConfigError("matrix axis '" + a.name + "' has no choices");

  const auto locate = [&g](const std::string& c) -> std::optional<std::pair<std::size_t, std::size_t>> {
    for (std::size_t i = 0; i < g.axes.size(); ++i)
      for (std::size_t j = 0; j < g.axes[i].choices.size(); ++j)
        if (g.axes[i].choices[j] == c) return std::make_pair(i, j);
    return std::nullopt;
  };
  for (const auto& [no, text_line] : compat_lines) {
    lineno = no;
    std::istringstream ls(text_line);
    std::string kw, a, b, extra;
    ls >> kw;
    if (!(ls >> a >> b) || (ls >> extra)) fail("compat needs exactly two choices");
    const auto pa = locate(a), pb = locate(b);
    if (!pa) fail("unknown choice '" + a + "'");
    if (!pb) fail("unknown choice '" + b + "'");
    const auto d = pa->first > pb->first ? pa->first - pb->first : pb->first - pa->first;
    if (d != 1) fail("compat between '" + a + "' and '" + b + "' whose axes are not adjacent");
    g.restrict[*pa][pb->first].insert(pb->second);
  }
  return g;
}

inline MatrixGraph read_matrix_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open matrix graph " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_matrix(ss.str());
}

struct MatrixExpansion {
  std::vector<std::string> axes;
  std::vector<std::vector<std::string>> tuples;
  std::vector<std::string> diagnostics;  // dead-end paths
};

/// All axis-complete paths through compatible choices, in axis and
/// declaration order.
inline MatrixExpansion expand_matrix(const MatrixGraph& g) {
  MatrixExpansion out;
  for (const auto& a : g.axes) out.axes.push_back(a.name);
  if (g.axes.empty()) return out;
  std::vector<std::size_t> path;
  const auto describe = [&g, &path] {
    std::string s;
    for (std::size_t i = 0; i < path.size(); ++i) s += (i ? " > " : "") + g.axes[i].choices[path[i]];
    return s;
  };
  const auto dfs = [&](auto&& self) -> void {
    const auto axis = path.size();
    if (axis == g.axes.size()) {
      std::vector<std::string> t;
      for (std::size_t i = 0; i < path.size(); ++i) t.push_back(g.axes[i].choices[path[i]]);
      out.tuples.push_back(std::move(t));
      return;
    }
    bool any = false;
    for (std::size_t c = 0; c < g.axes[axis].choices.size(); ++c) {
      if (axis > 0 && !g.compatible(axis - 1, path.back(), axis, c)) continue;
      any = true;
      path.push_back(c);
      self(self);
      path.pop_back();
    }
    if (!any)
      out.diagnostics.push_back("path " + describe() + ": no compatible choice on axis '" + g.axes[axis].name + "'");
  };
  dfs(dfs);
  return out;
}

}  // namespace hero
