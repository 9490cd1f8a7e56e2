/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

// Random test-matrix graphs and a brute-force enumerator over them.

#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace hero::testing {

struct RandomGraph {
  std::vector<std::vector<std::string>> axes;
  std::vector<std::pair<std::string, std::string>> compat;
  std::string text;
};

inline RandomGraph random_graph(std::mt19937_64& rng) {
  RandomGraph g;
  const int n_axes = 1 + static_cast<int>(rng() % 5);
  std::ostringstream os;
  for (int a = 0; a < n_axes; ++a) {
    os << "[axis" << a << "]\n";
    std::vector<std::string> cs;
    const int n = 1 + static_cast<int>(rng() % 4);
    for (int c = 0; c < n; ++c) cs.push_back("a" + std::to_string(a) + "c" + std::to_string(c));
    for (const auto& c : cs) os << c << " ";
    os << "\n";
    g.axes.push_back(cs);
  }
  const int lines = static_cast<int>(rng() % 6);
  for (int i = 0; i < lines && n_axes > 1; ++i) {
    const auto a = rng() % (n_axes - 1);
    const bool down = rng() % 2;
    const auto& from = g.axes[down ? a : a + 1];
    const auto& to = g.axes[down ? a + 1 : a];
    g.compat.emplace_back(from[rng() % from.size()], to[rng() % to.size()]);
    os << "compat: " << g.compat.back().first << " " << g.compat.back().second << "\n";
  }
  g.text = os.str();
  return g;
}

// Cartesian product filtered pairwise.
inline std::vector<std::vector<std::string>> brute_force(const RandomGraph& g) {
  std::map<std::string, std::size_t> axis_of;
  for (std::size_t a = 0; a < g.axes.size(); ++a)
    for (const auto& c : g.axes[a]) axis_of[c] = a;
  // allowed[x][axis] = set of choices x accepts on that axis
  std::map<std::string, std::map<std::size_t, std::set<std::string>>> allowed;
  for (const auto& [x, y] : g.compat) allowed[x][axis_of[y]].insert(y);
  const auto accepts = [&](const std::string& x, const std::string& y) {
    auto it = allowed.find(x);
    if (it == allowed.end()) return true;
    auto jt = it->second.find(axis_of[y]);
    return jt == it->second.end() || jt->second.count(y) > 0;
  };
  std::vector<std::vector<std::string>> out;
  if (g.axes.empty()) return out;
  std::vector<std::size_t> idx(g.axes.size(), 0);
  while (true) {
    std::vector<std::string> t;
    for (std::size_t a = 0; a < g.axes.size(); ++a) t.push_back(g.axes[a][idx[a]]);
    bool ok = true;
    for (std::size_t a = 0; a + 1 < t.size(); ++a) ok = ok && accepts(t[a], t[a + 1]) && accepts(t[a + 1], t[a]);
    if (ok) out.push_back(t);
    std::size_t a = g.axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < g.axes[a].size()) break;
      idx[a] = 0;
      if (a == 0) return out;
    }
  }
}

}  // namespace hero::testing
