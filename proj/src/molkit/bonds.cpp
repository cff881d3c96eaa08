//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/molkit/bonds.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "tbg/molkit/geometry.hpp"

namespace tbg::molkit {

CovalentRadiusTable default_covalent_radii() { return CovalentRadiusTable{}; }

CovalentRadiusTable load_covalent_radii(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open covalent radius table", path);
  CovalentRadiusTable table;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ss(line);
    std::string sym;
    if (!(ss >> sym)) continue;
    double r = 0.0;
    if (!(ss >> r) || r <= 0.0)
      throw parse_error("bad radius entry", path, line_no);
    try {
      table.radius[static_cast<int>(element_from_symbol(sym))] = r;
    } catch (const contract_error&) {
      throw parse_error("unknown element symbol '" + sym + "'", path, line_no);
    }
  }
  return table;
}

std::vector<std::vector<int>> BondGraph::adjacency() const {
  std::vector<std::vector<int>> adj(static_cast<size_t>(n));
  for (auto [i, j] : edges) {
    adj[static_cast<size_t>(i)].push_back(j);
    adj[static_cast<size_t>(j)].push_back(i);
  }
  return adj;
}

bool BondGraph::has_edge(int i, int j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(i, j));
}

BondGraph perceive_bonds(const Coords& x, const std::vector<Element>& elements,
                         const CovalentRadiusTable& radii) {
  const int n = static_cast<int>(elements.size());
  if (static_cast<int>(x.size()) != 3 * n)
    throw contract_error("perceive_bonds: coordinate/element count mismatch");

  BondGraph g;
  g.n = n;
  g.labels.reserve(static_cast<size_t>(n));
  for (Element e : elements) g.labels.emplace_back(element_symbol(e));

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double sum = radii.of(elements[static_cast<size_t>(i)]) +
                         radii.of(elements[static_cast<size_t>(j)]);
      const double d = distance(x, i, j);
      if (d >= 0.75 * sum && d <= 1.25 * sum) g.edges.emplace_back(i, j);
    }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

BondGraph reference_graph(const Topology& topo) {
  BondGraph g;
  g.n = topo.n_atoms();
  g.labels.reserve(topo.atoms.size());
  for (const auto& a : topo.atoms) g.labels.emplace_back(element_symbol(a.element));
  g.edges = topo.bonds;
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

}  // namespace tbg::molkit
