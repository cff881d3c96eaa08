//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_MOLKIT_BONDS_HPP
#define TBG_MOLKIT_BONDS_HPP

#include <string>
#include <utility>
#include <vector>

#include "tbg/molkit/topology.hpp"

namespace tbg::molkit {

// Covalent radii in nanometres, indexed by Element.
struct CovalentRadiusTable {
  double radius[5] = {0.076, 0.071, 0.066, 0.031, 0.105};  // C N O H S
  double of(Element e) const { return radius[static_cast<int>(e)]; }
};

CovalentRadiusTable default_covalent_radii();

// Loads "symbol radius_nm" lines; '#' starts a comment. Missing elements keep
// their defaults; unknown symbols are a parse error.
CovalentRadiusTable load_covalent_radii(const std::string& path);

// Undirected bond graph with per-node labels (element symbol or atom class).
struct BondGraph {
  int n = 0;
  std::vector<std::string> labels;
  std::vector<std::pair<int, int>> edges;  // normalized i < j, sorted

  std::vector<std::vector<int>> adjacency() const;
  bool has_edge(int i, int j) const;
};

// Distance-interval bond perception: atoms i,j are bonded iff
// d(i,j) in [0.75, 1.25] * (r_i + r_j). Labels are element symbols.
BondGraph perceive_bonds(const Coords& x, const std::vector<Element>& elements,
                         const CovalentRadiusTable& radii = CovalentRadiusTable{});

// Reference graph from a topology's declared bond list, same label scheme.
BondGraph reference_graph(const Topology& topo);

}  // namespace tbg::molkit

#endif  // TBG_MOLKIT_BONDS_HPP
