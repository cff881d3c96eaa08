//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_MOLKIT_TOPOLOGY_HPP
#define TBG_MOLKIT_TOPOLOGY_HPP

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "tbg/errors.hpp"

namespace tbg::molkit {

// Flat xyz coordinates in nanometres, atom-major: [x0 y0 z0 x1 y1 z1 ...].
using Coords = std::vector<double>;

enum class Element { kC, kN, kO, kH, kS };

Element element_from_symbol(const std::string& s);
const char* element_symbol(Element e);

struct Atom {
  Element element = Element::kC;
  std::string res_name;   // residue template name, e.g. "ALA"
  int res_pos = 1;        // 1-based position in the chain
  std::string name;       // residue-template atom name, e.g. "CA"
};

// Four substituents in priority order plus the handedness sign the reference
// structure carries (+1 or -1, sign of det[b-a, c-a, d-a]).
struct ChiralCenter {
  int center = -1;
  std::array<int, 4> substituents{};
  int ref_sign = 0;
};

struct Topology {
  std::string name;
  std::vector<Atom> atoms;
  std::vector<std::pair<int, int>> bonds;  // normalized i < j
  std::vector<ChiralCenter> chirals;

  int n_atoms() const { return static_cast<int>(atoms.size()); }

  void add_atom(Element e, const std::string& res_name, int res_pos, const std::string& name) {
    atoms.push_back(Atom{e, res_name, res_pos, name});
  }
  void add_bond(int i, int j) {
    if (i == j || i < 0 || j < 0) throw contract_error("Topology: bad bond");
    bonds.emplace_back(std::min(i, j), std::max(i, j));
  }

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(atoms.size());
    for (auto [i, j] : bonds) {
      adj[static_cast<size_t>(i)].push_back(j);
      adj[static_cast<size_t>(j)].push_back(i);
    }
    return adj;
  }
};

inline const double* atom_xyz(const Coords& x, int i) { return x.data() + 3 * i; }
inline double* atom_xyz(Coords& x, int i) { return x.data() + 3 * i; }

}  // namespace tbg::molkit

#endif  // TBG_MOLKIT_TOPOLOGY_HPP
