//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/vecfield/classtable.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "tbg/dataio/hash.hpp"

namespace tbg::vecfield {

using molkit::Element;
using molkit::Topology;

std::string atom_class_key(const Topology& topo, int atom) {
  if (atom < 0 || atom >= topo.n_atoms())
    throw contract_error("atom_class_key: atom index out of range");
  const auto adj = topo.adjacency();
  const auto& a = topo.atoms[static_cast<size_t>(atom)];

  std::vector<std::string> neigh;
  for (int j : adj[static_cast<size_t>(atom)])
    neigh.push_back(molkit::element_symbol(topo.atoms[static_cast<size_t>(j)].element));
  std::sort(neigh.begin(), neigh.end());

  std::string name_part = a.name;
  if (a.element == Element::kH && adj[static_cast<size_t>(atom)].size() == 1) {
    const int heavy = adj[static_cast<size_t>(atom)][0];
    name_part = "H:" + topo.atoms[static_cast<size_t>(heavy)].name;
  } else if (a.element == Element::kO && adj[static_cast<size_t>(atom)].size() == 1) {
    const int c = adj[static_cast<size_t>(atom)][0];
    if (topo.atoms[static_cast<size_t>(c)].element == Element::kC) {
      int n_oxygens = 0;
      for (int k : adj[static_cast<size_t>(c)])
        if (topo.atoms[static_cast<size_t>(k)].element == Element::kO) ++n_oxygens;
      // A carbon with two or more oxygens is a carboxyl carbon: its oxygens
      // keep their own names. Any other carbonyl-style oxygen is keyed by
      // the carbon so that siblings share a class.
      if (n_oxygens < 2) name_part = "O:" + topo.atoms[static_cast<size_t>(c)].name;
    }
  }

  std::string key = molkit::element_symbol(a.element);
  key += '|';
  for (size_t i = 0; i < neigh.size(); ++i) {
    if (i) key += ',';
    key += neigh[i];
  }
  key += '|';
  key += name_part;
  return key;
}

AtomClassTable::AtomClassTable(std::vector<std::string> sorted_keys) : keys_(std::move(sorted_keys)) {
  if (!std::is_sorted(keys_.begin(), keys_.end()))
    throw contract_error("AtomClassTable: keys must be sorted");
  if (std::adjacent_find(keys_.begin(), keys_.end()) != keys_.end())
    throw contract_error("AtomClassTable: duplicate key");
}

AtomClassTable AtomClassTable::build(const std::vector<Topology>& corpus) {
  std::set<std::string> keys;
  for (const auto& topo : corpus)
    for (int i = 0; i < topo.n_atoms(); ++i) keys.insert(atom_class_key(topo, i));
  return AtomClassTable(std::vector<std::string>(keys.begin(), keys.end()));
}

int AtomClassTable::index_of(const std::string& key) const {
  const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return -1;
  return static_cast<int>(it - keys_.begin());
}

std::vector<int> AtomClassTable::assign(const Topology& topo) const {
  std::vector<int> out(static_cast<size_t>(topo.n_atoms()));
  for (int i = 0; i < topo.n_atoms(); ++i) {
    const std::string key = atom_class_key(topo, i);
    const int idx = index_of(key);
    if (idx < 0)
      throw contract_error("unknown atom class for atom " + std::to_string(i) + " ('" +
                           topo.atoms[static_cast<size_t>(i)].name + "' in " + topo.name +
                           "): key " + key);
    out[static_cast<size_t>(i)] = idx;
  }
  return out;
}

std::string AtomClassTable::serialize() const {
  std::ostringstream os;
  os << "atom-class-table v1 " << keys_.size() << "\n";
  for (size_t i = 0; i < keys_.size(); ++i) os << i << ' ' << keys_[i] << "\n";
  return os.str();
}

AtomClassTable AtomClassTable::parse(const std::string& text) {
  std::istringstream is(text);
  std::string word_a, word_b;
  std::size_t count = 0;
  if (!(is >> word_a >> word_b >> count) || word_a != "atom-class-table" || word_b != "v1")
    throw parse_error("atom class table: bad header", "<memory>");
  std::vector<std::string> keys;
  keys.reserve(count);
  std::size_t index = 0;
  std::string key;
  while (is >> index >> key) {
    if (index != keys.size())
      throw parse_error("atom class table: non-contiguous index " + std::to_string(index),
                        "<memory>");
    keys.push_back(key);
  }
  if (keys.size() != count)
    throw parse_error("atom class table: expected " + std::to_string(count) + " entries, got " +
                          std::to_string(keys.size()),
                      "<memory>");
  return AtomClassTable(std::move(keys));
}

std::uint64_t AtomClassTable::content_hash() const { return dataio::fnv1a64(serialize()); }

}  // namespace tbg::vecfield
