//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_VECFIELD_CLASSTABLE_HPP
#define TBG_VECFIELD_CLASSTABLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "tbg/molkit/topology.hpp"

namespace tbg::vecfield {

// Canonical atom-class key, rendered as a single string:
//   "<element>|<sorted neighbor elements>|<name part>"
// The name part is the residue-template atom name, except:
//   - hydrogens are keyed by their heavy neighbor's name ("H:<heavy name>"),
//     so hydrogens on the same heavy atom share one class;
//   - an oxygen whose only neighbor is a non-carboxyl carbon is keyed by that
//     carbon's name ("O:<carbon name>"), so such oxygens on one carbon share
//     one class (a carboxyl carbon, i.e. one with two or more oxygen
//     neighbors, keeps its oxygens distinct).
// Whole groups (e.g. two methyls on one carbon) are never merged: their
// hydrogens inherit different heavy-atom names.
std::string atom_class_key(const molkit::Topology& topo, int atom);

// An ordered class dictionary generated from a topology corpus. Keys are
// sorted, so the table is independent of corpus order.
class AtomClassTable {
 public:
  AtomClassTable() = default;
  explicit AtomClassTable(std::vector<std::string> sorted_keys);

  static AtomClassTable build(const std::vector<molkit::Topology>& corpus);

  int size() const { return static_cast<int>(keys_.size()); }
  const std::vector<std::string>& keys() const { return keys_; }
  // Index of a key, or -1 when the table does not contain it.
  int index_of(const std::string& key) const;

  // Class index per atom; throws contract_error naming the atom when the
  // table has no class for it.
  std::vector<int> assign(const molkit::Topology& topo) const;

  // Structured text: header line, then "<index> <key>" lines.
  std::string serialize() const;
  static AtomClassTable parse(const std::string& text);

  // Fingerprint of the serialized form, recorded in checkpoints.
  std::uint64_t content_hash() const;

 private:
  std::vector<std::string> keys_;
};

}  // namespace tbg::vecfield

#endif  // TBG_VECFIELD_CLASSTABLE_HPP
