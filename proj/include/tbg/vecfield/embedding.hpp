//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_VECFIELD_EMBEDDING_HPP
#define TBG_VECFIELD_EMBEDDING_HPP

#include <string>
#include <vector>

#include "tbg/molkit/topology.hpp"
#include "tbg/numcore/matrix.hpp"
#include "tbg/vecfield/classtable.hpp"

namespace tbg::vecfield {

// Architecture variants, ordered by how much identity they expose:
//   kTbg          - element one-hot only (5 classes)
//   kTbgBackbone  - named backbone atoms get their own classes, everything
//                   else falls back to the element classes (8 + 5 = 13)
//   kTbgFull      - canonical atom classes from a generated table, plus
//                   optional residue-identity and residue-position blocks
enum class Variant { kTbg, kTbgBackbone, kTbgFull };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& s);

// The 20 residue-identity classes, alphabetical three-letter codes.
int residue_class(const std::string& res_name);  // throws contract_error
constexpr int kNumResidueClasses = 20;

// Backbone atom names that receive dedicated classes in kTbgBackbone.
const std::vector<std::string>& backbone_class_names();  // 8 names

struct EmbeddingOptions {
  Variant variant = Variant::kTbgFull;
  // kTbgFull only: append the residue-identity block (20) and the
  // residue-position block (n_positions). Single-molecule runs omit both.
  bool residue_blocks = true;
  int n_positions = 2;
};

// Width of the embedding these options produce.
int embedding_width(const AtomClassTable& table, const EmbeddingOptions& opts);

// One embedding row per atom. Deterministic; atoms the class rules declare
// indistinguishable receive identical rows. Throws contract_error when an
// atom has no class, an unknown residue name is met, or a residue position
// exceeds n_positions.
numcore::Matrix build_embedding(const molkit::Topology& topo, const AtomClassTable& table,
                                const EmbeddingOptions& opts);

}  // namespace tbg::vecfield

#endif  // TBG_VECFIELD_EMBEDDING_HPP
