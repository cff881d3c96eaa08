//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/vecfield/embedding.hpp"

#include <algorithm>
#include <array>

#include "tbg/errors.hpp"

namespace tbg::vecfield {

namespace {

constexpr int kNumElements = 5;  // C N O H S

int element_class(molkit::Element e) { return static_cast<int>(e); }

const std::array<const char*, kNumResidueClasses> kResidueNames = {
    "ALA", "ARG", "ASN", "ASP", "CYS", "GLN", "GLU", "GLY", "HIS", "ILE",
    "LEU", "LYS", "MET", "PHE", "PRO", "SER", "THR", "TRP", "TYR", "VAL"};

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kTbg: return "tbg";
    case Variant::kTbgBackbone: return "tbg-backbone";
    case Variant::kTbgFull: return "tbg-full";
  }
  throw contract_error("variant_name: bad enum value");
}

Variant variant_from_name(const std::string& s) {
  if (s == "tbg") return Variant::kTbg;
  if (s == "tbg-backbone") return Variant::kTbgBackbone;
  if (s == "tbg-full") return Variant::kTbgFull;
  throw contract_error("variant_from_name: unknown variant '" + s + "'");
}

int residue_class(const std::string& res_name) {
  auto it = std::find(kResidueNames.begin(), kResidueNames.end(), res_name);
  if (it == kResidueNames.end())
    throw contract_error("residue_class: unknown residue '" + res_name + "'");
  return static_cast<int>(it - kResidueNames.begin());
}

const std::vector<std::string>& backbone_class_names() {
  static const std::vector<std::string> kNames = {"N", "CA", "C", "O", "HN", "HA", "CM", "NT"};
  return kNames;
}

int embedding_width(const AtomClassTable& table, const EmbeddingOptions& opts) {
  switch (opts.variant) {
    case Variant::kTbg:
      return kNumElements;
    case Variant::kTbgBackbone:
      return static_cast<int>(backbone_class_names().size()) + kNumElements;
    case Variant::kTbgFull: {
      int w = table.size();
      if (opts.residue_blocks) w += kNumResidueClasses + opts.n_positions;
      return w;
    }
  }
  throw contract_error("embedding_width: bad variant");
}

numcore::Matrix build_embedding(const molkit::Topology& topo, const AtomClassTable& table,
                                const EmbeddingOptions& opts) {
  const int n = topo.n_atoms();
  const int width = embedding_width(table, opts);
  numcore::Matrix emb(n, width);

  // Class index per atom in the variant's leading one-hot block.
  std::vector<int> cls(static_cast<size_t>(n), -1);
  switch (opts.variant) {
    case Variant::kTbg:
      for (int i = 0; i < n; ++i) cls[static_cast<size_t>(i)] = element_class(topo.atoms[static_cast<size_t>(i)].element);
      break;
    case Variant::kTbgBackbone: {
      const auto& names = backbone_class_names();
      for (int i = 0; i < n; ++i) {
        const auto& a = topo.atoms[static_cast<size_t>(i)];
        auto it = std::find(names.begin(), names.end(), a.name);
        cls[static_cast<size_t>(i)] =
            it != names.end() ? static_cast<int>(it - names.begin())
                              : static_cast<int>(names.size()) + element_class(a.element);
      }
      break;
    }
    case Variant::kTbgFull:
      cls = table.assign(topo);
      break;
  }
  for (int i = 0; i < n; ++i) emb(i, cls[static_cast<size_t>(i)]) = 1.0;

  if (opts.variant == Variant::kTbgFull && opts.residue_blocks) {
    const int res_base = table.size();
    const int pos_base = res_base + kNumResidueClasses;
    for (int i = 0; i < n; ++i) {
      const auto& a = topo.atoms[static_cast<size_t>(i)];
      emb(i, res_base + residue_class(a.res_name)) = 1.0;
      const int pos = a.res_pos - 1;
      if (pos < 0 || pos >= opts.n_positions)
        throw contract_error("build_embedding: residue position " + std::to_string(a.res_pos) +
                             " outside 1.." + std::to_string(opts.n_positions));
      emb(i, pos_base + pos) = 1.0;
    }
  }
  return emb;
}

}  // namespace tbg::vecfield
