//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/molkit/isomorphism.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tbg/errors.hpp"

namespace tbg::molkit {

namespace {

// One round of colour refinement. The signature dictionary is shared between
// the two graphs so equal colours mean "indistinguishable so far" across
// graphs, not just within one.
struct Refiner {
  std::map<std::pair<int, std::vector<int>>, int> dict;

  std::vector<int> round(const std::vector<int>& colors,
                         const std::vector<std::vector<int>>& adj) {
    std::vector<int> next(colors.size());
    for (size_t v = 0; v < colors.size(); ++v) {
      std::vector<int> nbh;
      nbh.reserve(adj[v].size());
      for (int u : adj[v]) nbh.push_back(colors[static_cast<size_t>(u)]);
      std::sort(nbh.begin(), nbh.end());
      auto key = std::make_pair(colors[v], std::move(nbh));
      auto it = dict.find(key);
      if (it == dict.end()) it = dict.emplace(std::move(key), static_cast<int>(dict.size())).first;
      next[v] = it->second;
    }
    return next;
  }
};

bool histograms_agree(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<int, int> ha, hb;
  for (int c : a) ++ha[c];
  for (int c : b) ++hb[c];
  return ha == hb;
}

}  // namespace

MatchResult match_topology(const BondGraph& sample, const BondGraph& reference,
                           std::int64_t budget) {
  MatchResult out;
  if (sample.n != reference.n || sample.edges.size() != reference.edges.size()) {
    return out;  // kMismatch
  }
  const int n = sample.n;
  if (n == 0) {
    out.status = MatchStatus::kMatched;
    return out;
  }

  // Initial colouring by node label, shared dictionary.
  std::map<std::string, int> label_ids;
  auto label_colors = [&](const BondGraph& g) {
    std::vector<int> c(static_cast<size_t>(g.n));
    for (int v = 0; v < g.n; ++v) {
      auto it = label_ids.find(g.labels[static_cast<size_t>(v)]);
      if (it == label_ids.end())
        it = label_ids.emplace(g.labels[static_cast<size_t>(v)], static_cast<int>(label_ids.size())).first;
      c[static_cast<size_t>(v)] = it->second;
    }
    return c;
  };
  std::vector<int> cs = label_colors(sample);
  std::vector<int> cr = label_colors(reference);
  if (!histograms_agree(cs, cr)) return out;

  const auto adj_s = sample.adjacency();
  const auto adj_r = reference.adjacency();

  // Refine until the joint partition stops splitting.
  size_t n_classes = label_ids.size();
  for (int iter = 0; iter < n; ++iter) {
    Refiner ref;
    std::vector<int> ns = ref.round(cs, adj_s);
    std::vector<int> nr = ref.round(cr, adj_r);
    if (!histograms_agree(ns, nr)) return out;
    size_t classes_now = ref.dict.size();
    cs = std::move(ns);
    cr = std::move(nr);
    if (classes_now == n_classes) break;
    n_classes = classes_now;
  }

  // Candidate lists per sample vertex: reference vertices of the same colour,
  // ascending index so the search is deterministic.
  std::vector<std::vector<int>> candidates(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < n; ++r)
      if (cs[static_cast<size_t>(i)] == cr[static_cast<size_t>(r)])
        candidates[static_cast<size_t>(i)].push_back(r);

  std::vector<int> perm(static_cast<size_t>(n), -1);      // sample -> reference
  std::vector<int> preimage(static_cast<size_t>(n), -1);  // reference -> sample

  // Feasibility of assigning sample vertex i to reference vertex r given the
  // current partial map: both neighbourhoods must agree on assigned vertices.
  auto feasible = [&](int i, int r) {
    if (preimage[static_cast<size_t>(r)] != -1) return false;
    for (int j : adj_s[static_cast<size_t>(i)]) {
      int rj = perm[static_cast<size_t>(j)];
      if (rj != -1 && !reference.has_edge(r, rj)) return false;
    }
    for (int q : adj_r[static_cast<size_t>(r)]) {
      int sj = preimage[static_cast<size_t>(q)];
      if (sj != -1 && !sample.has_edge(i, sj)) return false;
    }
    return true;
  };

  bool exhausted = false;
  // Backtracking: always extend at the unassigned vertex with the fewest
  // feasible images (lowest index on ties) and try images in ascending
  // reference order, so ties among equivalent atoms resolve to the
  // lowest-index branch first.
  auto search = [&](auto&& self, int depth) -> bool {
    if (depth == n) return true;
    int pick = -1;
    std::vector<int> pick_feasible;
    for (int i = 0; i < n; ++i) {
      if (perm[static_cast<size_t>(i)] != -1) continue;
      std::vector<int> f;
      for (int r : candidates[static_cast<size_t>(i)])
        if (feasible(i, r)) f.push_back(r);
      if (f.empty()) return false;
      if (pick == -1 || f.size() < pick_feasible.size()) {
        pick = i;
        pick_feasible = std::move(f);
        if (pick_feasible.size() == 1) break;
      }
    }
    for (int r : pick_feasible) {
      if (++out.nodes_explored > budget) {
        exhausted = true;
        return false;
      }
      perm[static_cast<size_t>(pick)] = r;
      preimage[static_cast<size_t>(r)] = pick;
      if (self(self, depth + 1)) return true;
      perm[static_cast<size_t>(pick)] = -1;
      preimage[static_cast<size_t>(r)] = -1;
      if (exhausted) return false;
    }
    return false;
  };

  if (search(search, 0)) {
    out.status = MatchStatus::kMatched;
    out.permutation = std::move(perm);
  } else if (exhausted) {
    out.status = MatchStatus::kBudgetExhausted;
  }
  return out;
}

Coords reorder_coords(const Coords& x, const std::vector<int>& permutation) {
  const size_t n = permutation.size();
  if (x.size() != 3 * n) throw contract_error("reorder_coords: size mismatch");
  std::vector<char> seen(n, 0);
  Coords y(x.size());
  for (size_t i = 0; i < n; ++i) {
    int p = permutation[i];
    if (p < 0 || static_cast<size_t>(p) >= n || seen[static_cast<size_t>(p)])
      throw contract_error("reorder_coords: not a permutation");
    seen[static_cast<size_t>(p)] = 1;
    for (int k = 0; k < 3; ++k) y[static_cast<size_t>(3 * p + k)] = x[3 * i + k];
  }
  return y;
}

}  // namespace tbg::molkit
