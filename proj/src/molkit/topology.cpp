//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/molkit/topology.hpp"

namespace tbg::molkit {

Element element_from_symbol(const std::string& s) {
  if (s == "C") return Element::kC;
  if (s == "N") return Element::kN;
  if (s == "O") return Element::kO;
  if (s == "H") return Element::kH;
  if (s == "S") return Element::kS;
  throw contract_error("unknown element symbol: " + s);
}

const char* element_symbol(Element e) {
  switch (e) {
    case Element::kC: return "C";
    case Element::kN: return "N";
    case Element::kO: return "O";
    case Element::kH: return "H";
    case Element::kS: return "S";
  }
  return "?";
}

}  // namespace tbg::molkit
