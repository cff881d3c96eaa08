//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_DATAIO_HASH_HPP
#define TBG_DATAIO_HASH_HPP

#include <cstdint>
#include <string>

namespace tbg::dataio {

// FNV-1a 64-bit over raw bytes. Stable across platforms; used to fingerprint
// serialized tables, datasets, and checkpoint sections.
std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64(const std::string& s);

// Lower-case 16-digit hex rendering of a hash.
std::string hash_hex(std::uint64_t h);

}  // namespace tbg::dataio

#endif  // TBG_DATAIO_HASH_HPP
