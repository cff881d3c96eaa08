//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_ERRORS_HPP
#define TBG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tbg {

// Base class for everything thrown by this library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An API precondition was violated (bad shapes, bad arguments, ...).
class contract_error : public error {
 public:
  using error::error;
};

// A computation produced NaN/Inf or an otherwise unusable value.
// `node` identifies the offending tape node when applicable, else -1.
class numeric_error : public error {
 public:
  explicit numeric_error(const std::string& what, long node_index = -1)
      : error(what), node(node_index) {}
  long node;
};

// Malformed input file. Carries path and 1-based line number (0 = n/a).
class parse_error : public error {
 public:
  parse_error(const std::string& what, std::string file_path, long line_no = 0)
      : error(what + " (" + file_path +
              (line_no > 0 ? ":" + std::to_string(line_no) : "") + ")"),
        path(std::move(file_path)),
        line(line_no) {}
  std::string path;
  long line;
};

// Hash-chain or cross-reference mismatch between artifacts.
class integrity_error : public error {
 public:
  using error::error;
};

// Invalid or inconsistent run configuration (CLI exit code 2).
class config_error : public error {
 public:
  using error::error;
};

}  // namespace tbg

#endif  // TBG_ERRORS_HPP
