//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_NUMCORE_PARAMS_HPP
#define TBG_NUMCORE_PARAMS_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "tbg/errors.hpp"

namespace tbg::numcore {

// One named matrix-shaped slice of the flat parameter vector.
struct ParamSegment {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::size_t offset = 0;
  std::size_t count() const { return static_cast<std::size_t>(rows) * cols; }
};

// Flat float64 parameter vector with a named segment layout. The optimizer
// sees the flat view; network builders see named matrices.
class ParamVector {
 public:
  ParamVector() = default;

  // Appends a segment and zero-initializes its storage.
  int add_segment(const std::string& name, int rows, int cols) {
    if (rows <= 0 || cols <= 0) throw contract_error("ParamVector: empty segment " + name);
    for (const auto& s : segments_)
      if (s.name == name) throw contract_error("ParamVector: duplicate segment " + name);
    ParamSegment seg{name, rows, cols, data_.size()};
    segments_.push_back(seg);
    data_.resize(data_.size() + seg.count(), 0.0);
    return static_cast<int>(segments_.size()) - 1;
  }

  std::size_t size() const { return data_.size(); }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& flat() { return data_; }
  const std::vector<double>& flat() const { return data_; }

  int n_segments() const { return static_cast<int>(segments_.size()); }
  const ParamSegment& segment(int i) const { return segments_.at(i); }
  const std::vector<ParamSegment>& segments() const { return segments_; }

  double* segment_data(int i) { return data_.data() + segments_.at(i).offset; }
  const double* segment_data(int i) const { return data_.data() + segments_.at(i).offset; }

  int find(const std::string& name) const {
    for (int i = 0; i < n_segments(); ++i)
      if (segments_[i].name == name) return i;
    return -1;
  }

  // Layouts must match exactly for checkpoint restore and optimizer state.
  bool same_layout(const ParamVector& o) const {
    if (segments_.size() != o.segments_.size()) return false;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      const auto& a = segments_[i];
      const auto& b = o.segments_[i];
      if (a.name != b.name || a.rows != b.rows || a.cols != b.cols) return false;
    }
    return true;
  }

 private:
  std::vector<double> data_;
  std::vector<ParamSegment> segments_;
};

}  // namespace tbg::numcore

#endif  // TBG_NUMCORE_PARAMS_HPP
