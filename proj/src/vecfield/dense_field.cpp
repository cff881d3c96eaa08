//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/vecfield/dense_field.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>

#include "tbg/errors.hpp"
#include "tbg/numcore/dual.hpp"
#include "tbg/numcore/rng.hpp"

namespace tbg::vecfield {

namespace {

using numcore::Dual;
using numcore::Matrix;
using numcore::ParamVector;
using numcore::Tape;
using std::exp;

template <typename T>
T stable_sigmoid(T z) {
  if (numcore::value_of(z) >= 0.0) {
    const T e = exp(-z);
    return T(1.0) / (T(1.0) + e);
  }
  const T e = exp(z);
  return e / (T(1.0) + e);
}

template <typename T>
void linear(const double* w, const double* b, int in, int out, const T* src, T* dst) {
  for (int o = 0; o < out; ++o) {
    T acc(0.0);
    for (int k = 0; k < in; ++k) acc += src[k] * T(w[k * out + o]);
    dst[o] = acc + T(b[o]);
  }
}

void check_params(const DenseFieldConfig& cfg, const ParamVector& params) {
  if (params.n_segments() != 2 * (cfg.n_layers + 1))
    throw contract_error("dense_field: parameter layout does not match config");
  for (int k = 0; k <= cfg.n_layers; ++k) {
    const int in = k == 0 ? 1 + cfg.n_state : cfg.n_hidden;
    const int out = k == cfg.n_layers ? cfg.n_state : cfg.n_hidden;
    const auto& w = params.segment(2 * k);
    const auto& b = params.segment(2 * k + 1);
    if (w.rows != in || w.cols != out || b.rows != 1 || b.cols != out)
      throw contract_error("dense_field: segment " + w.name + " shape mismatch");
  }
}

template <typename T>
void dense_eval(const DenseFieldConfig& cfg, const ParamVector& params, double t, const T* x,
                T* v_out) {
  std::vector<T> buf_a(static_cast<size_t>(1) + std::max(cfg.n_state, cfg.n_hidden));
  std::vector<T> buf_b(static_cast<size_t>(std::max(cfg.n_state, cfg.n_hidden)));

  buf_a[0] = T(t);
  for (int k = 0; k < cfg.n_state; ++k) buf_a[static_cast<size_t>(1 + k)] = x[k];

  int cur_in = 1 + cfg.n_state;
  T* src = buf_a.data();
  T* dst = buf_b.data();
  for (int k = 0; k <= cfg.n_layers; ++k) {
    const bool last = k == cfg.n_layers;
    const int out = last ? cfg.n_state : cfg.n_hidden;
    linear(params.segment_data(2 * k), params.segment_data(2 * k + 1), cur_in, out, src, dst);
    if (!last)
      for (int o = 0; o < out; ++o) dst[o] = dst[o] * stable_sigmoid(dst[o]);
    std::swap(src, dst);
    cur_in = out;
  }
  for (int k = 0; k < cfg.n_state; ++k) v_out[k] = src[k];
}

}  // namespace

void DenseFieldConfig::validate() const {
  if (n_state < 1) throw config_error("DenseFieldConfig: n_state must be >= 1");
  if (n_hidden < 1) throw config_error("DenseFieldConfig: n_hidden must be >= 1");
  if (n_layers < 1) throw config_error("DenseFieldConfig: n_layers must be >= 1");
}

numcore::ParamVector init_dense_params(const DenseFieldConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  ParamVector p;
  numcore::Rng rng(seed);
  for (int k = 0; k <= cfg.n_layers; ++k) {
    const bool last = k == cfg.n_layers;
    const int in = k == 0 ? 1 + cfg.n_state : cfg.n_hidden;
    const int out = last ? cfg.n_state : cfg.n_hidden;
    const std::string base = last ? "out" : "lin" + std::to_string(k);
    const int wi = p.add_segment(base + ".w", in, out);
    const int bi = p.add_segment(base + ".b", 1, out);
    if (last) continue;  // zero head: fresh field == 0
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (int idx : {wi, bi}) {
      double* data = p.segment_data(idx);
      for (size_t c = 0; c < p.segment(idx).count(); ++c) data[c] = rng.uniform(-bound, bound);
    }
  }
  return p;
}

std::vector<double> dense_forward(const DenseFieldConfig& cfg, const ParamVector& params, double t,
                                  const std::vector<double>& x) {
  cfg.validate();
  check_params(cfg, params);
  if (static_cast<int>(x.size()) != cfg.n_state)
    throw contract_error("dense_forward: state size mismatch");
  std::vector<double> v(x.size());
  dense_eval<double>(cfg, params, t, x.data(), v.data());
  for (double c : v)
    if (!std::isfinite(c)) throw numeric_error("dense_forward: non-finite velocity");
  return v;
}

double dense_divergence(const DenseFieldConfig& cfg, const ParamVector& params, double t,
                        const std::vector<double>& x, std::vector<double>* v_out) {
  cfg.validate();
  check_params(cfg, params);
  if (static_cast<int>(x.size()) != cfg.n_state)
    throw contract_error("dense_divergence: state size mismatch");

  std::vector<Dual> xd(x.size());
  std::vector<Dual> vd(x.size());
  double div = 0.0;
  for (size_t c = 0; c < x.size(); ++c) {
    for (size_t k = 0; k < x.size(); ++k) xd[k] = Dual(x[k], k == c ? 1.0 : 0.0);
    dense_eval<Dual>(cfg, params, t, xd.data(), vd.data());
    div += vd[c].d;
    if (c == 0 && v_out) {
      v_out->resize(x.size());
      for (size_t k = 0; k < x.size(); ++k) (*v_out)[k] = vd[k].v;
    }
  }
  if (!std::isfinite(div)) throw numeric_error("dense_divergence: non-finite trace");
  return div;
}

Tape::NodeId dense_forward_tape(Tape& tape, const DenseFieldConfig& cfg,
                                const std::vector<Tape::NodeId>& param_leaves, double t,
                                Tape::NodeId x_node) {
  cfg.validate();
  if (static_cast<int>(param_leaves.size()) != 2 * (cfg.n_layers + 1))
    throw contract_error("dense_forward_tape: leaf count does not match config");
  const Matrix& xval = tape.value(x_node);
  if (xval.cols() != cfg.n_state) throw contract_error("dense_forward_tape: state width mismatch");

  Matrix t_col(xval.rows(), 1, t);
  Tape::NodeId z = tape.concat_cols(tape.constant(std::move(t_col)), x_node);
  for (int k = 0; k <= cfg.n_layers; ++k) {
    z = tape.add_rowvec(tape.matmul(z, param_leaves[static_cast<size_t>(2 * k)]),
                        param_leaves[static_cast<size_t>(2 * k + 1)]);
    if (k != cfg.n_layers) z = tape.silu(z);
  }
  return z;
}

VectorField dense_field(const DenseFieldConfig& cfg, const ParamVector& params) {
  cfg.validate();
  check_params(cfg, params);
  auto shared = std::make_shared<std::pair<DenseFieldConfig, ParamVector>>(cfg, params);

  VectorField field;
  field.n_state = cfg.n_state;
  field.eval = [shared](double t, const double* x, double* v) {
    dense_eval<double>(shared->first, shared->second, t, x, v);
    for (int k = 0; k < shared->first.n_state; ++k)
      if (!std::isfinite(v[k])) throw numeric_error("dense_field: non-finite velocity");
  };
  field.divergence = [shared](double t, const double* x, double* v) {
    std::vector<double> xv(x, x + shared->first.n_state);
    std::vector<double> vout;
    const double div =
        dense_divergence(shared->first, shared->second, t, xv, v ? &vout : nullptr);
    if (v)
      for (size_t k = 0; k < vout.size(); ++k) v[k] = vout[k];
    return div;
  };
  return field;
}

}  // namespace tbg::vecfield
