//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/vecfield/egnn.hpp"

#include <cmath>
#include <cstring>
#include <memory>
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
using std::exp;   // with the Dual overloads found by ADL, templated code
using std::sqrt;  // below works for both scalar types

constexpr double kDistEps = 1e-12;  // keeps sqrt differentiable at coincidence

enum SubNet { kNetE = 0, kNetD = 1, kNetM = 2, kNetH = 3 };
enum Piece { kW1 = 0, kB1 = 1, kW2 = 2, kB2 = 3 };

int seg_index(int layer, SubNet net, Piece piece) { return 16 * layer + 4 * net + piece; }

const char* net_tag(SubNet net) {
  switch (net) {
    case kNetE: return "e";
    case kNetD: return "d";
    case kNetM: return "m";
    case kNetH: return "h";
  }
  throw contract_error("net_tag: bad subnet");
}

// Mirrors the tape's numerically stable sigmoid so the plain path and the
// recorded path agree to rounding.
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
T silu(T z) {
  return z * stable_sigmoid(z);
}

// dst = src * W + b with W (in x out) row-major; accumulation over the input
// index ascending, bias added last — the same association order the tape's
// matmul + add_rowvec pair produces.
template <typename T>
void linear(const double* w, const double* b, int in, int out, const T* src, T* dst) {
  for (int o = 0; o < out; ++o) {
    T acc(0.0);
    for (int k = 0; k < in; ++k) acc += src[k] * T(w[k * out + o]);
    dst[o] = acc + T(b[o]);
  }
}

struct LinearView {
  const double* w1;
  const double* b1;
  const double* w2;
  const double* b2;
  int in, hidden, out;
};

LinearView subnet_view(const ParamVector& p, int layer, SubNet net) {
  const int i1 = seg_index(layer, net, kW1);
  const auto& w1 = p.segment(i1);
  const auto& w2 = p.segment(seg_index(layer, net, kW2));
  return LinearView{p.segment_data(i1), p.segment_data(seg_index(layer, net, kB1)),
                    p.segment_data(seg_index(layer, net, kW2)),
                    p.segment_data(seg_index(layer, net, kB2)), w1.rows, w1.cols, w2.cols};
}

// One-hidden-layer perceptron; `end_silu` applies the output activation used
// by the message network.
template <typename T>
void mlp(const LinearView& v, const T* src, T* hidden_buf, T* dst, bool end_silu) {
  linear(v.w1, v.b1, v.in, v.hidden, src, hidden_buf);
  for (int k = 0; k < v.hidden; ++k) hidden_buf[k] = silu(hidden_buf[k]);
  linear(v.w2, v.b2, v.hidden, v.out, hidden_buf, dst);
  if (end_silu)
    for (int k = 0; k < v.out; ++k) dst[k] = silu(dst[k]);
}

// Expected (rows, cols) of every parameter segment under cfg, in layout
// order. Guards the raw-pointer fast path against a vector built for a
// different architecture.
void check_params(const EgnnConfig& cfg, const ParamVector& params) {
  if (params.n_segments() != 16 * cfg.n_layers)
    throw contract_error("egnn: parameter layout does not match config layer count");
  const int hdim = cfg.feature_dim();
  const int hid = cfg.n_hidden;
  const int net_in[4] = {2 * hdim + 1, hid, hid, hdim + hid};
  const int net_out[4] = {hid, 1, 1, hdim};
  for (int l = 0; l < cfg.n_layers; ++l)
    for (int net = 0; net < 4; ++net) {
      const int shapes[4][2] = {{net_in[net], hid}, {1, hid}, {hid, net_out[net]}, {1, net_out[net]}};
      for (int piece = 0; piece < 4; ++piece) {
        const auto& seg = params.segment(16 * l + 4 * net + piece);
        if (seg.rows != shapes[piece][0] || seg.cols != shapes[piece][1])
          throw contract_error("egnn: segment " + seg.name + " has shape " +
                               std::to_string(seg.rows) + "x" + std::to_string(seg.cols) +
                               ", config expects " + std::to_string(shapes[piece][0]) + "x" +
                               std::to_string(shapes[piece][1]));
      }
    }
}

void check_shapes(const EgnnConfig& cfg, const ParamVector& params, const std::vector<double>& x,
                  const Matrix& emb, int dim) {
  cfg.validate();
  const int n = emb.rows();
  if (n < 2) throw contract_error("egnn: need at least 2 atoms");
  if (dim < 1) throw contract_error("egnn: spatial dimension must be positive");
  if (emb.cols() != cfg.n_embedding)
    throw contract_error("egnn: embedding width " + std::to_string(emb.cols()) +
                         " does not match config n_embedding " + std::to_string(cfg.n_embedding));
  if (static_cast<int>(x.size()) != n * dim)
    throw contract_error("egnn: coordinate size " + std::to_string(x.size()) + " != n_atoms*dim");
  check_params(cfg, params);
}

// Shared forward pass for plain values (T = double) and directional
// derivatives (T = Dual). Buffers are reused across layers; the pair loop is
// i-major with j ascending so accumulation order matches the recorded path.
template <typename T>
void egnn_eval(const EgnnConfig& cfg, const ParamVector& params, double t, const T* x0, int n,
               int dim, const Matrix& emb, T* v_out) {
  const int hdim = cfg.feature_dim();
  const int mdim = subnet_view(params, 0, kNetE).out;

  std::vector<T> h(static_cast<size_t>(n) * hdim);
  for (int i = 0; i < n; ++i) {
    h[static_cast<size_t>(i) * hdim] = T(t);
    for (int k = 0; k < cfg.n_embedding; ++k)
      h[static_cast<size_t>(i) * hdim + 1 + k] = T(emb(i, k));
  }

  std::vector<T> xcur(x0, x0 + static_cast<size_t>(n) * dim);
  std::vector<T> xagg(static_cast<size_t>(n) * dim);
  std::vector<T> magg(static_cast<size_t>(n) * mdim);
  std::vector<T> hnew(static_cast<size_t>(n) * hdim);

  std::vector<T> ein(static_cast<size_t>(2) * hdim + 1);
  std::vector<T> msg(static_cast<size_t>(mdim));
  std::vector<T> hidden(static_cast<size_t>(cfg.n_hidden));
  std::vector<T> hin(static_cast<size_t>(hdim) + mdim);
  std::vector<T> dx(static_cast<size_t>(dim));

  for (int l = 0; l < cfg.n_layers; ++l) {
    const LinearView ve = subnet_view(params, l, kNetE);
    const LinearView vd = subnet_view(params, l, kNetD);
    const LinearView vm = subnet_view(params, l, kNetM);
    const LinearView vh = subnet_view(params, l, kNetH);

    std::fill(xagg.begin(), xagg.end(), T(0.0));
    std::fill(magg.begin(), magg.end(), T(0.0));

    for (int i = 0; i < n; ++i) {
      const T* hi = &h[static_cast<size_t>(i) * hdim];
      const T* xi = &xcur[static_cast<size_t>(i) * dim];
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const T* hj = &h[static_cast<size_t>(j) * hdim];
        const T* xj = &xcur[static_cast<size_t>(j) * dim];

        T d2(0.0);
        for (int k = 0; k < dim; ++k) {
          dx[static_cast<size_t>(k)] = xi[k] - xj[k];
          d2 += dx[static_cast<size_t>(k)] * dx[static_cast<size_t>(k)];
        }
        const T d = sqrt(d2 + T(kDistEps));

        for (int k = 0; k < hdim; ++k) ein[static_cast<size_t>(k)] = hi[k];
        for (int k = 0; k < hdim; ++k) ein[static_cast<size_t>(hdim + k)] = hj[k];
        ein[static_cast<size_t>(2 * hdim)] = d2;
        mlp(ve, ein.data(), hidden.data(), msg.data(), /*end_silu=*/true);

        T dscal;
        mlp(vd, msg.data(), hidden.data(), &dscal, /*end_silu=*/false);
        const T inv = T(1.0) / (d + T(1.0));
        const T coef = dscal * inv;
        T* xacc = &xagg[static_cast<size_t>(i) * dim];
        for (int k = 0; k < dim; ++k) xacc[k] += dx[static_cast<size_t>(k)] * coef;

        T att;
        mlp(vm, msg.data(), hidden.data(), &att, /*end_silu=*/false);
        if (cfg.attention_sigmoid) att = stable_sigmoid(att);
        T* macc = &magg[static_cast<size_t>(i) * mdim];
        for (int k = 0; k < mdim; ++k) macc[k] += msg[static_cast<size_t>(k)] * att;
      }
    }

    for (size_t k = 0; k < xcur.size(); ++k) xcur[k] += xagg[k];

    for (int i = 0; i < n; ++i) {
      const T* hi = &h[static_cast<size_t>(i) * hdim];
      for (int k = 0; k < hdim; ++k) hin[static_cast<size_t>(k)] = hi[k];
      for (int k = 0; k < mdim; ++k) hin[static_cast<size_t>(hdim + k)] = magg[static_cast<size_t>(i) * mdim + k];
      mlp(vh, hin.data(), hidden.data(), &hnew[static_cast<size_t>(i) * hdim], /*end_silu=*/false);
    }
    h.swap(hnew);
  }

  // v = (x^L - x^0) minus its per-axis mean over atoms.
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < dim; ++k)
      v_out[static_cast<size_t>(i) * dim + k] =
          xcur[static_cast<size_t>(i) * dim + k] - x0[static_cast<size_t>(i) * dim + k];
  for (int k = 0; k < dim; ++k) {
    T mean(0.0);
    for (int i = 0; i < n; ++i) mean += v_out[static_cast<size_t>(i) * dim + k];
    mean *= T(1.0 / n);
    for (int i = 0; i < n; ++i) v_out[static_cast<size_t>(i) * dim + k] -= mean;
  }
}

}  // namespace

void EgnnConfig::validate() const {
  if (n_layers < 1) throw config_error("EgnnConfig: n_layers must be >= 1");
  if (n_hidden < 1) throw config_error("EgnnConfig: n_hidden must be >= 1");
  if (n_embedding < 1) throw config_error("EgnnConfig: n_embedding must be >= 1");
}

EgnnConfig EgnnConfig::preset(const std::string& name) {
  EgnnConfig cfg;
  if (name == "transfer-tbg") {
    cfg.n_layers = 9; cfg.n_hidden = 128; cfg.n_embedding = 5;
  } else if (name == "transfer-tbg-backbone") {
    cfg.n_layers = 9; cfg.n_hidden = 128; cfg.n_embedding = 13;
  } else if (name == "transfer-tbg-full") {
    cfg.n_layers = 9; cfg.n_hidden = 128; cfg.n_embedding = 76;
  } else if (name == "single-tbg-full") {
    cfg.n_layers = 5; cfg.n_hidden = 64; cfg.n_embedding = 15;
  } else if (name == "single-backbone") {
    cfg.n_layers = 5; cfg.n_hidden = 64; cfg.n_embedding = 8;
  } else {
    throw config_error("EgnnConfig::preset: unknown preset '" + name + "'");
  }
  return cfg;
}

numcore::ParamVector init_egnn_params(const EgnnConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const int hdim = cfg.feature_dim();
  const int hidden = cfg.n_hidden;
  const int mdim = cfg.n_hidden;

  ParamVector p;
  numcore::Rng rng(seed);
  auto add = [&](int layer, SubNet net, int in, int out, bool zero_head) {
    const std::string base = "l" + std::to_string(layer) + "." + net_tag(net) + ".";
    struct PieceSpec { const char* tag; int rows; int cols; bool zero; };
    const PieceSpec pieces[4] = {{"w1", in, hidden, false},
                                 {"b1", 1, hidden, false},
                                 {"w2", hidden, out, zero_head},
                                 {"b2", 1, out, zero_head}};
    for (const auto& ps : pieces) {
      const int idx = p.add_segment(base + ps.tag, ps.rows, ps.cols);
      if (ps.zero) continue;  // displacement head stays zero: fresh field == 0
      const int fan_in = std::strcmp(ps.tag, "w1") == 0 || std::strcmp(ps.tag, "b1") == 0
                             ? in
                             : hidden;
      const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      double* data = p.segment_data(idx);
      const size_t count = p.segment(idx).count();
      for (size_t k = 0; k < count; ++k) data[k] = rng.uniform(-bound, bound);
    }
  };

  for (int l = 0; l < cfg.n_layers; ++l) {
    add(l, kNetE, 2 * hdim + 1, mdim, false);
    add(l, kNetD, mdim, 1, true);
    add(l, kNetM, mdim, 1, false);
    add(l, kNetH, hdim + mdim, hdim, false);
  }
  return p;
}

std::vector<double> egnn_forward(const EgnnConfig& cfg, const ParamVector& params, double t,
                                 const std::vector<double>& x, const Matrix& emb, int dim) {
  check_shapes(cfg, params, x, emb, dim);
  std::vector<double> v(x.size());
  egnn_eval<double>(cfg, params, t, x.data(), emb.rows(), dim, emb, v.data());
  for (double c : v)
    if (!std::isfinite(c)) throw numeric_error("egnn_forward: non-finite velocity");
  return v;
}

double egnn_divergence(const EgnnConfig& cfg, const ParamVector& params, double t,
                       const std::vector<double>& x, const Matrix& emb, int dim,
                       std::vector<double>* v_out) {
  check_shapes(cfg, params, x, emb, dim);
  const int n = emb.rows();
  const size_t total = x.size();

  std::vector<Dual> xd(total);
  std::vector<Dual> vd(total);
  double div = 0.0;
  for (size_t c = 0; c < total; ++c) {
    for (size_t k = 0; k < total; ++k) xd[k] = Dual(x[k], k == c ? 1.0 : 0.0);
    egnn_eval<Dual>(cfg, params, t, xd.data(), n, dim, emb, vd.data());
    div += vd[c].d;
    if (c == 0 && v_out) {
      v_out->resize(total);
      for (size_t k = 0; k < total; ++k) (*v_out)[k] = vd[k].v;
    }
  }
  if (!std::isfinite(div)) throw numeric_error("egnn_divergence: non-finite trace");
  return div;
}

Tape::NodeId egnn_forward_tape(Tape& tape, const EgnnConfig& cfg,
                               const std::vector<Tape::NodeId>& param_leaves, double t,
                               Tape::NodeId x_node, const Matrix& emb) {
  cfg.validate();
  if (static_cast<int>(param_leaves.size()) != 16 * cfg.n_layers)
    throw contract_error("egnn_forward_tape: leaf count does not match config layer count");
  const Matrix& x0val = tape.value(x_node);
  const int n = x0val.rows();
  if (n < 2) throw contract_error("egnn_forward_tape: need at least 2 atoms");
  if (emb.rows() != n || emb.cols() != cfg.n_embedding)
    throw contract_error("egnn_forward_tape: embedding shape mismatch");

  auto leaf = [&](int layer, SubNet net, Piece piece) {
    return param_leaves[static_cast<size_t>(seg_index(layer, net, piece))];
  };

  // h0 = [t | emb]
  Matrix h0(n, cfg.feature_dim());
  for (int i = 0; i < n; ++i) {
    h0(i, 0) = t;
    for (int k = 0; k < cfg.n_embedding; ++k) h0(i, 1 + k) = emb(i, k);
  }
  Tape::NodeId h = tape.constant(std::move(h0));

  std::vector<int> rows_i, rows_j;
  rows_i.reserve(static_cast<size_t>(n) * (n - 1));
  rows_j.reserve(static_cast<size_t>(n) * (n - 1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      rows_i.push_back(i);
      rows_j.push_back(j);
    }

  auto mlp_rec = [&](int layer, SubNet net, Tape::NodeId src, bool end_silu) {
    Tape::NodeId z = tape.silu(tape.add_rowvec(tape.matmul(src, leaf(layer, net, kW1)),
                                               leaf(layer, net, kB1)));
    Tape::NodeId out = tape.add_rowvec(tape.matmul(z, leaf(layer, net, kW2)),
                                       leaf(layer, net, kB2));
    return end_silu ? tape.silu(out) : out;
  };

  Tape::NodeId x = x_node;
  for (int l = 0; l < cfg.n_layers; ++l) {
    Tape::NodeId hi = tape.gather_rows(h, rows_i);
    Tape::NodeId hj = tape.gather_rows(h, rows_j);
    Tape::NodeId xi = tape.gather_rows(x, rows_i);
    Tape::NodeId xj = tape.gather_rows(x, rows_j);
    Tape::NodeId dx = tape.sub(xi, xj);
    Tape::NodeId d2 = tape.row_sqnorm(dx);
    Tape::NodeId d = tape.sqrt(tape.add_scalar(d2, kDistEps));

    Tape::NodeId ein = tape.concat_cols(tape.concat_cols(hi, hj), d2);
    Tape::NodeId msg = mlp_rec(l, kNetE, ein, /*end_silu=*/true);

    Tape::NodeId dscal = mlp_rec(l, kNetD, msg, /*end_silu=*/false);
    Tape::NodeId coef = tape.mul(dscal, tape.recip(tape.add_scalar(d, 1.0)));
    Tape::NodeId xagg = tape.scatter_add_rows(tape.mul_col(dx, coef), rows_i, n);
    x = tape.add(x, xagg);

    Tape::NodeId att = mlp_rec(l, kNetM, msg, /*end_silu=*/false);
    if (cfg.attention_sigmoid) att = tape.sigmoid(att);
    Tape::NodeId magg = tape.scatter_add_rows(tape.mul_col(msg, att), rows_i, n);

    h = mlp_rec(l, kNetH, tape.concat_cols(h, magg), /*end_silu=*/false);
  }

  Tape::NodeId v_raw = tape.sub(x, x_node);
  return tape.sub_rowvec(v_raw, tape.col_mean(v_raw));
}

VectorField egnn_field(const EgnnConfig& cfg, const ParamVector& params, const Matrix& emb,
                       int dim) {
  cfg.validate();
  check_params(cfg, params);
  const int n_state = emb.rows() * dim;
  auto shared = std::make_shared<std::pair<EgnnConfig, ParamVector>>(cfg, params);
  auto emb_copy = std::make_shared<Matrix>(emb);

  VectorField field;
  field.n_state = n_state;
  field.eval = [shared, emb_copy, dim, n_state](double t, const double* x, double* v) {
    egnn_eval<double>(shared->first, shared->second, t, x, emb_copy->rows(), dim, *emb_copy, v);
    for (int k = 0; k < n_state; ++k)
      if (!std::isfinite(v[k])) throw numeric_error("egnn_field: non-finite velocity");
  };
  field.divergence = [shared, emb_copy, dim, n_state](double t, const double* x, double* v) {
    std::vector<double> xv(x, x + n_state);
    std::vector<double> vout;
    const double div = egnn_divergence(shared->first, shared->second, t, xv, *emb_copy, dim,
                                       v ? &vout : nullptr);
    if (v)
      for (int k = 0; k < n_state; ++k) v[k] = vout[static_cast<size_t>(k)];
    return div;
  };
  return field;
}

}  // namespace tbg::vecfield
