//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/targets/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tbg/numcore/rng.hpp"

namespace tbg::targets {

SampleBlock reference_sampler(const BoltzmannTarget& target, const std::vector<double>& x0,
                              long count, const McmcOptions& opt, McmcDiagnostics* diag) {
  const int d = target.dim();
  if (static_cast<int>(x0.size()) != d)
    throw contract_error("reference_sampler: start point dimension mismatch");
  if (count < 1) throw contract_error("reference_sampler: count must be >= 1");
  if (opt.n_chains < 1 || opt.stride < 1 || opt.init_step <= 0.0)
    throw contract_error("reference_sampler: bad options");

  SampleBlock out;
  out.dim = d;
  out.reserve_rows(count);
  const long per_chain = (count + opt.n_chains - 1) / opt.n_chains;

  long accepted_total = 0, proposals_total = 0;
  double last_step = opt.init_step;

  for (int c = 0; c < opt.n_chains && out.count() < count; ++c) {
    numcore::Rng rng = numcore::Rng::stream(opt.seed, static_cast<std::uint64_t>(c));
    std::vector<double> x = x0;
    for (double& v : x) v += opt.init_jitter * rng.normal();
    target.wrap(x.data());
    double e = target.energy(x.data());
    double step = opt.init_step;

    std::vector<double> prop(static_cast<size_t>(d));
    auto advance = [&](bool adapt, long steps, long* acc_out) {
      long acc_window = 0, acc_phase = 0;
      for (long s = 0; s < steps; ++s) {
        for (int i = 0; i < d; ++i) prop[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] + step * rng.normal();
        target.wrap(prop.data());
        const double ep = target.energy(prop.data());
        // Standard Metropolis acceptance on the energy difference.
        if (ep <= e || rng.uniform() < std::exp(e - ep)) {
          x = prop;
          e = ep;
          ++acc_window;
          ++acc_phase;
        }
        if (adapt && (s + 1) % 100 == 0) {
          const double rate = acc_window / 100.0;
          step *= std::clamp(rate / opt.target_accept, 0.5, 2.0);
          step = std::clamp(step, 1e-8, 1e3);
          acc_window = 0;
        }
      }
      if (acc_out) *acc_out = acc_phase;
    };

    advance(true, opt.burn_in, nullptr);

    const long quota = std::min<long>(per_chain, count - out.count());
    long acc = 0;
    long produced = 0;
    long steps_since = 0;
    while (produced < quota) {
      long acc_inc = 0;
      advance(false, 1, &acc_inc);
      acc += acc_inc;
      ++proposals_total;
      if (++steps_since == opt.stride) {
        out.push(x.data());
        ++produced;
        steps_since = 0;
      }
    }
    accepted_total += acc;
    last_step = step;
  }

  const double rate = proposals_total > 0 ? static_cast<double>(accepted_total) / proposals_total : 0.0;
  if (diag) {
    diag->acceptance = rate;
    diag->step = last_step;
    diag->n_proposals = proposals_total;
  }
  if (rate < 0.2 || rate > 0.6)
    throw error("reference_sampler: adaptation failed, acceptance " + std::to_string(rate) +
                " outside [0.2, 0.6] at step " + std::to_string(last_step));
  return out;
}

}  // namespace tbg::targets
