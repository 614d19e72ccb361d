#include "antic/hydro1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "antic/error.hpp"

namespace antic {

double Hydro1DState::min_dslope() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : particles) best = std::min(best, p.dslope);
  return best;
}

double Hydro1DState::max_abs_dslope() const {
  double best = 0.0;
  for (const auto& p : particles) best = std::max(best, std::abs(p.dslope));
  return best;
}

HydroDerivative hydro_rhs(const Hydro1DState& state, const Potential& potential, double tau) {
  const int k_count = static_cast<int>(state.particles.size());
  if (k_count == 0) throw InputError("hydro_rhs: no particles");

  std::vector<double> xt(k_count);
  for (int k = 0; k < k_count; ++k)
    xt[k] = state.particles[k].x + tau * state.particles[k].u;

  HydroDerivative d;
  d.dx.resize(k_count);
  d.du.assign(k_count, 0.0);
  d.ddslope.resize(k_count);

  const double ddu0 = eval_potential(potential, 0.0).ddu;
  std::vector<double> conv(k_count, 0.0);
  for (int k = 0; k < k_count; ++k) conv[k] = state.particles[k].m * ddu0;  // self term

  for (int k = 0; k < k_count; ++k) {
    for (int j = k + 1; j < k_count; ++j) {
      const double z = xt[k] - xt[j];
      const PotentialEval e = eval_potential(potential, std::abs(z));
      const double f = e.du_over_r * z;  // equals U'(|z|) sign(z)
      d.du[k] -= state.particles[j].m * f;
      d.du[j] += state.particles[k].m * f;
      conv[k] += state.particles[j].m * e.ddu;
      conv[j] += state.particles[k].m * e.ddu;
    }
  }

  for (int k = 0; k < k_count; ++k) {
    const auto& p = state.particles[k];
    d.dx[k] = p.u;
    d.ddslope[k] = -p.dslope * p.dslope - conv[k] * (1.0 + tau * p.dslope);
    if (!std::isfinite(d.du[k]) || !std::isfinite(d.ddslope[k]))
      throw NumericalError("hydro_rhs: non-finite derivative for particle " +
                           std::to_string(k), k);
  }
  return d;
}

std::optional<double> critical_slope(double tau, double m0, double a) {
  if (!(tau > 0.0) || !(m0 > 0.0) || !(a > 0.0))
    throw InputError("critical_slope: tau, m0, a must all be positive");
  const double c = m0 * a;
  if (tau * tau * c < 4.0) return std::nullopt;
  return -0.5 * (tau * c + std::sqrt(c * (tau * tau * c - 4.0)));
}

namespace {

void pack(const Hydro1DState& s, std::vector<double>& y) {
  const std::size_t k = s.particles.size();
  y.resize(3 * k);
  for (std::size_t i = 0; i < k; ++i) {
    y[i] = s.particles[i].x;
    y[k + i] = s.particles[i].u;
    y[2 * k + i] = s.particles[i].dslope;
  }
}

void unpack(std::span<const double> y, Hydro1DState& s) {
  const std::size_t k = s.particles.size();
  for (std::size_t i = 0; i < k; ++i) {
    s.particles[i].x = y[i];
    s.particles[i].u = y[k + i];
    s.particles[i].dslope = y[2 * k + i];
  }
}

int offending_particle(const Hydro1DState& s, const HydroRunSpec& spec) {
  for (std::size_t i = 0; i < s.particles.size(); ++i) {
    const auto& p = s.particles[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.u) || !std::isfinite(p.dslope) ||
        std::abs(p.x) > spec.blowup_guard || std::abs(p.u) > spec.blowup_guard ||
        p.dslope < -spec.dslope_cutoff)
      return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

ThresholdResult run_threshold_experiment(const Potential& potential, double tau,
                                         Hydro1DState state, const HydroRunSpec& spec,
                                         const HydroObserver& observer) {
  if (state.particles.empty()) throw InputError("run_threshold_experiment: no particles");
  if (!(spec.h > 0.0) || !(spec.t_end >= spec.h) || spec.sample_stride < 1)
    throw ConfigError("run_threshold_experiment: invalid integrator parameters");

  const std::size_t kc = state.particles.size();
  Hydro1DState scratch = state;
  const OdeRhs rhs = [&](double, std::span<const double> y, std::span<double> dy) {
    unpack(y, scratch);
    const HydroDerivative der = hydro_rhs(scratch, potential, tau);
    for (std::size_t i = 0; i < kc; ++i) {
      dy[i] = der.dx[i];
      dy[kc + i] = der.du[i];
      dy[2 * kc + i] = der.ddslope[i];
    }
  };

  std::vector<double> y, ynext(3 * kc);
  pack(state, y);
  OdeStepper stepper(spec.method, y.size());

  ThresholdResult result;
  const double t0 = state.t;
  const long n_steps = std::llround(spec.t_end / spec.h);

  auto sample = [&](const Hydro1DState& s) {
    result.history.push_back(
        {s.t, s.min_dslope(), s.max_abs_dslope(), s.total_mass(), s.momentum()});
  };
  sample(state);
  if (observer) observer(0, state);

  for (long k = 1; k <= n_steps; ++k) {
    const double t = t0 + (k - 1) * spec.h;
    bool failed = false;
    int bad = -1;
    try {
      stepper.step(t, spec.h, y, rhs, ynext);
    } catch (const NumericalError& e) {
      failed = true;
      bad = e.index;
    }
    if (!failed) {
      std::swap(y, ynext);
      unpack(y, state);
      state.t = t0 + k * spec.h;
      bad = offending_particle(state, spec);
      failed = bad >= 0;
    }
    if (failed) {
      result.blew_up = true;
      result.t_blowup = t0 + k * spec.h;
      result.blowup_particle = bad;
      break;
    }
    if (k % spec.sample_stride == 0 || k == n_steps) {
      sample(state);
      if (observer) observer(k, state);
    }
  }

  result.final_state = std::move(state);
  return result;
}

Hydro1DState hydro_state_from_profile(const std::vector<double>& x,
                                      const std::vector<double>& u,
                                      const std::vector<double>& m, int particles) {
  if (x.size() < 2 || x.size() != u.size() || x.size() != m.size())
    throw ConfigError("hydro profile: need matching x/u/m tables with >= 2 rows");
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (!(x[i] < x[i + 1])) throw ConfigError("hydro profile: x must be strictly increasing");
  for (double v : m)
    if (!(v >= 0.0)) throw ConfigError("hydro profile: density must be nonnegative");
  if (particles < 1) throw ConfigError("hydro profile: need at least one particle");

  auto segment = [&](double q) {
    const auto it = std::upper_bound(x.begin(), x.end(), q);
    return std::clamp(static_cast<int>(it - x.begin()) - 1, 0,
                      static_cast<int>(x.size()) - 2);
  };
  auto interp = [&](const std::vector<double>& f, double q) {
    const int s = segment(q);
    const double w = (q - x[s]) / (x[s + 1] - x[s]);
    return f[s] + w * (f[s + 1] - f[s]);
  };

  Hydro1DState state;
  state.particles.resize(particles);
  const double span = x.back() - x.front();
  const double cell = span / particles;
  for (int k = 0; k < particles; ++k) {
    const double q = x.front() + (k + 0.5) * cell;
    auto& p = state.particles[k];
    p.x = q;
    p.u = interp(u, q);
    p.m = interp(m, q) * cell;
    const int s = segment(q);
    p.dslope = (u[s + 1] - u[s]) / (x[s + 1] - x[s]);
  }
  return state;
}

}  // namespace antic
