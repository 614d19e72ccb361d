#include "antic/integrator.hpp"

#include <cmath>

#include "antic/error.hpp"
#include "antic/numeric.hpp"

namespace antic {

void validate_integrator_spec(const IntegratorSpec& spec) {
  if (!(spec.h > 0.0)) throw ConfigError("integrator: h must be > 0");
  if (!(spec.t_end >= spec.h)) throw ConfigError("integrator: t_end must be >= h");
  if (spec.sample_stride < 1) throw ConfigError("integrator: sample_stride must be >= 1");
  if (!(spec.blowup_guard > 0.0)) throw ConfigError("integrator: blowup_guard must be > 0");
}

OdeStepper::OdeStepper(Method method, std::size_t size)
    : method_(method), k1_(size), k2_(size), k3_(size), k4_(size), tmp_(size) {}

void OdeStepper::step(double t, double h, std::span<const double> y, const OdeRhs& rhs,
                      std::span<double> out) {
  const std::size_t m = y.size();
  if (method_ == Method::euler) {
    rhs(t, y, k1_);
    for (std::size_t i = 0; i < m; ++i) out[i] = y[i] + h * k1_[i];
    return;
  }
  rhs(t, y, k1_);
  for (std::size_t i = 0; i < m; ++i) tmp_[i] = y[i] + 0.5 * h * k1_[i];
  rhs(t + 0.5 * h, tmp_, k2_);
  for (std::size_t i = 0; i < m; ++i) tmp_[i] = y[i] + 0.5 * h * k2_[i];
  rhs(t + 0.5 * h, tmp_, k3_);
  for (std::size_t i = 0; i < m; ++i) tmp_[i] = y[i] + h * k3_[i];
  rhs(t + h, tmp_, k4_);
  for (std::size_t i = 0; i < m; ++i)
    out[i] = y[i] + h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
}

namespace {

// Packs [x; v] into one vector and adapts acceleration() as an OdeRhs.
struct SwarmOde {
  const Model& model;
  SwarmState scratch;

  explicit SwarmOde(const Model& m, const SwarmState& proto) : model(m), scratch(proto) {}

  void operator()(double t, std::span<const double> y, std::span<double> dy) {
    const std::size_t nd = scratch.x.size();
    scratch.t = t;
    std::copy(y.begin(), y.begin() + nd, scratch.x.begin());
    std::copy(y.begin() + nd, y.end(), scratch.v.begin());
    std::copy(y.begin() + nd, y.end(), dy.begin());  // xdot = v
    acceleration(model, scratch, dy.subspan(nd));
  }
};

void pack(const SwarmState& s, std::vector<double>& y) {
  y.resize(2 * s.x.size());
  std::copy(s.x.begin(), s.x.end(), y.begin());
  std::copy(s.v.begin(), s.v.end(), y.begin() + s.x.size());
}

void unpack(std::span<const double> y, SwarmState& s) {
  const std::size_t nd = s.x.size();
  std::copy(y.begin(), y.begin() + nd, s.x.begin());
  std::copy(y.begin() + nd, y.end(), s.v.begin());
}

// Index of the first agent with a non-finite or guard-exceeding component.
int offending_agent(const SwarmState& s, double guard) {
  for (int i = 0; i < s.n; ++i) {
    for (int a = 0; a < s.dim; ++a) {
      const std::size_t k = static_cast<std::size_t>(i) * s.dim + a;
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.v[k]) || std::abs(s.x[k]) > guard ||
          std::abs(s.v[k]) > guard)
        return i;
    }
  }
  return -1;
}

}  // namespace

SwarmState step(const Model& model, const SwarmState& state, double h, Method method) {
  if (!(h > 0.0)) throw InputError("step: h must be > 0");
  std::vector<double> y, out(2 * state.x.size());
  pack(state, y);
  SwarmOde ode(model, state);
  const OdeRhs rhs = std::ref(ode);
  OdeStepper stepper(method, y.size());
  stepper.step(state.t, h, y, rhs, out);
  SwarmState next = state;
  unpack(out, next);
  next.t = state.t + h;
  return next;
}

IntegrationResult integrate(const Model& model, SwarmState state, const IntegratorSpec& spec,
                            const SwarmObserver& observer) {
  validate_integrator_spec(spec);
  const double t0 = state.t;
  const long n_steps = std::llround(spec.t_end / spec.h);

  std::vector<double> y, ynext(2 * state.x.size());
  pack(state, y);
  SwarmOde ode(model, state);
  const OdeRhs rhs = std::ref(ode);
  OdeStepper stepper(spec.method, y.size());

  IntegrationResult result;
  if (observer) observer(0, state);

  for (long k = 1; k <= n_steps; ++k) {
    const double t = t0 + (k - 1) * spec.h;
    try {
      stepper.step(t, spec.h, y, rhs, ynext);
    } catch (const NumericalError& e) {
      result.blowup = BlowupRecord{t0 + k * spec.h, e.index, k};
      unpack(y, state);  // keep the last good state
      state.t = t;
      break;
    }
    std::swap(y, ynext);
    unpack(y, state);
    state.t = t0 + k * spec.h;
    const int bad = offending_agent(state, spec.blowup_guard);
    if (bad >= 0) {
      result.blowup = BlowupRecord{state.t, bad, k};
      std::swap(y, ynext);
      unpack(y, state);
      state.t = t;
      break;
    }
    result.steps = k;
    if (observer && (k % spec.sample_stride == 0 || k == n_steps)) observer(k, state);
  }

  result.final_state = std::move(state);
  return result;
}

}  // namespace antic
