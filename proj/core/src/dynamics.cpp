#include "antic/dynamics.hpp"

#include <cmath>
#include <string>

#include "antic/error.hpp"
#include "antic/numeric.hpp"

namespace antic {

namespace {

void check_state(const SwarmState& s) {
  if (s.n < 1 || s.dim < 1)
    throw InputError("swarm state: need n >= 1 and d >= 1");
  if (s.x.size() != static_cast<std::size_t>(s.n) * s.dim ||
      s.v.size() != static_cast<std::size_t>(s.n) * s.dim)
    throw InputError("swarm state: x/v storage inconsistent with n*d");
}

// accum_i += w * z, accum_j -= w * z for the pair (i, j).
inline void add_pair(std::span<double> acc, int i, int j, int d,
                     std::span<const double> z, double w) {
  double* ai = acc.data() + static_cast<std::size_t>(i) * d;
  double* aj = acc.data() + static_cast<std::size_t>(j) * d;
  for (int a = 0; a < d; ++a) {
    const double f = w * z[a];
    ai[a] += f;
    aj[a] -= f;
  }
}

void pairwise_potential_sum(const Potential& pot, std::span<const double> pos, int n, int d,
                            std::span<double> accum) {
  std::vector<double> z(d);
  for (int i = 0; i < n; ++i) {
    const double* pi = pos.data() + static_cast<std::size_t>(i) * d;
    for (int j = i + 1; j < n; ++j) {
      const double* pj = pos.data() + static_cast<std::size_t>(j) * d;
      double r2 = 0.0;
      for (int a = 0; a < d; ++a) {
        z[a] = pi[a] - pj[a];
        r2 += z[a] * z[a];
      }
      const double c = eval_potential(pot, std::sqrt(r2)).du_over_r;
      add_pair(accum, i, j, d, z, -c);  // force carries a minus sign
    }
  }
}

void alignment_sum(const Kernel& kernel, const SwarmState& s, double tau,
                   std::span<double> accum) {
  const int n = s.n, d = s.dim;
  std::vector<double> w(d), y(d), scratch(d);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int a = 0; a < d; ++a) w[a] = s.v[static_cast<std::size_t>(j) * d + a] -
                                         s.v[static_cast<std::size_t>(i) * d + a];
      apply_kernel(kernel, s.agent_x(i), s.agent_v(i), s.agent_x(j), s.agent_v(j), tau, w, y,
                   scratch);
      add_pair(accum, i, j, d, y, tau);
    }
  }
}

void finalize(std::span<double> accum, int n, int d, std::span<double> out) {
  const double inv_n = 1.0 / n;
  for (std::size_t k = 0; k < accum.size(); ++k) out[k] = accum[k] * inv_n;
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < d; ++a)
      if (!std::isfinite(out[static_cast<std::size_t>(i) * d + a]))
        throw NumericalError("acceleration: non-finite force on agent " + std::to_string(i),
                             i);
}

}  // namespace

double model_tau(const Model& model) {
  return std::visit([](const auto& m) { return m.tau; }, model);
}

const Potential* model_potential(const Model& model) {
  if (const auto* m = std::get_if<AtModel>(&model)) return &m->potential;
  if (const auto* m = std::get_if<PhiUModel>(&model)) return &m->potential;
  return nullptr;
}

std::vector<double> anticipated_positions(const SwarmState& state, double tau) {
  check_state(state);
  if (!(tau >= 0.0)) throw InputError("anticipated_positions: tau must be >= 0");
  std::vector<double> xt(state.x.size());
  for (std::size_t k = 0; k < xt.size(); ++k) xt[k] = state.x[k] + tau * state.v[k];
  return xt;
}

void acceleration(const Model& model, const SwarmState& state, std::span<double> out) {
  check_state(state);
  const int n = state.n, d = state.dim;
  if (out.size() != static_cast<std::size_t>(n) * d)
    throw InputError("acceleration: output span has wrong size");

  std::vector<double> accum(out.size(), 0.0);
  if (const auto* m = std::get_if<AtModel>(&model)) {
    const std::vector<double> xt = anticipated_positions(state, m->tau);
    pairwise_potential_sum(m->potential, xt, n, d, accum);
  } else if (const auto* m = std::get_if<PhiUModel>(&model)) {
    alignment_sum(m->kernel, state, m->tau, accum);
    pairwise_potential_sum(m->potential, state.x, n, d, accum);
  } else {
    const auto& cs = std::get<CsModel>(model);
    alignment_sum(cs.kernel, state, cs.tau, accum);
  }
  finalize(accum, n, d, out);
}

std::vector<double> acceleration(const Model& model, const SwarmState& state) {
  std::vector<double> out(state.x.size());
  acceleration(model, state, out);
  return out;
}

PolarState polar_rhs(const PolarState& p, const Potential& potential, double tau) {
  if (!(p.r > 0.0)) throw DomainError("polar_rhs: polar chart requires r > 0");
  if (!std::isfinite(p.r) || !std::isfinite(p.vr) || !std::isfinite(p.vtheta))
    throw InputError("polar_rhs: non-finite state");
  const double du = eval_potential(potential, p.r).du;
  PolarState dp;
  dp.r = p.vr - tau * du;
  dp.theta = p.vtheta / p.r;
  dp.vr = -du + p.vtheta * p.vtheta / p.r;
  dp.vtheta = -p.vr * p.vtheta / p.r;
  return dp;
}

PolarState to_polar_two_agent(const SwarmState& state, double tau) {
  check_state(state);
  if (state.n != 2 || state.dim != 2)
    throw ContractError("to_polar_two_agent: requires N = 2, d = 2");
  const double scale = norm(state.x) + norm(state.v) + 1.0;
  for (int a = 0; a < 2; ++a) {
    if (std::abs(state.x[a] + state.x[2 + a]) > 1e-9 * scale ||
        std::abs(state.v[a] + state.v[2 + a]) > 1e-9 * scale)
      throw ContractError("to_polar_two_agent: state must be centered (x1 = -x2, v1 = -v2)");
  }
  const double Xt0 = (state.x[0] + tau * state.v[0]) - (state.x[2] + tau * state.v[2]);
  const double Xt1 = (state.x[1] + tau * state.v[1]) - (state.x[3] + tau * state.v[3]);
  const double r = std::hypot(Xt0, Xt1);
  if (!(r > 0.0))
    throw DomainError("to_polar_two_agent: coincident anticipated positions");
  const double V0 = state.v[0] - state.v[2];
  const double V1 = state.v[1] - state.v[3];
  PolarState p;
  p.r = r;
  p.theta = std::atan2(Xt1, Xt0);
  p.vr = (V0 * Xt0 + V1 * Xt1) / r;
  p.vtheta = (-V0 * Xt1 + V1 * Xt0) / r;
  return p;
}

SwarmState two_agent_from_polar(const PolarState& p, double tau) {
  if (!(p.r > 0.0)) throw DomainError("two_agent_from_polar: requires r > 0");
  const double c = std::cos(p.theta), s = std::sin(p.theta);
  const double Xt0 = p.r * c, Xt1 = p.r * s;
  const double V0 = p.vr * c - p.vtheta * s;
  const double V1 = p.vr * s + p.vtheta * c;
  const double X0 = Xt0 - tau * V0, X1 = Xt1 - tau * V1;
  SwarmState st(2, 2);
  st.x = {0.5 * X0, 0.5 * X1, -0.5 * X0, -0.5 * X1};
  st.v = {0.5 * V0, 0.5 * V1, -0.5 * V0, -0.5 * V1};
  return st;
}

}  // namespace antic
