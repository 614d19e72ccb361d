#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "antic/integrator.hpp"
#include "antic/potentials.hpp"

namespace antic {

struct HydroParticle {
  double x = 0.0;       ///< position
  double u = 0.0;       ///< velocity
  double m = 0.0;       ///< mass (> 0, constant in time)
  double dslope = 0.0;  ///< du/dx carried along the characteristic
};

/// Mass-carrying 1D particles under the mono-kinetic closure; the
/// characteristic system coincides with the discrete dynamics on (x, u).
struct Hydro1DState {
  double t = 0.0;
  std::vector<HydroParticle> particles;

  double total_mass() const {
    double s = 0.0;
    for (const auto& p : particles) s += p.m;
    return s;
  }
  double momentum() const {
    double s = 0.0;
    for (const auto& p : particles) s += p.m * p.u;
    return s;
  }
  double min_dslope() const;
  double max_abs_dslope() const;
};

struct HydroDerivative {
  std::vector<double> dx, du, ddslope;
};

/// Per-particle time derivatives:
///   xdot_k = u_k
///   udot_k = -sum_j m_j U'(r)/r (x_k^tau - x_j^tau),  j = k term zero
///   ddot_k = -d_k^2 - c_k (1 + tau d_k),  c_k = sum_j m_j U''(|x_k^tau - x_j^tau|)
/// The convexity sum c_k includes the self term m_k U''(0).
HydroDerivative hydro_rhs(const Hydro1DState& state, const Potential& potential, double tau);

/// Sub-critical slope threshold -1/2 (tau m0 a + sqrt(m0 a (tau^2 m0 a - 4))),
/// defined when tau >= 2/sqrt(m0 a); empty otherwise.
std::optional<double> critical_slope(double tau, double m0, double a);

struct HydroRunSpec {
  double h = 1e-3;
  double t_end = 1.0;
  int sample_stride = 1;
  Method method = Method::rk4;
  double blowup_guard = 1e8;    ///< on |x| and |u|
  double dslope_cutoff = 1e6;   ///< blow-up declared when any d_k < -cutoff
};

struct HydroSample {
  double t = 0.0;
  double min_dslope = 0.0;
  double max_abs_dslope = 0.0;
  double mass = 0.0;
  double momentum = 0.0;
};

struct ThresholdResult {
  bool blew_up = false;
  std::optional<double> t_blowup;
  std::optional<int> blowup_particle;
  std::vector<HydroSample> history;
  Hydro1DState final_state;
};

using HydroObserver = std::function<void(long step, const Hydro1DState&)>;

/// Integrate the characteristic system, watching for gradient blow-up.
ThresholdResult run_threshold_experiment(const Potential& potential, double tau,
                                         Hydro1DState state, const HydroRunSpec& spec,
                                         const HydroObserver& observer = {});

/// Build K particles from piecewise-linear profiles u(x) and density m(x):
/// particles sit at the K cell midpoints of [x.front(), x.back()], each
/// carrying the midpoint-rule mass of its cell; dslope is the local profile
/// slope.
Hydro1DState hydro_state_from_profile(const std::vector<double>& x,
                                      const std::vector<double>& u,
                                      const std::vector<double>& m, int particles);

}  // namespace antic
