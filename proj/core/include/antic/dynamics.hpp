#pragma once

#include <span>
#include <variant>
#include <vector>

#include "antic/kernels.hpp"
#include "antic/potentials.hpp"

namespace antic {

/// Time plus N positions and velocities in d dimensions, row-major by agent.
struct SwarmState {
  double t = 0.0;
  int n = 0;
  int dim = 0;
  std::vector<double> x;
  std::vector<double> v;

  SwarmState() = default;
  SwarmState(int n, int dim)
      : n(n), dim(dim), x(static_cast<std::size_t>(n) * dim, 0.0),
        v(static_cast<std::size_t>(n) * dim, 0.0) {}

  std::span<const double> agent_x(int i) const {
    return {x.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
  }
  std::span<const double> agent_v(int i) const {
    return {v.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
  }
  std::span<double> agent_x(int i) {
    return {x.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
  }
  std::span<double> agent_v(int i) {
    return {v.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
  }
};

/// Pairwise forces evaluated at anticipated positions x + tau v.
struct AtModel {
  Potential potential;
  double tau = 0.0;
};

/// Matrix-kernel alignment plus pairwise forces at current positions.
struct PhiUModel {
  Potential potential;
  Kernel kernel;
  double tau = 0.0;
};

/// Alignment only; the no-potential special case.
struct CsModel {
  Kernel kernel;
  double tau = 0.0;
};

using Model = std::variant<AtModel, PhiUModel, CsModel>;

double model_tau(const Model& model);
const Potential* model_potential(const Model& model);  // nullptr for CS

/// x_i + tau v_i per agent.
std::vector<double> anticipated_positions(const SwarmState& state, double tau);

/// Accelerations of all agents under the given model, written to out
/// (n*dim doubles). The pairwise loops update both members of each pair so
/// that the force sum vanishes identically.
void acceleration(const Model& model, const SwarmState& state, std::span<double> out);
std::vector<double> acceleration(const Model& model, const SwarmState& state);

/// Two-agent state in polar coordinates: r is the anticipated separation
/// |x_1^tau - x_2^tau| and (vr, vtheta) are the polar components of the
/// relative velocity v_1 - v_2.
struct PolarState {
  double r = 0.0;
  double theta = 0.0;
  double vr = 0.0;
  double vtheta = 0.0;
};

/// Time derivative of the reduced two-agent system:
/// (vr - tau U'(r), vtheta/r, -U'(r) + vtheta^2/r, -vr vtheta/r).
PolarState polar_rhs(const PolarState& p, const Potential& potential, double tau);

/// Reduce a centered two-agent planar state (x1 = -x2, v1 = -v2) to polar
/// coordinates of the anticipated separation vector.
PolarState to_polar_two_agent(const SwarmState& state, double tau);

/// Inverse of to_polar_two_agent; builds the centered two-agent state.
SwarmState two_agent_from_polar(const PolarState& p, double tau);

}  // namespace antic
