#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "antic/dynamics.hpp"

namespace antic {

enum class Method { rk4, euler };

/// Fixed-step explicit integration parameters.
struct IntegratorSpec {
  Method method = Method::rk4;
  double h = 1e-2;
  double t_end = 1.0;
  int sample_stride = 1;
  double blowup_guard = 1e8;  // abort when any |x| or |v| component exceeds this
};

void validate_integrator_spec(const IntegratorSpec& spec);

/// dy = f(t, y) for the flattened state vector.
using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dy)>;

/// One explicit step of the chosen method; owns its stage buffers.
class OdeStepper {
 public:
  OdeStepper(Method method, std::size_t size);
  void step(double t, double h, std::span<const double> y, const OdeRhs& rhs,
            std::span<double> out);

 private:
  Method method_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

struct BlowupRecord {
  double t = 0.0;
  int agent = -1;
  long step = 0;
};

/// One step of the coupled system xdot = v, vdot = acceleration(model, .).
SwarmState step(const Model& model, const SwarmState& state, double h,
                Method method = Method::rk4);

struct IntegrationResult {
  SwarmState final_state;
  std::optional<BlowupRecord> blowup;
  long steps = 0;
};

using SwarmObserver = std::function<void(long step, const SwarmState&)>;

/// Run to t_end or blow-up. The observer sees the initial state (step 0),
/// every sample_stride-th step, and the final step; on blow-up the offending
/// step is not emitted and a record is returned instead.
IntegrationResult integrate(const Model& model, SwarmState state, const IntegratorSpec& spec,
                            const SwarmObserver& observer);

}  // namespace antic
