#pragma once

#include <optional>
#include <span>
#include <vector>

#include "antic/dynamics.hpp"

namespace antic {

/// One sampled instant of every monitored quantity. Fluctuation quantities
/// (dE, d_cal_E, X, X_tau, Vmax, E_hat) are evaluated in the instantaneous
/// zero-momentum frame.
struct DiagnosticsRow {
  double t = 0.0;
  double E = 0.0;          ///< instantaneous energy
  double cal_E = 0.0;      ///< anticipated energy
  double dE = 0.0;         ///< energy fluctuations
  double d_cal_E = 0.0;    ///< anticipated-energy fluctuations
  double enstrophy = 0.0;  ///< (tau/N) sum |vdot_i|^2
  double X = 0.0;          ///< max_i |x_i - xbar|
  double X_tau = 0.0;      ///< max_i |x_i^tau - xbar^tau|
  double Vmax = 0.0;       ///< max_i |v_i - vbar|
  std::vector<double> xbar, vbar;
  std::optional<double> E_hat;  ///< modified energy
};

struct EnergyReport {
  double E = 0.0;
  double cal_E = 0.0;
  double dE = 0.0;
  double d_cal_E = 0.0;
  double enstrophy = 0.0;
};

/// All five energy scalars. Pair sums run over ordered pairs including the
/// i = j diagonal, divided by 2N^2; the enstrophy uses the model's
/// acceleration.
EnergyReport energies(const SwarmState& state, const Model& model);

/// Both modified-energy forms with eps(t) = eps0 <t>^(-alpha):
///   standard    = E        + eps/N sum x_i     . v_i
///   anticipated = cal_E    - eps/N sum x_i^tau . v_i
/// The caller selects the form matching its model. potential may be null
/// (no potential terms, as in CS).
struct ModifiedEnergies {
  double standard = 0.0;
  double anticipated = 0.0;
  double eps = 0.0;
};
ModifiedEnergies modified_energy(const SwarmState& state, const Potential* potential,
                                 double tau, double eps0, double alpha);

/// Theorem-indicated default exponent for eps(t): 2 beta/(1-beta) for the
/// anticipated form, 2 max(beta, gamma)/(4-3 beta) for the standard one.
double default_modified_alpha(const Model& model);

struct ModifiedEnergyParams {
  double eps0 = 1e-2;
  std::optional<double> alpha;  // default: theorem-indicated exponent
};

/// Assemble a full diagnostics row (one acceleration evaluation).
DiagnosticsRow make_row(const SwarmState& state, const Model& model,
                        const std::optional<ModifiedEnergyParams>& mod = ModifiedEnergyParams{});

struct ExponentFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  int n_used = 0;
};

/// Least-squares slope of log(-log(f(t)/f(t0))) against log t over the
/// samples with t in [t_lo, t_hi]; t0 is the first sample in the window.
/// For f ~ exp(-c t^(1-lambda)) the slope estimates 1 - lambda.
ExponentFit fit_subexp_exponent(std::span<const double> t, std::span<const double> f,
                                double t_lo, double t_hi);

struct MeansCheckResult {
  double lhs = 0.0;        ///< (1/N) sum_i |z_i - zbar|^2
  double rhs = 0.0;        ///< (1/N) sum_i |(1/N) sum_j c_ij (z_i - z_j)|^2
  double c_explicit = 0.0; ///< 4/lam^2 (1 + 4 (Lam/lam - 1)^2)
  double ratio = 0.0;      ///< lhs / rhs
  bool pass = false;       ///< lhs <= c_explicit * rhs (relative slack 1e-12)
};

/// Compare deviation from the global mean against the weighted local-mean
/// deviation. z holds n vectors of dimension dim; c holds n*n weights in
/// [lam, Lam] (not necessarily symmetric).
MeansCheckResult check_means_inequality(std::span<const double> z, int n, int dim,
                                        std::span<const double> c, double lam, double Lam);

struct EnvelopeChannel {
  double exponent = 0.0;  ///< growth exponent p of the envelope <t>^p
  double c_head = 0.0;    ///< smallest constant fitted on the first half
  double c_all = 0.0;     ///< smallest constant valid over the whole run
  int violations = 0;     ///< tail samples exceeding c_head * (1 + slack)
  double first_violation_t = -1.0;
};

struct EnvelopeReport {
  EnvelopeChannel X;      // exponent 2/(4-3 beta)
  EnvelopeChannel X_tau;  // exponent 1/(2-2 beta)
  EnvelopeChannel Vmax;   // exponent (2-beta)/(4-3 beta)
};

/// Fit the smallest envelope constants on the first half of the run and
/// count tail samples that escape them. In-class runs must report zero
/// violations.
EnvelopeReport spread_envelopes(std::span<const DiagnosticsRow> rows, double beta,
                                double slack = 1e-6);

}  // namespace antic
