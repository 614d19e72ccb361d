#include "antic/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "antic/error.hpp"
#include "antic/numeric.hpp"

namespace antic {

namespace {

std::vector<double> mean_vector(std::span<const double> data, int n, int d) {
  std::vector<double> m(d, 0.0);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < d; ++a) m[a] += data[static_cast<std::size_t>(i) * d + a];
  for (int a = 0; a < d; ++a) m[a] /= n;
  return m;
}

double kinetic_mean(std::span<const double> v, int n, int d,
                    std::span<const double> shift) {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < d; ++a) {
      const double w = v[static_cast<std::size_t>(i) * d + a] - (shift.empty() ? 0.0 : shift[a]);
      s += w * w;
    }
  return s / (2.0 * n);
}

// (1/2N^2) sum over ordered pairs (diagonal included) of U(|p_i - p_j|).
double potential_mean(const Potential& pot, std::span<const double> pos, int n, int d) {
  double off = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double r2 = 0.0;
      for (int a = 0; a < d; ++a) {
        const double z = pos[static_cast<std::size_t>(i) * d + a] -
                         pos[static_cast<std::size_t>(j) * d + a];
        r2 += z * z;
      }
      off += eval_potential(pot, std::sqrt(r2)).u;
    }
  const double diag = n * eval_potential(pot, 0.0).u;
  return (2.0 * off + diag) / (2.0 * static_cast<double>(n) * n);
}

double max_spread(std::span<const double> data, int n, int d, std::span<const double> mean) {
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) {
      const double z = data[static_cast<std::size_t>(i) * d + a] - mean[a];
      r2 += z * z;
    }
    best = std::max(best, r2);
  }
  return std::sqrt(best);
}

}  // namespace

EnergyReport energies(const SwarmState& state, const Model& model) {
  const int n = state.n, d = state.dim;
  const double tau = model_tau(model);
  const Potential* pot = model_potential(model);

  const std::vector<double> vbar = mean_vector(state.v, n, d);
  const std::vector<double> xt = anticipated_positions(state, tau);

  EnergyReport rep;
  const double kin = kinetic_mean(state.v, n, d, {});
  const double kin_fluct = kinetic_mean(state.v, n, d, vbar);
  const double pot_cur = pot ? potential_mean(*pot, state.x, n, d) : 0.0;
  const double pot_ant = pot ? (tau == 0.0 ? pot_cur : potential_mean(*pot, xt, n, d)) : 0.0;

  rep.E = kin + pot_cur;
  rep.cal_E = kin + pot_ant;
  rep.dE = kin_fluct + pot_cur;
  rep.d_cal_E = kin_fluct + pot_ant;

  const std::vector<double> acc = acceleration(model, state);
  double ens = 0.0;
  for (double a : acc) ens += a * a;
  rep.enstrophy = tau * ens / n;
  return rep;
}

ModifiedEnergies modified_energy(const SwarmState& state, const Potential* potential,
                                 double tau, double eps0, double alpha) {
  if (!(eps0 >= 0.0)) throw InputError("modified_energy: eps0 must be >= 0");
  const int n = state.n, d = state.dim;
  const std::vector<double> xt = anticipated_positions(state, tau);

  ModifiedEnergies out;
  out.eps = eps0 * bracket_pow(state.t, -alpha);

  const double kin = kinetic_mean(state.v, n, d, {});
  const double pot_cur = potential ? potential_mean(*potential, state.x, n, d) : 0.0;
  const double pot_ant =
      potential ? (tau == 0.0 ? pot_cur : potential_mean(*potential, xt, n, d)) : 0.0;

  double cross_cur = 0.0, cross_ant = 0.0;
  for (std::size_t k = 0; k < state.x.size(); ++k) {
    cross_cur += state.x[k] * state.v[k];
    cross_ant += xt[k] * state.v[k];
  }
  out.standard = kin + pot_cur + out.eps * cross_cur / n;
  out.anticipated = kin + pot_ant - out.eps * cross_ant / n;
  return out;
}

double default_modified_alpha(const Model& model) {
  if (const auto* m = std::get_if<AtModel>(&model)) {
    const double b = potential_beta(m->potential);
    return 2.0 * b / (1.0 - b);
  }
  if (const auto* m = std::get_if<PhiUModel>(&model)) {
    const double b = potential_beta(m->potential);
    const double g = kernel_gamma(m->kernel);
    return 2.0 * std::max(b, g) / (4.0 - 3.0 * b);
  }
  const auto& m = std::get<CsModel>(model);
  return 2.0 * kernel_gamma(m.kernel) / 4.0;
}

DiagnosticsRow make_row(const SwarmState& state, const Model& model,
                        const std::optional<ModifiedEnergyParams>& mod) {
  const int n = state.n, d = state.dim;
  const double tau = model_tau(model);

  DiagnosticsRow row;
  row.t = state.t;
  const EnergyReport e = energies(state, model);
  row.E = e.E;
  row.cal_E = e.cal_E;
  row.dE = e.dE;
  row.d_cal_E = e.d_cal_E;
  row.enstrophy = e.enstrophy;

  row.xbar = mean_vector(state.x, n, d);
  row.vbar = mean_vector(state.v, n, d);

  const std::vector<double> xt = anticipated_positions(state, tau);
  std::vector<double> xtbar(d);
  for (int a = 0; a < d; ++a) xtbar[a] = row.xbar[a] + tau * row.vbar[a];
  row.X = max_spread(state.x, n, d, row.xbar);
  row.X_tau = max_spread(xt, n, d, xtbar);
  row.Vmax = max_spread(state.v, n, d, row.vbar);

  if (mod) {
    // Modified energies are hypocoercivity diagnostics; evaluate them in the
    // centered frame so drifting flocks do not pollute the cross term.
    SwarmState centered = state;
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < d; ++a) {
        centered.x[static_cast<std::size_t>(i) * d + a] -= row.xbar[a];
        centered.v[static_cast<std::size_t>(i) * d + a] -= row.vbar[a];
      }
    const double alpha = mod->alpha.value_or(default_modified_alpha(model));
    const ModifiedEnergies me =
        modified_energy(centered, model_potential(model), tau, mod->eps0, alpha);
    row.E_hat = std::holds_alternative<AtModel>(model) ? me.anticipated : me.standard;
  }
  return row;
}

ExponentFit fit_subexp_exponent(std::span<const double> t, std::span<const double> f,
                                double t_lo, double t_hi) {
  if (t.size() != f.size()) throw FitError("fit_subexp_exponent: size mismatch");
  std::vector<double> tw, fw;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] >= t_lo && t[k] <= t_hi) {
      tw.push_back(t[k]);
      fw.push_back(f[k]);
    }
  }
  if (tw.size() < 8)
    throw FitError("fit_subexp_exponent: fewer than 8 samples in window [" +
                   std::to_string(t_lo) + ", " + std::to_string(t_hi) + "]");
  for (double v : fw)
    if (!(v > 0.0)) throw FitError("fit_subexp_exponent: series must be strictly positive");

  const double f0 = fw.front();
  std::vector<double> xs, ys;
  xs.reserve(tw.size() - 1);
  for (std::size_t k = 1; k < tw.size(); ++k) {
    const double g = -std::log(fw[k] / f0);
    if (!(g > 0.0))
      throw FitError("fit_subexp_exponent: series not decreasing at t = " +
                     std::to_string(tw[k]));
    xs.push_back(std::log(tw[k]));
    ys.push_back(std::log(g));
  }
  const LinearFit fit = linear_fit(xs, ys);
  return {fit.slope, fit.slope_stderr, fit.n};
}

MeansCheckResult check_means_inequality(std::span<const double> z, int n, int dim,
                                        std::span<const double> c, double lam, double Lam) {
  if (n < 1 || dim < 1 || z.size() != static_cast<std::size_t>(n) * dim ||
      c.size() != static_cast<std::size_t>(n) * n)
    throw InputError("check_means_inequality: inconsistent sizes");
  if (!(0.0 < lam && lam <= Lam))
    throw InputError("check_means_inequality: need 0 < lam <= Lam");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double w = c[static_cast<std::size_t>(i) * n + j];
      if (!(w >= lam && w <= Lam))
        throw InputError("check_means_inequality: weight c[" + std::to_string(i) + "][" +
                         std::to_string(j) + "] = " + std::to_string(w) +
                         " outside [lam, Lam]");
    }

  const std::vector<double> zbar = mean_vector(z, n, dim);
  MeansCheckResult res;
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < dim; ++a) {
      const double w = z[static_cast<std::size_t>(i) * dim + a] - zbar[a];
      res.lhs += w * w;
    }
  res.lhs /= n;

  std::vector<double> local(dim);
  for (int i = 0; i < n; ++i) {
    std::fill(local.begin(), local.end(), 0.0);
    for (int j = 0; j < n; ++j) {
      const double w = c[static_cast<std::size_t>(i) * n + j];
      for (int a = 0; a < dim; ++a)
        local[a] += w * (z[static_cast<std::size_t>(i) * dim + a] -
                         z[static_cast<std::size_t>(j) * dim + a]);
    }
    for (int a = 0; a < dim; ++a) {
      const double w = local[a] / n;
      res.rhs += w * w;
    }
  }
  res.rhs /= n;

  const double q = Lam / lam - 1.0;
  res.c_explicit = 4.0 / (lam * lam) * (1.0 + 4.0 * q * q);
  res.ratio = res.rhs > 0.0 ? res.lhs / res.rhs
                            : (res.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  res.pass = res.lhs <= res.c_explicit * res.rhs * (1.0 + 1e-12);
  return res;
}

namespace {

EnvelopeChannel fit_channel(std::span<const DiagnosticsRow> rows, double exponent,
                            double (*pick)(const DiagnosticsRow&), double slack) {
  EnvelopeChannel ch;
  ch.exponent = exponent;
  const double t_mid = 0.5 * (rows.front().t + rows.back().t);
  for (const auto& row : rows) {
    const double ratio = pick(row) / bracket_pow(row.t, exponent);
    ch.c_all = std::max(ch.c_all, ratio);
    if (row.t <= t_mid) ch.c_head = std::max(ch.c_head, ratio);
  }
  for (const auto& row : rows) {
    if (row.t <= t_mid) continue;
    const double ratio = pick(row) / bracket_pow(row.t, exponent);
    if (ratio > ch.c_head * (1.0 + slack)) {
      if (ch.violations == 0) ch.first_violation_t = row.t;
      ++ch.violations;
    }
  }
  return ch;
}

}  // namespace

EnvelopeReport spread_envelopes(std::span<const DiagnosticsRow> rows, double beta,
                                double slack) {
  if (rows.empty()) throw InputError("spread_envelopes: empty row sequence");
  EnvelopeReport rep;
  rep.X = fit_channel(
      rows, 2.0 / (4.0 - 3.0 * beta), [](const DiagnosticsRow& r) { return r.X; }, slack);
  rep.X_tau = fit_channel(
      rows, 1.0 / (2.0 - 2.0 * beta), [](const DiagnosticsRow& r) { return r.X_tau; }, slack);
  rep.Vmax = fit_channel(
      rows, (2.0 - beta) / (4.0 - 3.0 * beta), [](const DiagnosticsRow& r) { return r.Vmax; },
      slack);
  return rep;
}

}  // namespace antic
