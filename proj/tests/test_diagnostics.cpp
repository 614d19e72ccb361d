#include <doctest.h>

#include <cmath>

#include "antic/diagnostics.hpp"
#include "antic/error.hpp"
#include "antic/integrator.hpp"
#include "oracles.hpp"

using namespace antic;

TEST_SUITE("diagnostics") {

TEST_CASE("two-agent energies by hand") {
  SwarmState s(2, 1);
  s.x = {1.0, -1.0};
  s.v = {1.0, -1.0};
  const Model m = AtModel{QuadraticPotential{1.0}, 0.0};
  const EnergyReport e = energies(s, m);
  // kinetic (1/4)(1+1) = 1/2; potential (1/8)(U(2)+U(2)) = 1/2
  CHECK(e.E == doctest::Approx(1.0));
  CHECK(e.cal_E == e.E);  // tau = 0: bitwise
  CHECK(e.dE == doctest::Approx(1.0));  // vbar = 0
  CHECK(e.d_cal_E == doctest::Approx(1.0));
}

TEST_CASE("uniform flock carries only mean kinetic energy") {
  SwarmState s(5, 2);
  for (int i = 0; i < 5; ++i) {
    s.x[2 * i] = 1.0;
    s.x[2 * i + 1] = -2.0;
    s.v[2 * i] = 3.0;
    s.v[2 * i + 1] = 4.0;
  }
  const EnergyReport e = energies(s, AtModel{QuadraticPotential{1.0}, 0.5});
  CHECK(e.E == doctest::Approx(12.5));  // |v|^2 / 2
  CHECK(e.dE == doctest::Approx(0.0));
  CHECK(e.enstrophy == doctest::Approx(0.0));
}

TEST_CASE("fluctuation identity dE = E - |vbar|^2 / 2") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    SwarmState s = oracles::random_state(rng, 7, 3);
    const Model m = AtModel{PowerLawPotential{1.0, 0.4}, 0.6};
    const EnergyReport e = energies(s, m);
    double v2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      double mean = 0.0;
      for (int i = 0; i < 7; ++i) mean += s.v[3 * i + a];
      mean /= 7.0;
      v2 += mean * mean;
    }
    CHECK(e.dE == doctest::Approx(e.E - 0.5 * v2).epsilon(1e-12));
    CHECK(e.d_cal_E == doctest::Approx(e.cal_E - 0.5 * v2).epsilon(1e-12));
  }
}

TEST_CASE("modified energy reduces to the plain energies") {
  Rng rng(5);
  SwarmState s = oracles::random_state(rng, 6, 2);
  const Potential pot = PowerLawPotential{1.0, 0.3};
  const Model m = AtModel{pot, 0.5};
  const EnergyReport e = energies(s, m);

  const ModifiedEnergies at_eps0 = modified_energy(s, &pot, 0.5, 0.0, 0.3);
  CHECK(at_eps0.standard == doctest::Approx(e.E).epsilon(1e-15));
  CHECK(at_eps0.anticipated == doctest::Approx(e.cal_E).epsilon(1e-15));

  SwarmState frozen = s;
  std::fill(frozen.v.begin(), frozen.v.end(), 0.0);
  const ModifiedEnergies at_v0 = modified_energy(frozen, &pot, 0.5, 0.01, 0.3);
  const EnergyReport e_v0 = energies(frozen, m);
  CHECK(at_v0.standard == doctest::Approx(e_v0.E).epsilon(1e-15));
  CHECK(at_v0.anticipated == doctest::Approx(e_v0.cal_E).epsilon(1e-15));
}

TEST_CASE("modified energy obeys the Cauchy-Schwarz envelope") {
  Rng rng(7);
  const Potential pot = QuadraticPotential{1.0};
  for (int trial = 0; trial < 30; ++trial) {
    SwarmState s = oracles::random_state(rng, 5, 2);
    s.t = rng.uniform(0.0, 20.0);
    const double eps0 = 0.05, alpha = 0.4, tau = 0.8;
    const ModifiedEnergies me = modified_energy(s, &pot, tau, eps0, alpha);
    const EnergyReport e = energies(s, AtModel{pot, tau});
    double envelope_cur = 0.0, envelope_ant = 0.0;
    for (int i = 0; i < s.n; ++i) {
      double nx = 0.0, nxt = 0.0, nv = 0.0;
      for (int a = 0; a < 2; ++a) {
        const double xc = s.x[2 * i + a];
        const double xt = xc + tau * s.v[2 * i + a];
        nx += xc * xc;
        nxt += xt * xt;
        nv += s.v[2 * i + a] * s.v[2 * i + a];
      }
      envelope_cur += std::sqrt(nx * nv);
      envelope_ant += std::sqrt(nxt * nv);
    }
    CHECK(std::abs(me.standard - e.E) <= me.eps * envelope_cur / s.n + 1e-12);
    CHECK(std::abs(me.anticipated - e.cal_E) <= me.eps * envelope_ant / s.n + 1e-12);
    CHECK(me.eps == doctest::Approx(eps0 * bracket_pow(s.t, -alpha)));
  }
}

TEST_CASE("subexponential fitter recovers synthetic exponents") {
  std::vector<double> t, f_sub, f_exp;
  for (int k = 0; k <= 2000; ++k) {
    const double tt = 0.05 * k;
    t.push_back(tt);
    f_sub.push_back(std::exp(-std::pow(tt, 0.7)));
    f_exp.push_back(std::exp(-2.0 * tt));
  }
  const ExponentFit a = fit_subexp_exponent(t, f_sub, 0.0, 100.0);
  CHECK(a.slope == doctest::Approx(0.70).epsilon(0.015));
  const ExponentFit b = fit_subexp_exponent(t, f_exp, 0.0, 100.0);
  CHECK(b.slope == doctest::Approx(1.00).epsilon(0.015));
}

TEST_CASE("fitter rejects bad series") {
  std::vector<double> t{1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<double> up{1, 2, 3, 4, 5, 6, 7, 8, 9};
  CHECK_THROWS_AS(fit_subexp_exponent(t, up, 0.0, 10.0), FitError);  // increasing
  std::vector<double> neg{1, -1, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.01};
  CHECK_THROWS_AS(fit_subexp_exponent(t, neg, 0.0, 10.0), FitError);  // nonpositive
  std::vector<double> shortt{1, 2, 3}, shortf{1, 0.5, 0.2};
  CHECK_THROWS_AS(fit_subexp_exponent(shortt, shortf, 0.0, 10.0), FitError);  // < 8 samples
}

TEST_CASE("means inequality: constant weights give ratio 1/c^2") {
  Rng rng(9);
  const int n = 6, d = 2;
  std::vector<double> z(n * d);
  for (auto& v : z) v = rng.normal();
  const double c = 0.7;
  std::vector<double> w(n * n, c);
  const MeansCheckResult res = check_means_inequality(z, n, d, w, c, c);
  CHECK(res.rhs == doctest::Approx(c * c * res.lhs).epsilon(1e-12));
  CHECK(res.ratio == doctest::Approx(1.0 / (c * c)).epsilon(1e-12));
  CHECK(res.c_explicit == doctest::Approx(4.0 / (c * c)));
  CHECK(res.pass);
}

TEST_CASE("means inequality: degenerate all-equal points pass") {
  const int n = 4, d = 3;
  std::vector<double> z(n * d, 2.5);
  std::vector<double> w(n * n, 1.0);
  const MeansCheckResult res = check_means_inequality(z, n, d, w, 0.5, 2.0);
  CHECK(res.lhs == 0.0);
  CHECK(res.rhs == 0.0);
  CHECK(res.pass);
}

TEST_CASE("means inequality holds on 1000 random instances") {
  Rng rng(11);
  double worst = 0.0;
  for (int it = 0; it < 1000; ++it) {
    const int n = rng.uniform_int(2, 12);
    const int d = rng.uniform_int(1, 3);
    double lam = rng.uniform(0.0, 1.0);
    if (lam <= 0.0) lam = 1.0;
    const double cap = rng.uniform(lam, 4.0);
    std::vector<double> z(static_cast<std::size_t>(n) * d);
    for (auto& v : z) v = rng.normal();
    std::vector<double> c(static_cast<std::size_t>(n) * n);
    for (auto& v : c) v = rng.uniform(lam, cap);
    const MeansCheckResult res = check_means_inequality(z, n, d, c, lam, cap);
    CHECK(res.pass);
    if (res.c_explicit > 0.0) worst = std::max(worst, res.ratio / res.c_explicit);
  }
  CHECK(worst <= 1.0);
  CHECK(worst > 0.0);
}

TEST_CASE("means inequality: dimension splits into components") {
  Rng rng(13);
  const int n = 8, d = 3;
  std::vector<double> z(n * d);
  for (auto& v : z) v = rng.normal();
  std::vector<double> c(n * n);
  for (auto& v : c) v = rng.uniform(0.5, 2.0);
  const MeansCheckResult full = check_means_inequality(z, n, d, c, 0.5, 2.0);
  double lhs_sum = 0.0, rhs_sum = 0.0;
  for (int a = 0; a < d; ++a) {
    std::vector<double> comp(n);
    for (int i = 0; i < n; ++i) comp[i] = z[static_cast<std::size_t>(i) * d + a];
    const MeansCheckResult part = check_means_inequality(comp, n, 1, c, 0.5, 2.0);
    lhs_sum += part.lhs;
    rhs_sum += part.rhs;
  }
  CHECK(full.lhs == doctest::Approx(lhs_sum).epsilon(1e-12));
  CHECK(full.rhs == doctest::Approx(rhs_sum).epsilon(1e-12));
}

TEST_CASE("means inequality restated for row-stochastic local weights") {
  // theta_ij = c_ij / sum_j c_ij with lam/N <= theta_ij <= Lam/N; then
  // c_ij = N theta_ij satisfies the hypothesis and the local means are
  // zbar_i = sum_j theta_ij z_j.
  Rng rng(15);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.uniform_int(2, 10);
    const int d = rng.uniform_int(1, 3);
    std::vector<double> raw(static_cast<std::size_t>(n) * n);
    for (auto& v : raw) v = rng.uniform(0.2, 1.0);
    std::vector<double> theta(raw.size());
    for (int i = 0; i < n; ++i) {
      double row = 0.0;
      for (int j = 0; j < n; ++j) row += raw[static_cast<std::size_t>(i) * n + j];
      for (int j = 0; j < n; ++j)
        theta[static_cast<std::size_t>(i) * n + j] = raw[static_cast<std::size_t>(i) * n + j] / row;
    }
    std::vector<double> c(theta.size());
    double lam = 1e300, cap = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
      c[k] = n * theta[k];
      lam = std::min(lam, c[k]);
      cap = std::max(cap, c[k]);
    }
    std::vector<double> z(static_cast<std::size_t>(n) * d);
    for (auto& v : z) v = rng.normal();
    const MeansCheckResult res = check_means_inequality(z, n, d, c, lam, cap);
    CHECK(res.pass);

    // rhs equals the mean squared deviation from the local means
    double local_dev = 0.0;
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < d; ++a) {
        double zi_loc = 0.0;
        for (int j = 0; j < n; ++j)
          zi_loc += theta[static_cast<std::size_t>(i) * n + j] *
                    z[static_cast<std::size_t>(j) * d + a];
        const double w = z[static_cast<std::size_t>(i) * d + a] - zi_loc;
        local_dev += w * w;
      }
    local_dev /= n;
    CHECK(res.rhs == doctest::Approx(local_dev).epsilon(1e-10));
  }
}

TEST_CASE("means inequality validates weights") {
  std::vector<double> z{0.0, 1.0};
  std::vector<double> c{1.0, 1.0, 3.0, 1.0};
  CHECK_THROWS_WITH_AS(check_means_inequality(z, 2, 1, c, 1.0, 2.0).pass,
                       doctest::Contains("c[1][0]"), InputError);
  CHECK_THROWS_AS(check_means_inequality(z, 2, 1, c, -1.0, 2.0), InputError);
}

TEST_CASE("spread envelopes: static run never violates") {
  std::vector<DiagnosticsRow> rows;
  for (int k = 0; k <= 100; ++k) {
    DiagnosticsRow r;
    r.t = 0.1 * k;
    r.X = 2.0;
    r.X_tau = 2.0;
    r.Vmax = 0.0;
    rows.push_back(r);
  }
  const EnvelopeReport rep = spread_envelopes(rows, 0.2);
  CHECK(rep.X.violations == 0);
  CHECK(rep.X_tau.violations == 0);
  CHECK(rep.Vmax.violations == 0);
  CHECK(rep.X.c_head >= 2.0 * 0.99);
  CHECK(rep.X.exponent == doctest::Approx(2.0 / 3.4));
  CHECK(rep.X_tau.exponent == doctest::Approx(1.0 / 1.6));
}

TEST_CASE("spread envelopes flag super-envelope growth") {
  std::vector<DiagnosticsRow> rows;
  for (int k = 0; k <= 100; ++k) {
    DiagnosticsRow r;
    r.t = 0.5 * k;
    r.X = bracket_pow(r.t, 1.5);  // grows faster than <t>^(2/(4-3b))
    r.X_tau = 1.0;
    r.Vmax = 1.0;
    rows.push_back(r);
  }
  const EnvelopeReport rep = spread_envelopes(rows, 0.0);
  CHECK(rep.X.violations > 0);
  CHECK(rep.X_tau.violations == 0);
}

TEST_CASE("constant-kernel alignment: Vmax non-increasing and dE exact") {
  SwarmState s(6, 2);
  Rng rng(17);
  for (auto& v : s.x) v = 2.0 * rng.normal();
  for (auto& v : s.v) v = rng.normal();
  const double tau = 0.5, phi = 1.2;
  const Model m = CsModel{Kernel{ConstantKernel{phi}}, tau};
  IntegratorSpec spec;
  spec.h = 1e-2;
  spec.t_end = 4.0;
  spec.sample_stride = 10;
  std::vector<DiagnosticsRow> rows;
  integrate(m, s, spec, [&](long, const SwarmState& st) { rows.push_back(make_row(st, m)); });
  for (std::size_t k = 1; k < rows.size(); ++k)
    CHECK(rows[k].Vmax <= rows[k - 1].Vmax * (1.0 + 1e-12));
  for (const auto& r : rows) {
    const double expect = rows.front().dE * std::exp(-2.0 * tau * phi * r.t);
    CHECK(r.dE == doctest::Approx(expect).epsilon(1e-6));
  }
}

TEST_CASE("make_row selects the model-matched modified energy") {
  Rng rng(19);
  SwarmState s = oracles::random_state(rng, 5, 2);
  oracles::center_state(s);
  const Potential pot = PowerLawPotential{1.0, 0.2};
  const Model at = AtModel{pot, 0.5};
  const DiagnosticsRow row = make_row(s, at);
  REQUIRE(row.E_hat.has_value());
  const double alpha = default_modified_alpha(at);
  CHECK(alpha == doctest::Approx(2.0 * 0.2 / 0.8));
  const ModifiedEnergies me = modified_energy(s, &pot, 0.5, 1e-2, alpha);
  CHECK(*row.E_hat == doctest::Approx(me.anticipated).epsilon(1e-12));
}

}  // TEST_SUITE
