#include <doctest.h>

#include <cmath>
#include <numbers>

#include "antic/dynamics.hpp"
#include "antic/error.hpp"
#include "antic/integrator.hpp"
#include "oracles.hpp"

using namespace antic;

TEST_SUITE("dynamics") {

TEST_CASE("anticipated positions") {
  SwarmState s(1, 2);
  s.x = {1.0, 0.0};
  s.v = {0.0, 2.0};
  CHECK(anticipated_positions(s, 0.0) == s.x);
  const std::vector<double> xt = anticipated_positions(s, 0.5);
  CHECK(xt[0] == 1.0);
  CHECK(xt[1] == 1.0);

  Rng rng(2);
  SwarmState r = oracles::random_state(rng, 8, 3);
  const std::vector<double> got = anticipated_positions(r, 0.37);
  for (std::size_t k = 0; k < got.size(); ++k)
    CHECK(got[k] == r.x[k] + 0.37 * r.v[k]);
}

TEST_CASE("two symmetric agents on a line") {
  SwarmState s(2, 1);
  s.x = {1.0, -1.0};
  s.v = {0.0, 0.0};
  const Model m = AtModel{QuadraticPotential{1.0}, 0.5};
  const std::vector<double> a = acceleration(m, s);
  CHECK(a[0] == doctest::Approx(-1.0));
  CHECK(a[1] == doctest::Approx(1.0));
}

TEST_CASE("identical agents feel no force") {
  for (const Model& m :
       {Model{AtModel{PowerLawPotential{1.0, 0.3}, 0.5}},
        Model{PhiUModel{QuadraticPotential{1.0}, ConstantKernel{2.0}, 0.5}},
        Model{CsModel{ScalarFatTailKernel{1.0, 0.2}, 0.5}}}) {
    SwarmState s(4, 2);
    for (int i = 0; i < 4; ++i) {
      s.x[2 * i] = 0.3;
      s.x[2 * i + 1] = -0.7;
      s.v[2 * i] = 1.0;
      s.v[2 * i + 1] = 2.0;
    }
    for (double a : acceleration(m, s)) CHECK(a == 0.0);
  }
}

TEST_CASE("quadratic case collapses to a_i = -x_i - tau v_i in the centered frame") {
  Rng rng(4);
  SwarmState s = oracles::random_state(rng, 3, 2);
  oracles::center_state(s);
  const double tau = 0.8;
  const std::vector<double> a = acceleration(AtModel{QuadraticPotential{1.0}, tau}, s);
  for (std::size_t k = 0; k < a.size(); ++k)
    CHECK(a[k] == doctest::Approx(-s.x[k] - tau * s.v[k]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("anticipated force matches the naive double-loop oracle") {
  Rng rng(6);
  for (const Potential& pot :
       {Potential{PowerLawPotential{1.2, 0.4}}, Potential{RepulsiveAttractivePotential{1.0, 1.0}}}) {
    for (int trial = 0; trial < 20; ++trial) {
      SwarmState s = oracles::random_state(rng, 8, 3);
      const double tau = rng.uniform();
      const std::vector<double> got = acceleration(AtModel{pot, tau}, s);
      const std::vector<double> want = oracles::naive_at_acceleration(pot, tau, s);
      for (std::size_t k = 0; k < got.size(); ++k)
        CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("momentum: accelerations sum to zero for every model") {
  Rng rng(8);
  const std::vector<Model> models{
      AtModel{PowerLawPotential{1.0, 0.25}, 0.7},
      PhiUModel{PowerLawPotential{1.0, 0.25},
                Kernel{HessianKernel{PowerLawPotential{1.0, 0.25},
                                     KernelEvalPoint::anticipated}},
                0.7},
      PhiUModel{QuadraticPotential{0.5}, Kernel{ScalarFatTailKernel{1.0, 0.4}}, 0.4},
      CsModel{Kernel{ConstantKernel{1.5}}, 0.3}};
  for (const Model& m : models) {
    for (int trial = 0; trial < 10; ++trial) {
      SwarmState s = oracles::random_state(rng, 12, 3, 2.0, 1.5);
      const std::vector<double> a = acceleration(m, s);
      double amax = 0.0;
      for (double c : a) amax = std::max(amax, std::abs(c));
      for (int comp = 0; comp < s.dim; ++comp) {
        double sum = 0.0;
        for (int i = 0; i < s.n; ++i) sum += a[static_cast<std::size_t>(i) * s.dim + comp];
        CHECK(std::abs(sum) <= 1e-12 * s.n * std::max(amax, 1e-300));
      }
    }
  }
}

TEST_CASE("translation and boost invariance of the anticipated force") {
  Rng rng(10);
  SwarmState s = oracles::random_state(rng, 6, 2);
  const Model m = AtModel{PowerLawPotential{1.0, 0.5}, 0.6};
  const std::vector<double> base = acceleration(m, s);

  SwarmState shifted = s;
  for (int i = 0; i < s.n; ++i) {
    shifted.x[2 * i] += 5.0;
    shifted.x[2 * i + 1] -= 3.0;
  }
  const std::vector<double> a_shift = acceleration(m, shifted);

  SwarmState boosted = s;
  for (int i = 0; i < s.n; ++i) {
    boosted.v[2 * i] += 1.7;
    boosted.v[2 * i + 1] += 0.4;
  }
  const std::vector<double> a_boost = acceleration(m, boosted);

  for (std::size_t k = 0; k < base.size(); ++k) {
    CHECK(a_shift[k] == doctest::Approx(base[k]).epsilon(1e-12).scale(1.0));
    CHECK(a_boost[k] == doctest::Approx(base[k]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("tau = 0 quadratic dynamics conserves energy (Hamiltonian case)") {
  Rng rng(12);
  SwarmState s = oracles::random_state(rng, 6, 2);
  const Model m = AtModel{QuadraticPotential{1.0}, 0.0};
  auto energy = [&](const SwarmState& st) {
    double kin = 0.0;
    for (double v : st.v) kin += v * v;
    kin /= 2.0 * st.n;
    double pot = 0.0;
    for (int i = 0; i < st.n; ++i)
      for (int j = 0; j < st.n; ++j) {
        double r2 = 0.0;
        for (int a = 0; a < st.dim; ++a) {
          const double z = st.x[2 * i + a] - st.x[2 * j + a];
          r2 += z * z;
        }
        pot += 0.5 * r2;
      }
    return kin + pot / (2.0 * st.n * st.n);
  };
  const double e0 = energy(s);
  IntegratorSpec spec;
  spec.h = 1e-3;
  spec.t_end = 2.0;
  spec.sample_stride = 1000;
  const IntegrationResult res = integrate(m, s, spec, {});
  CHECK(energy(res.final_state) == doctest::Approx(e0).epsilon(1e-10));
}

TEST_CASE("general-kernel dynamics reduces to the anticipated force as tau -> 0") {
  Rng rng(14);
  SwarmState s = oracles::random_state(rng, 5, 2);
  const Potential pot = PowerLawPotential{1.0, 0.3};
  auto diff_norm = [&](double tau) {
    const std::vector<double> a_at = acceleration(AtModel{pot, tau}, s);
    const std::vector<double> a_phiu = acceleration(
        PhiUModel{pot, Kernel{HessianKernel{pot, KernelEvalPoint::current}}, tau}, s);
    double m = 0.0;
    for (std::size_t k = 0; k < a_at.size(); ++k)
      m = std::max(m, std::abs(a_at[k] - a_phiu[k]));
    return m;
  };
  // One-step Taylor comparison: the gap shrinks like tau^2.
  const double d1 = diff_norm(0.08);
  const double d2 = diff_norm(0.04);
  const double d3 = diff_norm(0.02);
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.35));
  CHECK(d2 / d3 == doctest::Approx(4.0).epsilon(0.35));
}

TEST_CASE("polar equilibrium has zero derivatives") {
  const Potential pot = RepulsiveAttractivePotential{1.0, 1.0};
  const PolarState dp = polar_rhs({1.0, 0.3, 0.0, 0.0}, pot, 0.8);
  CHECK(dp.r == 0.0);
  CHECK(dp.theta == 0.0);
  CHECK(dp.vr == 0.0);
  CHECK(dp.vtheta == 0.0);
  CHECK_THROWS_AS(polar_rhs({0.0, 0.0, 0.0, 0.0}, pot, 0.8), DomainError);
  CHECK_THROWS_AS(polar_rhs({-1.0, 0.0, 0.0, 0.0}, pot, 0.8), DomainError);
}

TEST_CASE("polar trajectory equals the mapped two-agent trajectory") {
  const Potential pot = RepulsiveAttractivePotential{1.0, 1.0};
  const double tau = 1.0;
  const PolarState p0{1.05, 0.0, 0.0, 0.08};

  // integrate the polar system
  std::vector<double> y{p0.r, p0.theta, p0.vr, p0.vtheta};
  const OdeRhs rhs = [&](double, std::span<const double> s, std::span<double> dy) {
    const PolarState d = polar_rhs({s[0], s[1], s[2], s[3]}, pot, tau);
    dy[0] = d.r;
    dy[1] = d.theta;
    dy[2] = d.vr;
    dy[3] = d.vtheta;
  };
  OdeStepper stepper(Method::rk4, 4);

  // integrate the centered two-agent system with the same step
  SwarmState cart = two_agent_from_polar(p0, tau);
  const Model model = AtModel{pot, tau};
  const double h = 1e-3;
  std::vector<double> ynext(4);
  for (int k = 1; k <= 10000; ++k) {
    stepper.step((k - 1) * h, h, y, rhs, ynext);
    y = ynext;
    cart = step(model, cart, h);
    if (k % 500 == 0) {
      const PolarState q = to_polar_two_agent(cart, tau);
      CHECK(y[0] == doctest::Approx(q.r).epsilon(1e-8));
      CHECK(y[2] == doctest::Approx(q.vr).epsilon(1e-8).scale(1.0));
      CHECK(y[3] == doctest::Approx(q.vtheta).epsilon(1e-8).scale(1.0));
      const double dtheta = std::remainder(y[1] - q.theta, 2.0 * std::numbers::pi);
      CHECK(std::abs(dtheta) <= 1e-8);
    }
  }
}

TEST_CASE("polar reduction of a centered pair") {
  SwarmState s(2, 2);
  s.x = {0.5, 0.0, -0.5, 0.0};
  s.v = {0.0, 0.0, 0.0, 0.0};
  const PolarState p = to_polar_two_agent(s, 0.9);
  CHECK(p.r == doctest::Approx(1.0));  // anticipated separation
  CHECK(p.theta == doctest::Approx(0.0));
  CHECK(p.vr == 0.0);
  CHECK(p.vtheta == 0.0);

  // rotate by 90 degrees
  SwarmState rot(2, 2);
  rot.x = {0.0, 0.5, 0.0, -0.5};
  rot.v = {0.0, 0.0, 0.0, 0.0};
  const PolarState q = to_polar_two_agent(rot, 0.9);
  CHECK(q.theta == doctest::Approx(std::numbers::pi / 2.0));
  CHECK(q.r == doctest::Approx(p.r));
  CHECK(q.vr == doctest::Approx(p.vr));
  CHECK(q.vtheta == doctest::Approx(p.vtheta));
}

TEST_CASE("polar reduction demands a centered pair") {
  SwarmState s(2, 2);
  s.x = {0.5, 0.0, -0.4, 0.0};  // x1 != -x2
  s.v = {0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(to_polar_two_agent(s, 0.5), ContractError);
  SwarmState bad_dim(3, 2);
  CHECK_THROWS_AS(to_polar_two_agent(bad_dim, 0.5), ContractError);
}

TEST_CASE("round trip through the polar chart") {
  Rng rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    PolarState p;
    p.r = 0.5 + rng.uniform();
    p.theta = rng.uniform(-3.0, 3.0);
    p.vr = rng.normal() * 0.3;
    p.vtheta = rng.normal() * 0.3;
    const SwarmState s = two_agent_from_polar(p, 0.8);
    const PolarState q = to_polar_two_agent(s, 0.8);
    CHECK(q.r == doctest::Approx(p.r).epsilon(1e-12));
    CHECK(std::abs(std::remainder(q.theta - p.theta, 2.0 * std::numbers::pi)) <= 1e-12);
    CHECK(q.vr == doctest::Approx(p.vr).epsilon(1e-10).scale(1.0));
    CHECK(q.vtheta == doctest::Approx(p.vtheta).epsilon(1e-10).scale(1.0));
  }
}

}  // TEST_SUITE
