#include "antic/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "antic/error.hpp"
#include "antic/numeric.hpp"

namespace antic {

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

PotentialEval eval_power_law(const PowerLawPotential& p, double r) {
  PotentialEval e;
  const double r2 = r * r;
  e.du_over_r = p.a * bracket_pow(r, -p.beta);
  e.du = r * e.du_over_r;
  e.ddu = p.a * bracket_pow(r, -p.beta - 2.0) * (1.0 + (1.0 - p.beta) * r2);
  e.u = p.a * bracket_pow_m1(r, 2.0 - p.beta) / (2.0 - p.beta);
  return e;
}

PotentialEval eval_quadratic(const QuadraticPotential& p, double r) {
  return {0.5 * p.a * r * r, p.a * r, p.a, p.a};
}

PotentialEval eval_quartic(const RepulsiveAttractivePotential& p, double r) {
  const double s = r * r - p.r0 * p.r0;
  PotentialEval e;
  e.u = 0.25 * p.k * s * s;
  e.du_over_r = p.k * s;
  e.du = r * e.du_over_r;
  e.ddu = p.k * (3.0 * r * r - p.r0 * p.r0);
  return e;
}

// Cubic Hermite basis and antiderivatives on t in [0, 1].
struct Hermite {
  double h00, h10, h01, h11;
};
Hermite basis(double t) {
  const double t2 = t * t, t3 = t2 * t;
  return {2 * t3 - 3 * t2 + 1, t3 - 2 * t2 + t, -2 * t3 + 3 * t2, t3 - t2};
}
Hermite basis_deriv(double t) {
  const double t2 = t * t;
  return {6 * t2 - 6 * t, 3 * t2 - 4 * t + 1, -6 * t2 + 6 * t, 3 * t2 - 2 * t};
}
Hermite basis_integral(double t) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  return {0.5 * t4 - t3 + t, 0.25 * t4 - 2.0 / 3.0 * t3 + 0.5 * t2, -0.5 * t4 + t3,
          0.25 * t4 - t3 / 3.0};
}

// Fritsch-Carlson slopes for a monotone C1 interpolant of (x, y).
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const int m = static_cast<int>(x.size());
  std::vector<double> d(m, 0.0);
  if (m == 2) {
    d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
    return d;
  }
  std::vector<double> h(m - 1), delta(m - 1);
  for (int i = 0; i < m - 1; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  for (int i = 1; i < m - 1; ++i) {
    if (delta[i - 1] == 0.0 || delta[i] == 0.0 || sign_of(delta[i - 1]) != sign_of(delta[i])) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto edge = [](double h0, double h1, double d0, double d1) {
    double der = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (sign_of(der) != sign_of(d0))
      der = 0.0;
    else if (sign_of(d0) != sign_of(d1) && std::abs(der) > 3.0 * std::abs(d0))
      der = 3.0 * d0;
    return der;
  };
  d[0] = edge(h[0], h[1], delta[0], delta[1]);
  d[m - 1] = edge(h[m - 2], h[m - 3], delta[m - 2], delta[m - 3]);
  return d;
}

}  // namespace

TabulatedPotential::TabulatedPotential(std::vector<double> knots, std::vector<double> du_values)
    : knots_(std::move(knots)), du_(std::move(du_values)) {
  if (knots_.size() != du_.size() || knots_.size() < 2)
    throw InputError("tabulated potential: need >= 2 matching knots and U' values");
  if (knots_.front() != 0.0)
    throw InputError("tabulated potential: first knot must be r = 0");
  if (du_.front() != 0.0)
    throw InputError("tabulated potential: U'(0) must be 0 for a C^2 radial potential");
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
    if (!(knots_[i] < knots_[i + 1]))
      throw InputError("tabulated potential: knots must be strictly increasing");
  for (double v : du_)
    if (!std::isfinite(v)) throw InputError("tabulated potential: non-finite U' value");

  deriv_ = pchip_slopes(knots_, du_);

  u_knots_.assign(knots_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    const double h = knots_[i + 1] - knots_[i];
    u_knots_[i + 1] = u_knots_[i] + h * (0.5 * (du_[i] + du_[i + 1])) +
                      h * h * (deriv_[i] - deriv_[i + 1]) / 12.0;
  }
}

PotentialEval TabulatedPotential::eval(double r) const {
  if (r > knots_.back())
    throw ExtrapolationError("tabulated potential: r = " + std::to_string(r) +
                             " beyond last knot " + std::to_string(knots_.back()));
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), r);
  const int seg = std::clamp(static_cast<int>(it - knots_.begin()) - 1, 0,
                             static_cast<int>(knots_.size()) - 2);
  const double h = knots_[seg + 1] - knots_[seg];
  const double t = (r - knots_[seg]) / h;
  const double y0 = du_[seg], y1 = du_[seg + 1];
  const double d0 = deriv_[seg], d1 = deriv_[seg + 1];

  PotentialEval e;
  const Hermite b = basis(t);
  e.du = y0 * b.h00 + h * d0 * b.h10 + y1 * b.h01 + h * d1 * b.h11;
  const Hermite bd = basis_deriv(t);
  e.ddu = (y0 * bd.h00 + h * d0 * bd.h10 + y1 * bd.h01 + h * d1 * bd.h11) / h;
  const Hermite bi = basis_integral(t);
  e.u = u_knots_[seg] + h * (y0 * bi.h00 + h * d0 * bi.h10 + y1 * bi.h01 + h * d1 * bi.h11);
  if (seg == 0) {
    // On [0, r1] the Hermite cubic has du(0) = 0, so du/r has the closed form
    // below; at r = 0 it reduces to the interpolant slope d0 = U''(0).
    e.du_over_r = d0 * (1.0 - t) * (1.0 - t) + (t / h) * (3.0 - 2.0 * t) * y1 +
                  d1 * t * (t - 1.0);
  } else {
    e.du_over_r = e.du / r;
  }
  return e;
}

PotentialEval eval_potential(const Potential& spec, double r) {
  if (!std::isfinite(r) || r < 0.0)
    throw InputError("eval_potential: radius must be finite and nonnegative, got " +
                     std::to_string(r));
  return std::visit(
      [r](const auto& p) -> PotentialEval {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PowerLawPotential>)
          return eval_power_law(p, r);
        else if constexpr (std::is_same_v<T, QuadraticPotential>)
          return eval_quadratic(p, r);
        else if constexpr (std::is_same_v<T, RepulsiveAttractivePotential>)
          return eval_quartic(p, r);
        else
          return p.eval(r);
      },
      spec);
}

double potential_beta(const Potential& spec) {
  if (const auto* p = std::get_if<PowerLawPotential>(&spec)) return p->beta;
  return 0.0;
}

ClassReport classify_potential(const Potential& spec, double r_max, int n_samples) {
  if (!(r_max > 0.0) || n_samples < 2)
    throw InputError("classify_potential: need r_max > 0 and n_samples >= 2");
  ClassReport rep;
  rep.r_max = r_max;
  rep.n_samples = n_samples;
  rep.beta_used = potential_beta(spec);
  const double beta = rep.beta_used;

  double a_bound = 0.0, r_bound = 0.0;
  double a_convex = std::numeric_limits<double>::infinity(), r_convex = 0.0;
  double a_attr = std::numeric_limits<double>::infinity(), r_attr = 0.0;
  double worst_convex_r = -1.0, worst_attr_r = -1.0;

  std::vector<double> us(n_samples), rs(n_samples);
  for (int k = 0; k < n_samples; ++k) {
    const double r = r_max * static_cast<double>(k) / (n_samples - 1);
    const PotentialEval e = eval_potential(spec, r);
    if (!std::isfinite(e.u) || !std::isfinite(e.du) || !std::isfinite(e.ddu) ||
        !std::isfinite(e.du_over_r))
      throw SpecError("classify_potential: non-finite value at r = " + std::to_string(r));
    rs[k] = r;
    us[k] = e.u;

    if (std::abs(e.ddu) > a_bound) {
      a_bound = std::abs(e.ddu);
      r_bound = r;
    }
    const double wb = bracket_pow(r, beta);
    const double cvx = e.ddu * wb;  // largest admissible a at this sample
    if (cvx < a_convex) {
      a_convex = cvx;
      r_convex = r;
    }
    if (e.ddu <= 0.0) worst_convex_r = r;
    const double att = e.du_over_r * wb;
    if (att < a_attr) {
      a_attr = att;
      r_attr = r;
    }
    if (e.du_over_r <= 0.0 && r > 0.0) worst_attr_r = r;
  }

  rep.bounded = {true, a_bound, r_bound};
  rep.convex = {a_convex > 0.0, a_convex, a_convex > 0.0 ? r_convex : worst_convex_r};
  rep.attractive = {a_attr > 0.0, a_attr, a_attr > 0.0 ? r_attr : worst_attr_r};

  double strength = a_bound;
  if (const auto* p = std::get_if<PowerLawPotential>(&spec))
    strength = p->a;
  else if (const auto* p = std::get_if<QuadraticPotential>(&spec))
    strength = p->a;
  else if (const auto* p = std::get_if<RepulsiveAttractivePotential>(&spec))
    strength = p->k;
  else if (a_attr > 0.0)
    strength = a_attr;
  rep.confining_a = strength / (2.0 - beta);

  double L = 0.0, r_conf = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    const double need = bracket_pow(rs[k], 2.0 - beta) - us[k] / rep.confining_a;
    if (need > L) {
      L = need;
      r_conf = rs[k];
    }
  }
  rep.confining = {std::isfinite(L), L, r_conf};
  return rep;
}

double potential_strength(const Potential& spec) {
  if (const auto* p = std::get_if<PowerLawPotential>(&spec)) return p->a;
  if (const auto* p = std::get_if<QuadraticPotential>(&spec)) return p->a;
  if (const auto* p = std::get_if<RepulsiveAttractivePotential>(&spec)) return p->k;
  const auto& tab = std::get<TabulatedPotential>(spec);
  const ClassReport rep = classify_potential(spec, tab.r_max(), 257);
  return rep.attractive.pass ? rep.attractive.value : rep.bounded.value;
}

}  // namespace antic
