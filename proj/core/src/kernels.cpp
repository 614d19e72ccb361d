#include "antic/kernels.hpp"

#include <cmath>

#include "antic/error.hpp"

namespace antic {

namespace {

void check_inputs(std::span<const double> xi, std::span<const double> vi,
                  std::span<const double> xj, std::span<const double> vj, double tau) {
  if (xi.size() != xj.size() || vi.size() != vj.size() || xi.size() != vi.size() ||
      xi.empty())
    throw InputError("eval_kernel: inconsistent dimensions");
  if (!all_finite(xi) || !all_finite(vi) || !all_finite(xj) || !all_finite(vj) ||
      !std::isfinite(tau))
    throw InputError("eval_kernel: non-finite input");
}

// Separation vector at the kernel's evaluation point, written to z.
void separation(const HessianKernel& k, std::span<const double> xi, std::span<const double> vi,
                std::span<const double> xj, std::span<const double> vj, double tau,
                std::span<double> z) {
  const std::size_t d = xi.size();
  if (k.eval_point == KernelEvalPoint::anticipated) {
    for (std::size_t a = 0; a < d; ++a) z[a] = (xi[a] + tau * vi[a]) - (xj[a] + tau * vj[a]);
  } else {
    for (std::size_t a = 0; a < d; ++a) z[a] = xi[a] - xj[a];
  }
}

double scalar_weight(const ScalarFatTailKernel& k, std::span<const double> xi,
                     std::span<const double> xj) {
  double r2 = 0.0;
  for (std::size_t a = 0; a < xi.size(); ++a) {
    const double dxa = xi[a] - xj[a];
    r2 += dxa * dxa;
  }
  return k.phi_minus * std::exp(-0.5 * k.gamma * std::log1p(r2));
}

}  // namespace

Matrix eval_kernel(const Kernel& spec, std::span<const double> xi, std::span<const double> vi,
                   std::span<const double> xj, std::span<const double> vj, double tau) {
  check_inputs(xi, vi, xj, vj, tau);
  const int d = static_cast<int>(xi.size());
  Matrix m(d);

  if (const auto* k = std::get_if<ScalarFatTailKernel>(&spec)) {
    const double phi = scalar_weight(*k, xi, xj);
    for (int a = 0; a < d; ++a) m(a, a) = phi;
    return m;
  }
  if (const auto* k = std::get_if<ConstantKernel>(&spec)) {
    for (int a = 0; a < d; ++a) m(a, a) = k->phi;
    return m;
  }

  const auto& k = std::get<HessianKernel>(spec);
  std::vector<double> z(d);
  separation(k, xi, vi, xj, vj, tau, z);
  const double r = norm(z);
  const PotentialEval e = eval_potential(k.potential, r);
  if (r == 0.0) {
    for (int a = 0; a < d; ++a) m(a, a) = e.ddu;
    return m;
  }
  for (int a = 0; a < d; ++a) {
    const double na = z[a] / r;
    for (int b = 0; b < d; ++b) {
      const double nb = z[b] / r;
      m(a, b) = (e.ddu - e.du_over_r) * na * nb + (a == b ? e.du_over_r : 0.0);
    }
  }
  return m;
}

void apply_kernel(const Kernel& spec, std::span<const double> xi, std::span<const double> vi,
                  std::span<const double> xj, std::span<const double> vj, double tau,
                  std::span<const double> w, std::span<double> out,
                  std::span<double> scratch) {
  const std::size_t d = xi.size();

  if (const auto* k = std::get_if<ScalarFatTailKernel>(&spec)) {
    const double phi = scalar_weight(*k, xi, xj);
    for (std::size_t a = 0; a < d; ++a) out[a] = phi * w[a];
    return;
  }
  if (const auto* k = std::get_if<ConstantKernel>(&spec)) {
    for (std::size_t a = 0; a < d; ++a) out[a] = k->phi * w[a];
    return;
  }

  const auto& k = std::get<HessianKernel>(spec);
  separation(k, xi, vi, xj, vj, tau, scratch);
  const double r = norm(scratch.first(d));
  const PotentialEval e = eval_potential(k.potential, r);
  if (r == 0.0) {
    for (std::size_t a = 0; a < d; ++a) out[a] = e.ddu * w[a];
    return;
  }
  double proj = 0.0;
  for (std::size_t a = 0; a < d; ++a) proj += (scratch[a] / r) * w[a];
  const double radial = (e.ddu - e.du_over_r) * proj;
  for (std::size_t a = 0; a < d; ++a)
    out[a] = e.du_over_r * w[a] + radial * (scratch[a] / r);
}

std::vector<double> apply_kernel(const Kernel& spec, std::span<const double> xi,
                                 std::span<const double> vi, std::span<const double> xj,
                                 std::span<const double> vj, double tau,
                                 std::span<const double> w) {
  check_inputs(xi, vi, xj, vj, tau);
  std::vector<double> out(xi.size()), scratch(xi.size());
  apply_kernel(spec, xi, vi, xj, vj, tau, w, out, scratch);
  return out;
}

double kernel_gamma(const Kernel& spec) {
  if (const auto* k = std::get_if<ScalarFatTailKernel>(&spec)) return k->gamma;
  if (std::holds_alternative<ConstantKernel>(spec)) return 0.0;
  return potential_beta(std::get<HessianKernel>(spec).potential);
}

double kernel_upper_bound(const Kernel& spec, double r_probe) {
  if (const auto* k = std::get_if<ScalarFatTailKernel>(&spec)) return k->phi_minus;
  if (const auto* k = std::get_if<ConstantKernel>(&spec)) return k->phi;
  return classify_potential(std::get<HessianKernel>(spec).potential, r_probe, 1001)
      .bounded.value;
}

}  // namespace antic
