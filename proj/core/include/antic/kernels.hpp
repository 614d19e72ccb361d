#pragma once

#include <span>
#include <variant>

#include "antic/numeric.hpp"
#include "antic/potentials.hpp"

namespace antic {

/// Phi_ij = phi_minus * <|x_i - x_j|>^(-gamma) * Identity.
struct ScalarFatTailKernel {
  double phi_minus = 1.0;
  double gamma = 0.0;  // in [0, 1)
};

/// Phi_ij = phi * Identity.
struct ConstantKernel {
  double phi = 1.0;
};

enum class KernelEvalPoint { current, anticipated };

/// Phi_ij = D^2 U evaluated at |x_i - x_j| (current) or |x_i^tau - x_j^tau|
/// (anticipated): (U'(r)/r)(I - xhat xhat^T) + U''(r) xhat xhat^T, which
/// degenerates to U''(0) * Identity at r = 0.
struct HessianKernel {
  Potential potential;
  KernelEvalPoint eval_point = KernelEvalPoint::current;
};

using Kernel = std::variant<ScalarFatTailKernel, ConstantKernel, HessianKernel>;

/// Evaluate the symmetric d x d communication matrix for one agent pair.
/// tau is used only by HessianKernel with the anticipated evaluation point.
Matrix eval_kernel(const Kernel& spec, std::span<const double> xi, std::span<const double> vi,
                   std::span<const double> xj, std::span<const double> vj, double tau);

/// out = Phi_ij * w without forming the matrix. scratch must hold d doubles.
void apply_kernel(const Kernel& spec, std::span<const double> xi, std::span<const double> vi,
                  std::span<const double> xj, std::span<const double> vj, double tau,
                  std::span<const double> w, std::span<double> out, std::span<double> scratch);

/// Allocating convenience overload of apply_kernel.
std::vector<double> apply_kernel(const Kernel& spec, std::span<const double> xi,
                                 std::span<const double> vi, std::span<const double> xj,
                                 std::span<const double> vj, double tau,
                                 std::span<const double> w);

/// Fat-tail exponent gamma of the kernel (hessian kernels inherit the
/// potential's beta).
double kernel_gamma(const Kernel& spec);

/// Upper bound phi_plus of the kernel on [0, r_probe] (sampled for hessian
/// kernels, exact for scalar ones).
double kernel_upper_bound(const Kernel& spec, double r_probe = 100.0);

}  // namespace antic
