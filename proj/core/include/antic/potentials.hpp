#pragma once

#include <variant>
#include <vector>

namespace antic {

/// Values of a radial potential at one radius. du_over_r is U'(r)/r computed
/// from the analytic form of each family, never by dividing du by r, so it
/// stays finite at r = 0 where it equals ddu(0).
struct PotentialEval {
  double u = 0.0;         ///< U(r)
  double du = 0.0;        ///< U'(r)
  double ddu = 0.0;       ///< U''(r)
  double du_over_r = 0.0; ///< U'(r)/r
};

/// U'(r) = a * r * <r>^(-beta). Realizes the fat-tail lower bound with
/// equality, so decay-rate predictions are sharp for this family.
struct PowerLawPotential {
  double a = 1.0;
  double beta = 0.0;  // in [0, 1)
};

/// U(r) = a r^2 / 2; the beta = 0 specialization of the power law.
struct QuadraticPotential {
  double a = 1.0;
};

/// Quartic double well U(r) = k/4 (r^2 - r0^2)^2, normalized so U(r0) = 0.
/// Local minimum at r0 with U''(r0) = 2 k r0^2.
struct RepulsiveAttractivePotential {
  double k = 1.0;
  double r0 = 1.0;
};

/// U' sampled at sorted knots and interpolated with a monotone cubic
/// (Fritsch-Carlson). U'' is the interpolant derivative, U its integral.
/// Knots must start at r = 0 with U'(0) = 0; queries beyond the last knot
/// raise ExtrapolationError.
class TabulatedPotential {
 public:
  TabulatedPotential(std::vector<double> knots, std::vector<double> du_values);

  PotentialEval eval(double r) const;
  double r_max() const { return knots_.back(); }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& du_values() const { return du_; }

 private:
  std::vector<double> knots_;
  std::vector<double> du_;
  std::vector<double> deriv_;   // interpolant slopes at knots
  std::vector<double> u_knots_; // cumulative integral of U' at knots
};

using Potential =
    std::variant<PowerLawPotential, QuadraticPotential, RepulsiveAttractivePotential,
                 TabulatedPotential>;

/// Evaluate U, U', U'', U'/r at radius r >= 0.
PotentialEval eval_potential(const Potential& spec, double r);

struct ClassCertificate {
  bool pass = false;
  double value = 0.0;     // A (bounded), a (convex/attractive) or L (confining)
  double witness_r = 0.0; // extremal radius; on failure the largest violating r
};

/// Result of sampling a potential on [0, r_max] and fitting the best
/// constants for each assumption class.
struct ClassReport {
  double r_max = 0.0;
  int n_samples = 0;
  double beta_used = 0.0;
  ClassCertificate bounded;     // A = max |U''|
  ClassCertificate convex;      // largest a with a<r>^-beta <= U''
  ClassCertificate attractive;  // largest a with a<r>^-beta <= U'(r)/r
  ClassCertificate confining;   // smallest L with U >= a_conf (<r>^(2-beta) - L)
  double confining_a = 0.0;     // the a used by the confining certificate
};

/// Sample the potential and certify which assumption classes it satisfies.
ClassReport classify_potential(const Potential& spec, double r_max, int n_samples);

/// Tail exponent used in class checks: beta for the power law, 0 otherwise.
double potential_beta(const Potential& spec);

/// Strength parameter of the family (a, a, k); for tabulated specs the
/// fitted attractive constant, falling back to the Hessian bound.
double potential_strength(const Potential& spec);

}  // namespace antic
