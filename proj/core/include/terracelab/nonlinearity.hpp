#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "terracelab/common.hpp"

namespace terracelab {

// Reaction term f(t,u) for u_t = u_xx + f(t,u).  All members of the catalog
// satisfy f(t,0) = 0 and f(t+T,u) = f(t,u).
enum class Family {
  kpp,                    // u(1-u)
  bistable_cubic,         // u(1-u)(u-a)
  multistable_quintic,    // kappa*u(u-theta1)(u-q)(u-theta2)(1-u)
  combustion,             // 0 on [0,theta], (u-theta)(p-u) on (theta,p]
  time_periodic_product,  // (1 + rho*sin(2*pi*t/T)) * fbar(u)
  custom_polynomial,      // sum c_{jk} u^j phi_k(t), phi in {1,sin,cos}
};

enum class DuMode { analytic, finite_difference };

const char* family_name(Family f);
Family family_from_name(const std::string& name);

class NonlinearitySpec {
 public:
  // Catalog constructors.
  static NonlinearitySpec kpp(double period = 1.0);
  static NonlinearitySpec bistable(double a, double period = 1.0);
  static NonlinearitySpec quintic(double kappa, double theta1, double q,
                                  double theta2, double period = 1.0);
  static NonlinearitySpec combustion(double theta, double p,
                                     double period = 1.0);
  // b(t) * fbar(u) with b(t) = 1 + rho*sin(2*pi*t/T); the inner family must be
  // autonomous (any catalog family except time_periodic_product/custom).
  static NonlinearitySpec time_periodic(const NonlinearitySpec& inner,
                                        double rho, double period);
  // Terms (j,k,c): f(t,u) = sum c * u^j * phi_k(t/T), j >= 1, k in {0,1,2}.
  struct Term {
    int upow = 1;
    int tmode = 0;  // 0: constant, 1: sin(2*pi*t/T), 2: cos(2*pi*t/T)
    double coeff = 0.0;
  };
  static NonlinearitySpec custom(const std::vector<Term>& terms,
                                 double period);

  static NonlinearitySpec from_params(Family family,
                                      const std::map<std::string, double>& params,
                                      double period);

  Family family() const { return family_; }
  double period() const { return period_; }
  const std::map<std::string, double>& params() const { return params_; }
  bool autonomous() const;

  void set_du_mode(DuMode mode, double h_u = 1e-6);
  DuMode du_mode() const { return du_mode_; }

  /// f(t,u).  Throws std::domain_error on non-finite u.
  double eval(double t, double u) const;
  /// d/du f(t,u), analytic unless finite-difference mode was requested.
  double eval_du(double t, double u) const;
  /// F(u) = int_0^u f(s) ds for autonomous specs; throws otherwise.
  double potential(double u) const;

  /// max |f| over (t,u) in [0,T] x [lo,hi], sampled.
  double sup_abs(double lo, double hi, int n = 201) const;
  /// max |df/du| over the same sampled box.
  double sup_abs_du(double lo, double hi, int n = 201) const;
  /// Sampled Lipschitz constant of df/du in u over [0,T] x [lo,hi],
  /// multiplied by a safety factor.
  double lipschitz_du(double lo, double hi, int n = 200,
                      double safety = 1.5) const;

  std::string to_json() const;
  static NonlinearitySpec from_json(const std::string& text);

  // Default-constructs the kpp member of the catalog.
  NonlinearitySpec() = default;

 private:
  double eval_autonomous(double u) const;       // fbar(u) for product family
  double eval_autonomous_du(double u) const;

  Family family_ = Family::kpp;
  double period_ = 1.0;
  std::map<std::string, double> params_;
  DuMode du_mode_ = DuMode::analytic;
  double h_u_ = 1e-6;

  // Flattened coefficients for the fast paths.
  std::array<double, 8> poly_{0.0, 1.0, -1.0};   // poly_[j] * u^j
  std::array<double, 8> dpoly_{1.0, -2.0};       // derivative coefficients
  int degree_ = 2;
  Family inner_family_ = Family::kpp;  // for time_periodic_product
  std::vector<Term> terms_;            // for custom_polynomial
};

}  // namespace terracelab
