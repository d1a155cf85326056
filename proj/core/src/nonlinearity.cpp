#include "terracelab/nonlinearity.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace terracelab {

using json = nlohmann::json;

const char* family_name(Family f) {
  switch (f) {
    case Family::kpp: return "kpp";
    case Family::bistable_cubic: return "bistable-cubic";
    case Family::multistable_quintic: return "multistable-quintic";
    case Family::combustion: return "combustion";
    case Family::time_periodic_product: return "time-periodic-product";
    case Family::custom_polynomial: return "custom-polynomial";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "kpp") return Family::kpp;
  if (name == "bistable-cubic") return Family::bistable_cubic;
  if (name == "multistable-quintic") return Family::multistable_quintic;
  if (name == "combustion") return Family::combustion;
  if (name == "time-periodic-product") return Family::time_periodic_product;
  if (name == "custom-polynomial") return Family::custom_polynomial;
  throw std::invalid_argument("unknown nonlinearity family: " + name);
}

namespace {

// Multiply the polynomial by (u - root) in place.
void mul_root(std::array<double, 8>& c, int& deg, double root) {
  for (int j = deg + 1; j > 0; --j) c[j] = c[j - 1] - root * c[j];
  c[0] *= -root;
  ++deg;
}

void differentiate(const std::array<double, 8>& c, int deg,
                   std::array<double, 8>& d) {
  d.fill(0.0);
  for (int j = 1; j <= deg; ++j) d[j - 1] = j * c[j];
}

double horner(const std::array<double, 8>& c, int deg, double u) {
  double v = c[deg];
  for (int j = deg - 1; j >= 0; --j) v = v * u + c[j];
  return v;
}

}  // namespace

NonlinearitySpec NonlinearitySpec::kpp(double period) {
  require(period > 0, "period_T must be positive");
  NonlinearitySpec s;
  s.family_ = Family::kpp;
  s.period_ = period;
  s.poly_ = {0.0, 1.0, -1.0};
  s.degree_ = 2;
  differentiate(s.poly_, s.degree_, s.dpoly_);
  return s;
}

NonlinearitySpec NonlinearitySpec::bistable(double a, double period) {
  require(period > 0, "period_T must be positive");
  require(a > 0 && a < 1, "bistable threshold a must lie in (0,1)");
  NonlinearitySpec s;
  s.family_ = Family::bistable_cubic;
  s.period_ = period;
  s.params_["a"] = a;
  // u(1-u)(u-a) = -u^3 + (1+a)u^2 - a u
  s.poly_ = {0.0, -a, 1.0 + a, -1.0};
  s.degree_ = 3;
  differentiate(s.poly_, s.degree_, s.dpoly_);
  return s;
}

NonlinearitySpec NonlinearitySpec::quintic(double kappa, double theta1,
                                           double q, double theta2,
                                           double period) {
  require(period > 0, "period_T must be positive");
  require(kappa > 0, "quintic kappa must be positive");
  require(0 < theta1 && theta1 < q && q < theta2 && theta2 < 1,
          "quintic roots must satisfy 0 < theta1 < q < theta2 < 1");
  NonlinearitySpec s;
  s.family_ = Family::multistable_quintic;
  s.period_ = period;
  s.params_ = {{"kappa", kappa}, {"theta1", theta1}, {"q", q},
               {"theta2", theta2}};
  // kappa * u (u-theta1)(u-q)(u-theta2)(1-u); build as -(u-0)(u-t1)(u-q)(u-t2)(u-1)
  s.poly_.fill(0.0);
  s.poly_[0] = 1.0;
  s.degree_ = 0;
  for (double r : {0.0, theta1, q, theta2, 1.0}) mul_root(s.poly_, s.degree_, r);
  for (auto& c : s.poly_) c *= -kappa;
  differentiate(s.poly_, s.degree_, s.dpoly_);
  return s;
}

NonlinearitySpec NonlinearitySpec::combustion(double theta, double p,
                                              double period) {
  require(period > 0, "period_T must be positive");
  require(0 < theta && theta < p, "combustion needs 0 < theta < p");
  NonlinearitySpec s;
  s.family_ = Family::combustion;
  s.period_ = period;
  s.params_ = {{"theta", theta}, {"p", p}};
  return s;
}

NonlinearitySpec NonlinearitySpec::time_periodic(const NonlinearitySpec& inner,
                                                 double rho, double period) {
  require(period > 0, "period_T must be positive");
  require(inner.autonomous(), "inner family of the product must be autonomous");
  require(std::abs(rho) < 1.0, "|rho| must be < 1 to keep b(t) positive");
  NonlinearitySpec s = inner;
  s.family_ = Family::time_periodic_product;
  s.inner_family_ = inner.family_;
  s.period_ = period;
  s.params_["rho"] = rho;
  return s;
}

NonlinearitySpec NonlinearitySpec::custom(const std::vector<Term>& terms,
                                          double period) {
  require(period > 0, "period_T must be positive");
  NonlinearitySpec s;
  s.family_ = Family::custom_polynomial;
  s.period_ = period;
  for (const Term& t : terms) {
    require(t.upow >= 1, "custom term needs u power >= 1 so that f(t,0)=0");
    require(t.upow < 8, "custom term u power too large");
    require(t.tmode >= 0 && t.tmode <= 2, "custom term tmode must be 0,1,2");
    s.params_["c_" + std::to_string(t.upow) + "_" + std::to_string(t.tmode)] =
        t.coeff;
  }
  s.terms_ = terms;
  return s;
}

NonlinearitySpec NonlinearitySpec::from_params(
    Family family, const std::map<std::string, double>& params, double period) {
  auto get = [&](const char* key) {
    auto it = params.find(key);
    require(it != params.end(),
            std::string("missing parameter '") + key + "' for family " +
                family_name(family));
    return it->second;
  };
  switch (family) {
    case Family::kpp: return kpp(period);
    case Family::bistable_cubic: return bistable(get("a"), period);
    case Family::multistable_quintic:
      return quintic(get("kappa"), get("theta1"), get("q"), get("theta2"),
                     period);
    case Family::combustion: return combustion(get("theta"), get("p"), period);
    case Family::time_periodic_product:
      throw std::invalid_argument(
          "time-periodic-product requires an inner family; use "
          "time_periodic() or JSON with inner_family");
    case Family::custom_polynomial: {
      std::vector<Term> terms;
      for (const auto& [key, value] : params) {
        if (key.rfind("c_", 0) != 0)
          throw std::invalid_argument("unknown custom-polynomial key: " + key);
        int j = 0, k = 0;
        if (std::sscanf(key.c_str(), "c_%d_%d", &j, &k) != 2)
          throw std::invalid_argument("bad custom-polynomial key: " + key);
        terms.push_back({j, k, value});
      }
      return custom(terms, period);
    }
  }
  throw std::invalid_argument("bad family");
}

bool NonlinearitySpec::autonomous() const {
  if (family_ == Family::time_periodic_product) return false;
  if (family_ == Family::custom_polynomial) {
    for (const Term& t : terms_)
      if (t.tmode != 0 && t.coeff != 0.0) return false;
  }
  return true;
}

void NonlinearitySpec::set_du_mode(DuMode mode, double h_u) {
  require(h_u > 0, "finite-difference step must be positive");
  du_mode_ = mode;
  h_u_ = h_u;
}

double NonlinearitySpec::eval_autonomous(double u) const {
  switch (family_ == Family::time_periodic_product ? inner_family_ : family_) {
    case Family::kpp:
    case Family::bistable_cubic:
    case Family::multistable_quintic:
      return horner(poly_, degree_, u);
    case Family::combustion: {
      const double theta = params_.at("theta");
      const double p = params_.at("p");
      return u <= theta ? 0.0 : (u - theta) * (p - u);
    }
    default:
      throw std::logic_error("eval_autonomous on non-autonomous family");
  }
}

double NonlinearitySpec::eval_autonomous_du(double u) const {
  switch (family_ == Family::time_periodic_product ? inner_family_ : family_) {
    case Family::kpp:
    case Family::bistable_cubic:
    case Family::multistable_quintic:
      return horner(dpoly_, degree_ - 1, u);
    case Family::combustion: {
      const double theta = params_.at("theta");
      const double p = params_.at("p");
      return u <= theta ? 0.0 : (p + theta - 2.0 * u);
    }
    default:
      throw std::logic_error("eval_autonomous_du on non-autonomous family");
  }
}

double NonlinearitySpec::eval(double t, double u) const {
  if (!std::isfinite(u)) throw std::domain_error("eval: u is not finite");
  switch (family_) {
    case Family::kpp:
    case Family::bistable_cubic:
    case Family::multistable_quintic:
    case Family::combustion:
      return eval_autonomous(u);
    case Family::time_periodic_product: {
      const double b = 1.0 + params_.at("rho") * std::sin(2.0 * kPi * t / period_);
      return b * eval_autonomous(u);
    }
    case Family::custom_polynomial: {
      const double w = 2.0 * kPi * t / period_;
      double acc = 0.0;
      for (const Term& term : terms_) {
        double phi = term.tmode == 0 ? 1.0
                     : term.tmode == 1 ? std::sin(w)
                                       : std::cos(w);
        acc += term.coeff * phi * std::pow(u, term.upow);
      }
      return acc;
    }
  }
  return 0.0;
}

double NonlinearitySpec::eval_du(double t, double u) const {
  if (!std::isfinite(u)) throw std::domain_error("eval_du: u is not finite");
  if (du_mode_ == DuMode::finite_difference)
    return (eval(t, u + h_u_) - eval(t, u - h_u_)) / (2.0 * h_u_);
  switch (family_) {
    case Family::kpp:
    case Family::bistable_cubic:
    case Family::multistable_quintic:
    case Family::combustion:
      return eval_autonomous_du(u);
    case Family::time_periodic_product: {
      const double b = 1.0 + params_.at("rho") * std::sin(2.0 * kPi * t / period_);
      return b * eval_autonomous_du(u);
    }
    case Family::custom_polynomial: {
      const double w = 2.0 * kPi * t / period_;
      double acc = 0.0;
      for (const Term& term : terms_) {
        double phi = term.tmode == 0 ? 1.0
                     : term.tmode == 1 ? std::sin(w)
                                       : std::cos(w);
        acc += term.coeff * phi * term.upow * std::pow(u, term.upow - 1);
      }
      return acc;
    }
  }
  return 0.0;
}

double NonlinearitySpec::potential(double u) const {
  if (!autonomous())
    throw std::invalid_argument("potential requires an autonomous spec");
  switch (family_) {
    case Family::kpp:
    case Family::bistable_cubic:
    case Family::multistable_quintic: {
      double acc = 0.0;  // antiderivative of the stored polynomial
      for (int j = degree_; j >= 0; --j) acc = acc * u + poly_[j] / (j + 1);
      return acc * u;
    }
    case Family::combustion: {
      const double theta = params_.at("theta");
      const double p = params_.at("p");
      if (u <= theta) return 0.0;
      auto anti = [&](double s) {
        // int (s-theta)(p-s) ds
        return -s * s * s / 3.0 + (p + theta) * s * s / 2.0 - theta * p * s;
      };
      return anti(u) - anti(theta);
    }
    case Family::custom_polynomial: {
      double acc = 0.0;
      for (const Term& term : terms_)
        if (term.tmode == 0)
          acc += term.coeff * std::pow(u, term.upow + 1) / (term.upow + 1);
      return acc;
    }
    default:
      throw std::invalid_argument("potential: unsupported family");
  }
}

double NonlinearitySpec::sup_abs(double lo, double hi, int n) const {
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = period_ * i / (n - 1.0);
    for (int j = 0; j < n; ++j) {
      const double u = lo + (hi - lo) * j / (n - 1.0);
      m = std::max(m, std::abs(eval(t, u)));
    }
  }
  return m;
}

double NonlinearitySpec::sup_abs_du(double lo, double hi, int n) const {
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = period_ * i / (n - 1.0);
    for (int j = 0; j < n; ++j) {
      const double u = lo + (hi - lo) * j / (n - 1.0);
      m = std::max(m, std::abs(eval_du(t, u)));
    }
  }
  return m;
}

double NonlinearitySpec::lipschitz_du(double lo, double hi, int n,
                                      double safety) const {
  const double du = (hi - lo) / (n - 1.0);
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = period_ * i / (n - 1.0);
    double prev = eval_du(t, lo);
    for (int j = 1; j < n; ++j) {
      const double u = lo + du * j;
      const double cur = eval_du(t, u);
      m = std::max(m, std::abs(cur - prev) / du);
      prev = cur;
    }
  }
  return safety * m;
}

std::string NonlinearitySpec::to_json() const {
  json j;
  j["family"] = family_name(family_);
  j["params"] = params_;
  j["period_T"] = period_;
  if (family_ == Family::time_periodic_product)
    j["inner_family"] = family_name(inner_family_);
  if (du_mode_ == DuMode::finite_difference) {
    j["du_mode"] = "finite-difference";
    j["du_step"] = h_u_;
  }
  return j.dump();
}

NonlinearitySpec NonlinearitySpec::from_json(const std::string& text) {
  json j = json::parse(text);
  const Family fam = family_from_name(j.at("family").get<std::string>());
  std::map<std::string, double> params;
  if (j.contains("params"))
    params = j.at("params").get<std::map<std::string, double>>();
  const double period = j.at("period_T").get<double>();
  NonlinearitySpec s = [&] {
    if (fam == Family::time_periodic_product) {
      const Family inner_fam =
          family_from_name(j.at("inner_family").get<std::string>());
      auto inner_params = params;
      inner_params.erase("rho");
      return time_periodic(from_params(inner_fam, inner_params, period),
                           params.at("rho"), period);
    }
    return from_params(fam, params, period);
  }();
  if (j.contains("du_mode") && j.at("du_mode") == "finite-difference")
    s.set_du_mode(DuMode::finite_difference,
                  j.value("du_step", 1e-6));
  return s;
}

}  // namespace terracelab
