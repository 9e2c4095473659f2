#pragma once

#include <string>
#include <utility>
#include <vector>

#include "charflow/errors.hpp"
#include "charflow/polynomial.hpp"

namespace charflow {

/// One member of the equation family
///   u_t - u_txx + f(u)_x - f(u)_xxx + (g(u) + f''(u) u_x^2 / 2)_x = 0
/// with polynomial f and g. All derivatives and antiderivatives are exact
/// polynomials built once at construction; the object is immutable.
class FluxModel {
 public:
  FluxModel(std::string name, Polynomial f, Polynomial g) : name_(std::move(name)), f_(std::move(f)), g_(std::move(g)) {
    if (g_.constant_term() != 0.0) throw ModelError("flux model '" + name_ + "' requires g(0) = 0");
    f1_ = f_.derivative();
    f2_ = f1_.derivative();
    f3_ = f2_.derivative();
    g1_ = g_.derivative();
    F_ = f_.antiderivative();
    G_ = g_.antiderivative();
    // H(u) = int_0^u (2 g(s) + f''(s) s^2) ds
    H_ = (2.0 * g_ + f2_ * Polynomial({0.0, 0.0, 1.0})).antiderivative();
  }

  const std::string& name() const { return name_; }

  double f(double u) const { return f_(u); }
  double f1(double u) const { return f1_(u); }
  double f2(double u) const { return f2_(u); }
  double f3(double u) const { return f3_(u); }
  double g(double u) const { return g_(u); }
  double g1(double u) const { return g1_(u); }
  double F(double u) const { return F_(u); }
  double G(double u) const { return G_(u); }
  double H(double u) const { return H_(u); }

  const Polynomial& f_poly() const { return f_; }
  const Polynomial& g_poly() const { return g_; }

 private:
  std::string name_;
  Polynomial f_, f1_, f2_, f3_, g_, g1_, F_, G_, H_;
};

enum class ModelKind { camassa_holm, rod, generalized_rod };

struct ModelSpec {
  ModelKind kind = ModelKind::camassa_holm;
  double k = 1.0;
  std::vector<double> g_coeffs;  // generalized_rod only, monomial basis
};

/// f = u^2/2, g = u^2.
inline FluxModel camassa_holm() { return FluxModel("camassa_holm", Polynomial({0.0, 0.0, 0.5}), Polynomial({0.0, 0.0, 1.0})); }

/// Hyper-elastic rod: f = k u^2/2, g = (3-k) u^2/2. rod(1) coincides with camassa_holm().
inline FluxModel rod(double k) {
  return FluxModel("rod", Polynomial({0.0, 0.0, k / 2.0}), Polynomial({0.0, 0.0, (3.0 - k) / 2.0}));
}

/// Generalized rod: f = k u^2/2 and an arbitrary polynomial g with g(0) = 0.
inline FluxModel generalized_rod(double k, std::vector<double> g_coeffs) {
  if (!g_coeffs.empty() && g_coeffs.front() != 0.0)
    throw ModelError("generalized_rod: g polynomial must have zero constant coefficient");
  return FluxModel("generalized_rod", Polynomial({0.0, 0.0, k / 2.0}), Polynomial(std::move(g_coeffs)));
}

inline FluxModel builtin_model(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::camassa_holm:
      return camassa_holm();
    case ModelKind::rod:
      return rod(spec.k);
    case ModelKind::generalized_rod:
      return generalized_rod(spec.k, spec.g_coeffs);
  }
  throw ModelError("unknown model kind");
}

}  // namespace charflow
