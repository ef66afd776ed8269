#pragma once

#include <functional>
#include <string>

#include "vigfgan/chi.hpp"
#include "vigfgan/divergence.hpp"
#include "vigfgan/family.hpp"

namespace vig {

enum class LinkKind { Canonical, Sigmoid, Matsushita, VigLink, IdentityLink };

// Invertible link Psi: (0,1) -> R.
struct LinkFunction {
  LinkKind kind;
  std::string name;
  std::function<double(double)> eval;     // (0,1) -> R
  std::function<double(double)> inverse;  // R -> (0,1), RangeError outside the image

  double operator()(double z) const { return eval(z); }
};

namespace links {
// Psi(z) = f'(z / (1 - z))
LinkFunction canonical(const DivergenceSpec& f);
// Psi(z) = log(z / (1 - z)); its inverse is the logistic sigmoid.
LinkFunction sigmoid();
// Psi = inverse of the printed Matsushita map v -> (1 + v / sqrt(1 + v^2)) / 2.
LinkFunction matsushita();
// Psi(z) = -1 / chi_q(z / (1 - z))
LinkFunction vig(const Signature& sig, double q);
// Psi(z) = z; the inverse only accepts values in (0,1).
LinkFunction identity();
LinkFunction by_name(const std::string& name);
}  // namespace links

// Printed real-argument Matsushita map (1/2)(1 + v / sqrt(1 + v^2)).
double matsushita_link(double v);

struct ProperLoss {
  DivergenceSpec f;
  LinkFunction link;
  std::function<double(double)> loss_pos;  // l(+1, z)
  std::function<double(double)> loss_neg;  // l(-1, z)

  double partial_risk(double eta, double z) const { return eta * loss_pos(z) + (1.0 - eta) * loss_neg(z); }
};

// l(+1, z) = -f'(r), l(-1, z) = f*(f'(r)) with r = Psi^{-1}(z) / (1 - Psi^{-1}(z)).
// NonInvertibleLink if the link is not strictly monotone on a grid of (0,1).
ProperLoss build_loss(const DivergenceSpec& f, const LinkFunction& link);

// l(+1, z) = -z, l(-1, z) = -log_{(chi*)_{1/q}}(-z), vig link.
ProperLoss vig_loss(const Signature& sig, double q);

// f' clamped to its limits at 0 and inf; RangeError once |f'| exceeds 1e12.
double clamped_derivative(const DivergenceSpec& f, double r);

// r = Psi^{-1}(T) / (1 - Psi^{-1}(T))
double density_ratio_recover(const LinkFunction& link, double t_star);

// E over D with equal class priors: (1/2) E_P[l(+1, T)] + (1/2) E_Q[l(-1, T)].
double expected_loss(const ProperLoss& loss, const GridFn& P, const GridFn& Q, const GridFn& T);
// inf_T of expected_loss by pointwise golden-section search over Psi^{-1}(T) in (0,1).
double min_expected_loss(const ProperLoss& loss, const GridFn& P, const GridFn& Q);
// Psi((1 + Q/P)^{-1}) pointwise.
GridFn bayes_discriminator(const LinkFunction& link, const GridFn& P, const GridFn& Q);

}  // namespace vig
