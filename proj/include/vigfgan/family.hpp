#pragma once

#include <functional>
#include <vector>

#include "vigfgan/chi.hpp"

namespace vig {

// Uniform Lebesgue grid on [a, b] with n intervals (n + 1 nodes, n even for Simpson).
struct Domain1D {
  double a;
  double b;
  int n = 4096;

  Domain1D(double a_, double b_, int n_ = 4096);
  double dx() const { return (b - a) / n; }
  double x(int i) const { return i == n ? b : a + i * dx(); }
  int size() const { return n + 1; }
};

// Values of a function on the nodes of a Domain1D.
struct GridFn {
  Domain1D dom;
  std::vector<double> v;

  explicit GridFn(Domain1D d) : dom(d), v(d.size(), 0.0) {}
  GridFn(Domain1D d, std::vector<double> vals);
  static GridFn sample(const Domain1D& d, const std::function<double(double)>& f);

  double operator[](int i) const { return v[i]; }
  double& operator[](int i) { return v[i]; }
  int size() const { return static_cast<int>(v.size()); }
  // Composite Simpson.
  double integrate() const;
  // Linear interpolation between nodes.
  double at(double x) const;
};

// Composite Simpson of f sampled on the nodes of d.
double integrate(const Domain1D& d, const std::function<double(double, int)>& f);

GridFn map(const GridFn& g, const std::function<double(double)>& f);
GridFn pointwise(const GridFn& g, const GridFn& h, const std::function<double(double, double)>& f);

using Phi = std::function<std::vector<double>(double)>;

double dot(const std::vector<double>& a, const std::vector<double>& b);

// exp_chi(phi(x)^T theta - C) with C solved for normalization.
struct DeformedDensity {
  Signature sig;
  Phi phi;
  std::vector<double> theta;
  double C;
  Domain1D dom;

  double operator()(double x) const;
  GridFn grid() const;
};

double solve_cumulant(const Signature& sig, const Phi& phi, const std::vector<double>& theta,
                      const Domain1D& dom);
DeformedDensity make_deformed(const Signature& sig, const Phi& phi, const std::vector<double>& theta,
                              const Domain1D& dom);
// Throws DomainError outside [a, b]; zero below the image of log_chi.
double density_at(const DeformedDensity& d, double x);

struct Escort {
  GridFn base;
  Signature sig;
  double Z;
  GridFn density;
};

Escort escort_of(const GridFn& base, const Signature& sig);

// Test densities.
GridFn gaussian_density(const Domain1D& d, double mean, double sd);
GridFn uniform_density(const Domain1D& d, double lo, double hi);
// A / sigma * [1 - x^2 / sigma^2]_+^2
GridFn half_gaussian_density(const Domain1D& d, double sigma, double A);
// Two adjacent squares: height eps on [0, eps), sqrt(1 - eps^2) on [eps, eps + sqrt(1 - eps^2)].
GridFn two_square_density(double eps, int n = 8192);

Phi phi_linear();     // x
Phi phi_quadratic();  // (x, x^2)

}  // namespace vig
