#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "magpdo/weights.hpp"

// Phase-space symbols with derivative access, weighted seminorm sampling,
// and membership diagnostics against a declared dominating weight.

namespace magpdo::sym {

using cd = std::complex<double>;

// Derivative multi-index packed as (x1, x2, xi1, xi2); slots beyond the
// dimension stay zero. d=1 uses slots 0 and 2.
using MultiIndex = std::array<int, 4>;

// coef * x^xexp * xi^xiexp
struct PolyTerm {
  cd coef{1.0, 0.0};
  std::array<int, 2> xexp{0, 0};
  std::array<int, 2> xiexp{0, 0};
};

struct Symbol {
  int d = 1;
  std::string label;
  std::function<cd(const double*, const double*)> eval;
  // closed-form derivatives where available; nullopt defers to differences
  std::function<std::optional<cd>(const MultiIndex&, const double*, const double*)> deriv;
  wts::TemperedWeight weight;
  std::vector<PolyTerm> poly;  // nonempty iff polynomial in (x, xi)
  bool x_independent = false;

  cd at(const double* x, const double* xi) const { return eval(x, xi); }
};

// d/dgamma of f at (x, xi). Closed forms are used when the symbol offers
// them; remaining orders are peeled off by central differences with step
// fd_scale * (1 + |coordinate|) on the differentiated axis.
cd derivative(const Symbol& f, const MultiIndex& gamma, const double* x, const double* xi,
              double fd_scale = 1e-4);

// All multi-indices with |gamma| <= n on the 2d active axes, by total order
// then lexicographically.
std::vector<MultiIndex> multi_indices(int d, int n);

// Sum over |gamma| <= n of the sampled sup of M^{-1} |d^gamma f| over the
// cube [-half_extent, half_extent]^{2d}. density points per axis (rounded up
// to odd so the origin and both endpoints are sampled).
double seminorm(const Symbol& f, int n, double half_extent, int density);

struct MembershipReport {
  std::vector<double> extents;
  // seminorms[order][region]; sampling spacing is held fixed across regions
  std::vector<std::vector<double>> seminorms;
  bool stable = false;
};

// Seminorms per order over a growing region sequence; stable iff each order
// moves by < 5% between the two largest regions.
MembershipReport membership_report(const Symbol& f, int n_max,
                                   const std::vector<double>& extents = {5.0, 10.0, 20.0},
                                   int base_density = 21);

Symbol one_symbol(int d);
Symbol xi_coordinate(int d, int j);        // xi_j
Symbol x_coordinate(int d, int j);         // x_j
Symbol xi_bracket_power(int d, double s);  // <xi>^s
Symbol gaussian_bump(int d);               // exp(-(|x|^2 + |xi|^2) / 2)
Symbol sin_xi_decay(int d);                // sin(x1) <xi>^{-2}
Symbol kinetic(int d);                     // <xi>^2
Symbol x1_xi1(int d);                      // x1 xi1

}  // namespace magpdo::sym
