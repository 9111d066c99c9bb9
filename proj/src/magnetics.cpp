#include "magpdo/magnetics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "magpdo/numerics.hpp"

namespace magpdo::mag {

MagneticField zero_field(int d) {
  MagneticField f;
  f.d = d;
  f.label = "zero";
  return f;
}

MagneticField constant_field_2d(double b) {
  MagneticField f;
  f.d = 2;
  f.label = "constant2d";
  if (b != 0.0) f.b12 = [b](const double*) { return b; };
  return f;
}

MagneticField tanh_field_2d(double b) {
  MagneticField f;
  f.d = 2;
  f.label = "tanh2d";
  f.b12 = [b](const double* x) { return 0.5 * b * (1.0 + std::tanh(x[0])); };
  return f;
}

void VectorPotential::at(const double* x, double* a) const {
  if (!eval) {
    for (int i = 0; i < d; ++i) a[i] = 0.0;
    return;
  }
  eval(x, a);
}

VectorPotential zero_potential(int d) {
  VectorPotential a;
  a.d = d;
  a.label = "zero";
  return a;
}

VectorPotential transversal_potential(const MagneticField& B, int s_order) {
  VectorPotential a;
  a.d = B.d;
  a.label = "transversal(" + B.label + ")";
  if (B.is_zero() || B.d == 1) return a;
  auto b12 = B.b12;
  a.eval = [b12, s_order](const double* x, double* out) {
    std::vector<double> nd, wt;
    num::gauss_legendre(s_order, nd, wt);
    // I = int_0^1 s B_12(s x) ds
    double acc = 0.0;
    double p[2];
    for (std::size_t i = 0; i < nd.size(); ++i) {
      double s = 0.5 + 0.5 * nd[i];
      p[0] = s * x[0];
      p[1] = s * x[1];
      acc += 0.5 * wt[i] * s * b12(p);
    }
    out[0] = -x[1] * acc;
    out[1] = x[0] * acc;
  };
  return a;
}

VectorPotential tanh_potential_1d(double b) {
  VectorPotential a;
  a.d = 1;
  a.label = "tanh1d";
  a.eval = [b](const double* x, double* out) { out[0] = 0.5 * b * (1.0 + std::tanh(x[0])); };
  return a;
}

VectorPotential gauge_shift(const VectorPotential& A,
                            const std::function<double(const double*)>& chi,
                            const std::function<void(const double*, double*)>& grad_chi) {
  if (!chi || !grad_chi) throw std::invalid_argument("gauge_shift: chi and grad_chi required");
  const int d = A.d;
  const double probes[3][2] = {{0.3, -0.7}, {1.1, 0.4}, {-2.0, 1.5}};
  const double h = 1e-5;
  for (const auto& probe : probes) {
    double g[2];
    grad_chi(probe, g);
    for (int k = 0; k < d; ++k) {
      double lo[2] = {probe[0], probe[1]};
      double hi[2] = {probe[0], probe[1]};
      lo[k] -= h;
      hi[k] += h;
      double fd = (chi(hi) - chi(lo)) / (2.0 * h);
      if (std::abs(fd - g[k]) > 1e-6 * (1.0 + std::abs(g[k]))) {
        std::ostringstream os;
        os << "gauge_shift: grad_chi disagrees with chi near (" << probe[0];
        if (d == 2) os << ", " << probe[1];
        os << "): component " << k << " fd " << fd << " vs " << g[k];
        throw std::invalid_argument(os.str());
      }
    }
  }
  VectorPotential out;
  out.d = d;
  out.label = A.label + "+grad";
  auto base = A;
  out.eval = [base, grad_chi, d](const double* x, double* a) {
    base.at(x, a);
    double g[2];
    grad_chi(x, g);
    for (int k = 0; k < d; ++k) a[k] += g[k];
  };
  return out;
}

double circulation(const VectorPotential& A, const double* x, const double* y, int order) {
  if (A.is_zero()) return 0.0;
  const int d = A.d;
  std::vector<double> nd, wt;
  num::gauss_legendre(order, nd, wt);
  double acc = 0.0;
  double p[2], a[2], v[2];
  for (int k = 0; k < d; ++k) v[k] = x[k] - y[k];
  for (std::size_t i = 0; i < nd.size(); ++i) {
    double s = 0.5 + 0.5 * nd[i];
    for (int k = 0; k < d; ++k) p[k] = y[k] + s * v[k];
    A.at(p, a);
    double dot = 0.0;
    for (int k = 0; k < d; ++k) dot += a[k] * v[k];
    acc += 0.5 * wt[i] * dot;
  }
  return acc;
}

double triangle_flux(const MagneticField& B, const double* x, const double* y, const double* z,
                     int order) {
  if (B.is_zero() || B.d == 1) return 0.0;
  // P(s, t) = x + s (y - x) + t (z - x) over {s, t >= 0, s + t <= 1}; the
  // pullback of the two-form carries the constant minor J below.
  double e1[2] = {y[0] - x[0], y[1] - x[1]};
  double e2[2] = {z[0] - x[0], z[1] - x[1]};
  double J = e1[0] * e2[1] - e1[1] * e2[0];
  if (J == 0.0) return 0.0;
  std::vector<double> nd, wt;
  num::gauss_legendre(order, nd, wt);
  double acc = 0.0;
  double p[2];
  for (std::size_t i = 0; i < nd.size(); ++i) {
    double s = 0.5 + 0.5 * nd[i];
    double row = 0.0;
    for (std::size_t j = 0; j < nd.size(); ++j) {
      // t = (1 - s) u maps the wedge onto the unit square
      double t = (1.0 - s) * (0.5 + 0.5 * nd[j]);
      p[0] = x[0] + s * e1[0] + t * e2[0];
      p[1] = x[1] + s * e1[1] + t * e2[1];
      row += 0.5 * wt[j] * B.b12(p);
    }
    acc += 0.5 * wt[i] * (1.0 - s) * row;
  }
  return J * acc;
}

double stokes_defect(const VectorPotential& A, const MagneticField& B, const double* x,
                     const double* y, const double* z, int order) {
  double loop = circulation(A, y, x, order) + circulation(A, z, y, order) +
                circulation(A, x, z, order);
  return std::abs(loop - triangle_flux(B, x, y, z, order));
}

}  // namespace magpdo::mag
