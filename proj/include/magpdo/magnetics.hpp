#pragma once

#include <functional>
#include <string>

// Magnetic geometry: field two-forms, vector potentials, line circulations,
// and triangle fluxes. Dimensions are 1 or 2; in one dimension the field
// two-form vanishes identically and only a user-chosen potential can act.

namespace magpdo::mag {

struct MagneticField {
  int d = 1;
  std::string label = "zero";
  // the single independent component B_{12}(x); empty means the zero field
  std::function<double(const double*)> b12;

  bool is_zero() const { return !b12; }
};

MagneticField zero_field(int d);
MagneticField constant_field_2d(double b);
// B_{12}(x) = b (1 + tanh(x_1)) / 2, interpolating 0 to b across a wall
MagneticField tanh_field_2d(double b);

struct VectorPotential {
  int d = 1;
  std::string label = "zero";
  std::function<void(const double*, double*)> eval;  // fills d components

  void at(const double* x, double* a) const;
  bool is_zero() const { return !eval; }
};

VectorPotential zero_potential(int d);

// Transversal gauge: A_k(x) = sum_j int_0^1 ds s x_j B_jk(s x). Vanishes at
// the origin and satisfies curl A = B.
VectorPotential transversal_potential(const MagneticField& B, int s_order = 24);

// One-dimensional potential A_1(x) = b (1 + tanh(x)) / 2. There is no field
// to recover it from; it exists to drive nontrivial circulation phases in
// one-dimensional runs.
VectorPotential tanh_potential_1d(double b);

// A + grad chi. grad_chi is spot-checked against finite differences of chi
// at a few fixed points; an inconsistent pair is rejected.
VectorPotential gauge_shift(const VectorPotential& A,
                            const std::function<double(const double*)>& chi,
                            const std::function<void(const double*, double*)>& grad_chi);

// Line integral of A along the segment from y to x (note the direction).
double circulation(const VectorPotential& A, const double* x, const double* y, int order = 24);

// Integral of the field two-form over the oriented triangle (x, y, z),
// oriented so that it equals the circulation around x -> y -> z -> x.
double triangle_flux(const MagneticField& B, const double* x, const double* y, const double* z,
                     int order = 24);

// | circulation(x->y) + circulation(y->z) + circulation(z->x) - flux |
double stokes_defect(const VectorPotential& A, const MagneticField& B, const double* x,
                     const double* y, const double* z, int order = 24);

}  // namespace magpdo::mag
