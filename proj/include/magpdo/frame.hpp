#pragma once

#include <complex>
#include <vector>

#include "magpdo/magnetics.hpp"
#include "magpdo/numerics.hpp"

namespace magpdo::frame {

using cd = std::complex<double>;

// Compactly supported window: g(x) = prod_i g1(x_i) with g1 a smooth bump
// profile normalized so that sum_k g1(x-k)^2 == 1 for every x.
struct Window {
  int d = 1;

  // profile value; identically 0 for |t| >= 1
  double g1(double t) const;

  // tensor product over the first d coordinates of x
  double g(const double* x) const;
};

Window build_window(int d);

// One frame element sampled on a grid.
struct FrameVector {
  num::FrameIndex index;
  num::GridFunction realization;
};

// Value of the frame element at a point. Exactly 0 outside alpha + (-1,1)^d;
// the gauge phase is never evaluated there.
cd frame_point(const Window& w, const mag::VectorPotential& A, const num::FrameIndex& idx,
               const double* x);

// Samples the element on the grid. The grid box must contain alpha + [-1,1]^d.
FrameVector frame_vector(const Window& w, const mag::VectorPotential& A,
                         const num::FrameIndex& idx, const num::Grid& grid);

// Coefficients stored in enumerate_lattice(box) order.
struct CoefficientSet {
  num::LatticeBox box;
  std::vector<cd> values;

  cd at(const num::FrameIndex& idx) const { return values.at(num::lattice_offset(box, idx)); }
};

// Inner products <G_idx, f> for every index in the box, via grid sums
// restricted to each element's support cube. Requires h <= pi/(2R) so the
// largest modulation is resolvable, and a grid wide enough for every alpha.
CoefficientSet analyze(const num::GridFunction& f, const Window& w, const mag::VectorPotential& A,
                       const num::LatticeBox& box, int nthreads = 1);

// Pointwise sum of coeff * frame element over the whole box.
num::GridFunction synthesize(const CoefficientSet& coeffs, const Window& w,
                             const mag::VectorPotential& A, const num::Grid& grid,
                             int nthreads = 1);

// | ||f||^2 - sum |c|^2 | / ||f||^2 over the box. Errors on ||f|| = 0.
double parseval_defect(const num::GridFunction& f, const Window& w, const mag::VectorPotential& A,
                       const num::LatticeBox& box, int nthreads = 1);

}  // namespace magpdo::frame
