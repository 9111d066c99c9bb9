#pragma once

#include <complex>
#include <string>
#include <vector>

#include "magpdo/frame.hpp"
#include "magpdo/magnetics.hpp"
#include "magpdo/numerics.hpp"
#include "magpdo/symbols.hpp"
#include "magpdo/weights.hpp"

// t-quantization of phase-space symbols in a magnetic gauge: integral
// kernels, direct application to grid functions, frame matrix elements with
// their decay certificates, and the inverse map from kernels or rank-one
// frame pairs back to symbol samples.

namespace magpdo::quant {

using cd = std::complex<double>;

struct QuantizationParams {
  double t = 0.5;            // operator ordering, 0..1
  double xi_cutoff = 130.0;  // half extent of the covered frequency band
  int zeta_base_order = 48;  // frequency nodes before oscillation padding
  int u_order = 48;          // nodes per axis for window-pair integrals
  int v_order = 48;          // base nodes for the separation integral
  double tail_tol = 1e-8;    // absolute budget for unintegrated tails
  int flux_order = 24;       // quadrature order for circulation and flux
  int max_zeta_nodes = 8192;  // guard on frequency rule growth at large separations

  void validate() const;  // throws std::invalid_argument
};

// Kernel sampled on grid x grid: k.at(i, j) = K(x_i, y_j). One-dimensional
// grids only; the dense table is quadratic in the point count.
struct KernelSamples {
  num::Grid grid;
  num::ComplexMatrix k;
  std::string tail_policy;      // "corrected" or "truncated"
  double tail_estimate = 0.0;   // bound on the neglected frequency tail
};

// Integral kernel of the t-quantized operator for symbol f under potential
// A. Symbols whose declared weight grows in xi are rejected; decaying ones
// get a tail correction past the cutoff, flat ones are truncated sharply.
KernelSamples kernel_from_symbol(const sym::Symbol& f, const QuantizationParams& q,
                                 const mag::VectorPotential& A, const num::Grid& grid);

// Applies the operator to a grid function. Polynomial symbols go through
// spectral derivatives (peeled as covariant momenta, so any dimension works
// but the axis sizes must be powers of two); other symbols multiply by the
// materialized kernel and are limited to one dimension.
num::GridFunction apply_op(const sym::Symbol& f, const QuantizationParams& q,
                           const mag::VectorPotential& A, const num::GridFunction& u);

// Matrix entry <G_row, Op G_col>. Polynomial symbols use the exact frequency
// integral and vanish for position offsets of two or more; everything else
// pairs symbol against window overlaps over the covered band, monitors the
// discarded tail against tail_tol, and requires d = 1.
cd matrix_element(const sym::Symbol& f, const QuantizationParams& q,
                  const mag::VectorPotential& A, const mag::MagneticField& B,
                  const frame::Window& w, const num::FrameIndex& row,
                  const num::FrameIndex& col);

struct OperatorMatrix {
  num::LatticeBox box;
  double t = 0.5;
  std::string symbol_label;
  std::string field_label;
  double xi_cutoff = 130.0;
  double tail_tol = 1e-8;
  num::ComplexMatrix m;  // rows and columns in enumerate_lattice order

  cd at(const num::FrameIndex& row, const num::FrameIndex& col) const;
};

// Dense matrix over the whole box, parallel over position pairs with a
// fixed reduction shape, so results are bit-identical at any thread count.
// Boxes beyond 2000 indices are rejected.
OperatorMatrix assemble_matrix(const sym::Symbol& f, const QuantizationParams& q,
                               const mag::VectorPotential& A, const mag::MagneticField& B,
                               const frame::Window& w, const num::LatticeBox& box,
                               int nthreads = 1);

// sup over entries of <a-b>^n <a'-b'>^m |M_ab| / M(t a + (1-t) b, (1-t) a' + t b').
double decay_certificate(const OperatorMatrix& mx, const wts::TemperedWeight& M, int n, int m);

// Symbol values on a separable phase-space grid, both axes one-dimensional.
struct SymbolSamples {
  num::Grid xgrid;
  num::Grid xigrid;
  std::vector<cd> values;  // row-major, position-major

  cd& at(std::size_t ix, std::size_t ixi) { return values[ix * xigrid.n + ixi]; }
  const cd& at(std::size_t ix, std::size_t ixi) const { return values[ix * xigrid.n + ixi]; }
};

// Symbol of the rank-one operator G_row (x) conj(G_col). Exactly zero at
// positions u with |u - t a_row - (1-t) a_col| >= 1.
SymbolSamples inverse_rank_one(const frame::Window& w, const mag::VectorPotential& A,
                               const QuantizationParams& q, const num::FrameIndex& row,
                               const num::FrameIndex& col, const num::Grid& xgrid,
                               const num::Grid& xigrid);

// Symbol of a sampled kernel, by the separation-variable transform with
// bilinear interpolation between kernel samples.
SymbolSamples inverse_kernel_symbol(const KernelSamples& k, const mag::VectorPotential& A,
                                    const QuantizationParams& q, const num::Grid& xgrid,
                                    const num::Grid& xigrid);

// Symbol backed by sampled values: cubic interpolation inside the sampled
// box, zero outside it, flat declared weight. Bridges expansion output back
// into kernel construction and application.
sym::Symbol sampled_symbol(const SymbolSamples& s, const std::string& label);

// Sum of entry * rank-one symbol over the whole box; the symbol counterpart
// of the frame expansion. Parallel over sample points, bit-identical at any
// thread count.
SymbolSamples synthesize_symbol(const OperatorMatrix& mx, const frame::Window& w,
                                const mag::VectorPotential& A, const QuantizationParams& q,
                                const num::Grid& xgrid, const num::Grid& xigrid,
                                int nthreads = 1);

// Text format: '#'-prefixed key=value header (d, R, t, labels, tolerances),
// then one comma-separated row per entry, a, a', b, b', re, im, with 17
// significant digits, in matrix order.
void save_matrix(const OperatorMatrix& mx, const std::string& path);
OperatorMatrix load_matrix(const std::string& path);

}  // namespace magpdo::quant
