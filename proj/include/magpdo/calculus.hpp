#pragma once

#include <complex>
#include <string>

#include "magpdo/frame.hpp"
#include "magpdo/magnetics.hpp"
#include "magpdo/numerics.hpp"
#include "magpdo/quantization.hpp"
#include "magpdo/symbols.hpp"

// Symbol calculus on top of the frame matrix representation: moving a symbol
// between orderings, composing two symbols, and taking the formal adjoint.
// Every operation goes matrix -> matrix -> phase-space expansion, so the
// results inherit the truncation behaviour of the box they were built on.

namespace magpdo::cal {

using cd = std::complex<double>;

struct CalculusRequest {
  quant::QuantizationParams base;  // shared quadrature budgets; base.t is ignored
  double t = 0.5;                  // ordering of the (first) input
  double s = 0.5;                  // ordering of the second input, or the target
  double r = 0.5;                  // ordering of a composition result
  num::LatticeBox box{1, 4};
  num::Grid xgrid{1, 1.0, 33};
  num::Grid xigrid{1, 2.0, 65};
  // Gate on the reported inner-sum tail of a composition. The estimate bounds
  // the central matrix entry through the factors' decay certificates; pairs of
  // decaying symbols land well under 0.1 at desk radii, while symbols with
  // polynomially growing weights saturate their certificates and report order
  // one. The default only catches a clearly undersized box; tighten it when
  // the factors are known to decay.
  double compose_tail_tol = 4.0;
  int nthreads = 1;

  void validate() const;
};

// Matrix of f at ordering t, expanded again at ordering s. Grids and budgets
// come from the request; req.r is unused.
quant::SymbolSamples change_quantization(const sym::Symbol& f, const CalculusRequest& req,
                                         const mag::VectorPotential& A,
                                         const mag::MagneticField& B, const frame::Window& w);

struct ComposeResult {
  quant::SymbolSamples samples;
  double tail_estimate = 0.0;  // bound on the worst matrix entry lost to the box
};

// Symbol of Op_t(f) Op_s(g) at ordering r: the matrix product of the two
// factor matrices, expanded on the request grids. The inner index runs over
// the request box only; the dropped part is bounded through the factors'
// decay certificates at order d+1 and reported as tail_estimate. Throws when
// that bound exceeds req.compose_tail_tol; a larger box shrinks it.
ComposeResult compose_symbols(const sym::Symbol& f, const sym::Symbol& g,
                              const CalculusRequest& req, const mag::VectorPotential& A,
                              const mag::MagneticField& B, const frame::Window& w);

// Symbol of the adjoint of Op_t(f) at ordering s: the conjugate transpose of
// the matrix of f, expanded on the request grids.
quant::SymbolSamples adjoint_symbol(const sym::Symbol& f, const CalculusRequest& req,
                                    const mag::VectorPotential& A, const mag::MagneticField& B,
                                    const frame::Window& w);

// Applies the frame expansion T = sum_{ab} M_ab G_a <G_b, .> to a grid
// function: synthesize(M * analyze(f)). This realizes the operator behind a
// matrix without re-quantizing expanded samples, so it is the route for
// operator-level checks of the calculus operations.
num::GridFunction apply_expansion(const quant::OperatorMatrix& mx, const frame::Window& w,
                                  const mag::VectorPotential& A, const num::GridFunction& f,
                                  int nthreads = 1);

// <f, T g> for the same frame expansion, computed from the analysis
// coefficients of f and g on the matrix box. Works in any dimension the
// frame supports, so matrix-level identities can be tested where phase-space
// expansion is not available.
cd frame_quadratic_form(const quant::OperatorMatrix& mx, const frame::Window& w,
                        const mag::VectorPotential& A, const num::GridFunction& f,
                        const num::GridFunction& g, int nthreads = 1);

}  // namespace magpdo::cal
