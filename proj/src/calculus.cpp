#include "magpdo/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace magpdo::cal {

namespace {

double bracket(double v) { return std::sqrt(1.0 + v * v); }

quant::QuantizationParams with_ordering(const quant::QuantizationParams& base, double t) {
  quant::QuantizationParams q = base;
  q.t = t;
  return q;
}

quant::OperatorMatrix assemble_at(const sym::Symbol& f, double t, const CalculusRequest& req,
                                  const mag::VectorPotential& A, const mag::MagneticField& B,
                                  const frame::Window& w) {
  return quant::assemble_matrix(f, with_ordering(req.base, t), A, B, w, req.box, req.nthreads);
}

// W(mid) <a-g>^-n <a'-g'>^-n with the mids weighted by the ordering,
// matching the normalization of the decay certificate.
double pair_bound(const wts::TemperedWeight& W, double t, const num::FrameIndex& a,
                  const num::FrameIndex& g, int n) {
  double x[2], xi[2], v = 1.0;
  for (int j = 0; j < W.d; ++j) {
    x[j] = t * a.a[j] + (1.0 - t) * g.a[j];
    xi[j] = (1.0 - t) * a.ap[j] + t * g.ap[j];
    v *= std::pow(bracket(a.a[j] - g.a[j]), -n) * std::pow(bracket(a.ap[j] - g.ap[j]), -n);
  }
  return W.at(x, xi) * v;
}

// Bound on the part of the inner sum falling outside the box for the central
// matrix entry, the one representative of the sampled region: certificates
// at order d+1 control both factors, and the lattice sum over the outside is
// accumulated ring by ring until the rings stop contributing. Entries near
// the box corner are truncated more strongly than this; the synthesized
// samples on the central grids are not driven by those.
double inner_tail_bound(const quant::OperatorMatrix& m1, const wts::TemperedWeight& w1, double t,
                        const quant::OperatorMatrix& m2, const wts::TemperedWeight& w2, double s) {
  const num::LatticeBox& box = m1.box;
  const int n = box.d + 1;
  const double c1 = quant::decay_certificate(m1, w1, n, n);
  const double c2 = quant::decay_certificate(m2, w2, n, n);

  num::FrameIndex center;
  center.d = box.d;
  center.a = {0, 0};
  center.ap = {0, 0};

  const int rings = box.d == 1 ? 64 : 12;
  double acc = 0.0;
  for (int k = 1; k <= rings; ++k) {
    const int edge = box.R + k;
    double ring = 0.0;
    for (const auto& idx : num::enumerate_lattice(num::LatticeBox{box.d, edge})) {
      int linf = 0;
      for (int j = 0; j < box.d; ++j)
        linf = std::max({linf, std::abs(idx.a[j]), std::abs(idx.ap[j])});
      if (linf != edge) continue;
      ring += pair_bound(w1, t, center, idx, n) * pair_bound(w2, s, idx, center, n);
    }
    acc += ring;
    if (ring < 1e-4 * acc) break;
  }
  return c1 * c2 * acc;
}

quant::OperatorMatrix multiply(const quant::OperatorMatrix& m1, const quant::OperatorMatrix& m2,
                               double r, const std::string& label, int nthreads) {
  const std::size_t n = m1.box.count();
  quant::OperatorMatrix prod;
  prod.box = m1.box;
  prod.t = r;
  prod.symbol_label = label;
  prod.field_label = m1.field_label;
  prod.xi_cutoff = m1.xi_cutoff;
  prod.tail_tol = m1.tail_tol;
  prod.m = num::ComplexMatrix(n, n);
  // Each output entry is one task's fixed-order dot product, so the result
  // does not depend on the thread count.
  num::parallel_for(n, nthreads, [&](std::size_t row) {
    for (std::size_t col = 0; col < n; ++col) {
      cd acc(0.0, 0.0);
      for (std::size_t k = 0; k < n; ++k) acc += m1.m.at(row, k) * m2.m.at(k, col);
      prod.m.at(row, col) = acc;
    }
  });
  return prod;
}

}  // namespace

void CalculusRequest::validate() const {
  auto in_range = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_range(t) || !in_range(s) || !in_range(r))
    throw std::invalid_argument("orderings must lie in [0, 1]");
  if (!(compose_tail_tol > 0.0)) throw std::invalid_argument("compose_tail_tol must be positive");
  with_ordering(base, 0.5).validate();
}

quant::SymbolSamples change_quantization(const sym::Symbol& f, const CalculusRequest& req,
                                         const mag::VectorPotential& A,
                                         const mag::MagneticField& B, const frame::Window& w) {
  req.validate();
  quant::OperatorMatrix m = assemble_at(f, req.t, req, A, B, w);
  return quant::synthesize_symbol(m, w, A, with_ordering(req.base, req.s), req.xgrid, req.xigrid,
                                  req.nthreads);
}

ComposeResult compose_symbols(const sym::Symbol& f, const sym::Symbol& g,
                              const CalculusRequest& req, const mag::VectorPotential& A,
                              const mag::MagneticField& B, const frame::Window& w) {
  req.validate();
  quant::OperatorMatrix m1 = assemble_at(f, req.t, req, A, B, w);
  quant::OperatorMatrix m2 = assemble_at(g, req.s, req, A, B, w);

  ComposeResult out;
  out.tail_estimate = inner_tail_bound(m1, f.weight, req.t, m2, g.weight, req.s);
  if (out.tail_estimate > req.compose_tail_tol) {
    std::ostringstream msg;
    msg << "composition inner-sum tail estimate " << out.tail_estimate << " exceeds "
        << req.compose_tail_tol << "; enlarge the index box";
    throw std::runtime_error(msg.str());
  }

  quant::OperatorMatrix prod =
      multiply(m1, m2, req.r, f.label + " o " + g.label, req.nthreads);
  out.samples = quant::synthesize_symbol(prod, w, A, with_ordering(req.base, req.r), req.xgrid,
                                         req.xigrid, req.nthreads);
  return out;
}

quant::SymbolSamples adjoint_symbol(const sym::Symbol& f, const CalculusRequest& req,
                                    const mag::VectorPotential& A, const mag::MagneticField& B,
                                    const frame::Window& w) {
  req.validate();
  quant::OperatorMatrix m = assemble_at(f, req.t, req, A, B, w);
  const std::size_t n = m.box.count();
  quant::OperatorMatrix adj;
  adj.box = m.box;
  adj.t = req.s;
  adj.symbol_label = "adj " + f.label;
  adj.field_label = m.field_label;
  adj.xi_cutoff = m.xi_cutoff;
  adj.tail_tol = m.tail_tol;
  adj.m = num::ComplexMatrix(n, n);
  for (std::size_t row = 0; row < n; ++row)
    for (std::size_t col = 0; col < n; ++col) adj.m.at(row, col) = std::conj(m.m.at(col, row));
  return quant::synthesize_symbol(adj, w, A, with_ordering(req.base, req.s), req.xgrid, req.xigrid,
                                  req.nthreads);
}

num::GridFunction apply_expansion(const quant::OperatorMatrix& mx, const frame::Window& w,
                                  const mag::VectorPotential& A, const num::GridFunction& f,
                                  int nthreads) {
  frame::CoefficientSet cf = frame::analyze(f, w, A, mx.box, nthreads);
  frame::CoefficientSet out;
  out.box = mx.box;
  const std::size_t n = mx.box.count();
  out.values.assign(n, cd(0.0, 0.0));
  for (std::size_t row = 0; row < n; ++row) {
    cd acc(0.0, 0.0);
    for (std::size_t col = 0; col < n; ++col) acc += mx.m.at(row, col) * cf.values[col];
    out.values[row] = acc;
  }
  return frame::synthesize(out, w, A, f.grid, nthreads);
}

cd frame_quadratic_form(const quant::OperatorMatrix& mx, const frame::Window& w,
                        const mag::VectorPotential& A, const num::GridFunction& f,
                        const num::GridFunction& g, int nthreads) {
  frame::CoefficientSet cf = frame::analyze(f, w, A, mx.box, nthreads);
  frame::CoefficientSet cg = frame::analyze(g, w, A, mx.box, nthreads);
  const std::size_t n = mx.box.count();
  cd acc(0.0, 0.0);
  for (std::size_t row = 0; row < n; ++row) {
    cd rowsum(0.0, 0.0);
    for (std::size_t col = 0; col < n; ++col) rowsum += mx.m.at(row, col) * cg.values[col];
    acc += std::conj(cf.values[row]) * rowsum;
  }
  return acc;
}

}  // namespace magpdo::cal
