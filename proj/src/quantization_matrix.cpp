#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "magpdo/kernels.hpp"
#include "magpdo/quantization.hpp"

// Frame matrix elements and their inverses. After centering on the index
// pair, the element is a phase times
//   (2pi)^{-2d} int dzeta du dv e^{i zeta.(v-delta)} e^{i u.sigma}
//       f(u + c_x, zeta + c_xi) H(u, v)
// with delta = b - a, sigma = b' - a', c_x = t a + (1-t) b,
// c_xi = (1-t) a' + t b', and H the window overlap g(u+(1-t)v) g(u-tv)
// carrying the two triangle flux phases. Polynomial symbols integrate zeta
// exactly and collapse v onto delta; everything else truncates zeta to the
// covered band and monitors what it drops.

namespace magpdo::quant {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
const cd kI{0.0, 1.0};

double pref_pow(int d) {
  double p = 1.0;
  for (int i = 0; i < d; ++i) p /= kTwoPi;
  return p;
}

struct PairFrame {
  int d = 1;
  double t = 0.5;
  std::array<double, 2> alpha{}, beta{}, cx{}, delta{};
  double phase_ab = 0.0;  // circulation phase between the centers
};

PairFrame make_pair_frame(const QuantizationParams& q, const mag::VectorPotential& A,
                          const num::FrameIndex& row, const num::FrameIndex& col) {
  PairFrame p;
  p.d = row.d;
  p.t = q.t;
  for (int i = 0; i < p.d; ++i) {
    p.alpha[i] = row.a[i];
    p.beta[i] = col.a[i];
    p.cx[i] = q.t * p.alpha[i] + (1.0 - q.t) * p.beta[i];
    p.delta[i] = p.beta[i] - p.alpha[i];
  }
  if (!A.is_zero())
    p.phase_ab = mag::circulation(A, p.alpha.data(), p.beta.data(), q.flux_order);
  return p;
}

// ---------------------------------------------------------------------------
// exact-frequency route for polynomial symbols

// One monomial's contribution split over frequency derivative orders kappa.
// Only single-axis frequency exponents up to two are representable.
struct PolyPiece {
  cd coef;
  std::array<int, 2> xexp{};
  int axis = 0;
  int xiexp = 0;
};

std::vector<PolyPiece> split_poly(const sym::Symbol& f) {
  std::vector<PolyPiece> out;
  for (const sym::PolyTerm& term : f.poly) {
    PolyPiece p;
    p.coef = term.coef;
    p.xexp = term.xexp;
    int active = 0;
    for (int i = 0; i < 2; ++i) {
      if (term.xiexp[i] <= 0) continue;
      ++active;
      p.axis = i;
      p.xiexp = term.xiexp[i];
    }
    if (active > 1 || p.xiexp > 2)
      throw std::invalid_argument(
          "matrix_element: polynomial frequency exponents are limited to xi_j and xi_j^2");
    out.push_back(p);
  }
  return out;
}

// Window overlap with flux phases at separation v, as a function of the
// tensor quadrature point u.
cd overlap_point(const frame::Window& w, const mag::MagneticField& B, const PairFrame& p,
                 int flux_order, const double* u, const double* v) {
  double ga[2], gb[2];
  for (int i = 0; i < p.d; ++i) {
    ga[i] = u[i] + (1.0 - p.t) * v[i];
    gb[i] = u[i] - p.t * v[i];
  }
  const double gv = w.g(ga) * w.g(gb);
  if (gv == 0.0) return {0.0, 0.0};
  if (p.d == 2 && !B.is_zero()) {
    double x[2], y[2];
    for (int i = 0; i < 2; ++i) {
      x[i] = p.alpha[i] + ga[i];
      y[i] = p.beta[i] + gb[i];
    }
    const double f1 = mag::triangle_flux(B, y, p.alpha.data(), p.beta.data(), flux_order);
    const double f2 = mag::triangle_flux(B, x, p.alpha.data(), y, flux_order);
    return std::polar(gv, f1 + f2);
  }
  return {gv, 0.0};
}

// Per-pair tables for the polynomial route: tensor u nodes over the overlap
// support and, for each needed derivative order, the v-derivative of the
// overlap at the collapsed separation (fourth-order stencils, step 1e-4).
struct DeltaTables {
  PairFrame frame;
  bool empty = true;
  std::vector<PolyPiece> pieces;
  std::vector<std::array<double, 2>> unodes;
  std::vector<double> uw;
  // profiles[j][k][node]: piece j, frequency order k on its axis, with the
  // monomial factor and the u weight folded in
  std::vector<std::array<std::vector<cd>, 3>> profiles;
};

DeltaTables make_delta_tables(const sym::Symbol& f, const QuantizationParams& q,
                              const mag::VectorPotential& A, const mag::MagneticField& B,
                              const frame::Window& w, const num::FrameIndex& row,
                              const num::FrameIndex& col) {
  DeltaTables tb;
  tb.frame = make_pair_frame(q, A, row, col);
  tb.pieces = split_poly(f);
  const PairFrame& p = tb.frame;
  const int d = p.d;

  double lo[2], hi[2];
  for (int i = 0; i < d; ++i) {
    lo[i] = std::max(p.t * p.delta[i] - 1.0, -(1.0 - p.t) * p.delta[i] - 1.0);
    hi[i] = std::min(p.t * p.delta[i] + 1.0, -(1.0 - p.t) * p.delta[i] + 1.0);
    if (!(lo[i] < hi[i])) return tb;  // separated by two or more cells
  }

  // at delta = 0 the box runs edge to edge, where the window is flat to all
  // orders; plain Gauss-Legendre converges slowly there, so this route spends
  // extra nodes per axis (more in one dimension, where they cost nothing)
  const int nu_axis = (d == 1 ? 8 : 4) * q.u_order / 3;
  std::vector<double> nodes, wts;
  num::gauss_legendre(nu_axis, nodes, wts);
  const std::size_t per_axis = nodes.size();
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= per_axis;
  tb.unodes.resize(total);
  tb.uw.resize(total);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rem = k;
    double wt = 1.0;
    std::array<double, 2> u{};
    for (int i = d - 1; i >= 0; --i) {
      const std::size_t m = rem % per_axis;
      rem /= per_axis;
      u[i] = 0.5 * (hi[i] + lo[i]) + 0.5 * (hi[i] - lo[i]) * nodes[m];
      wt *= 0.5 * (hi[i] - lo[i]) * wts[m];
    }
    tb.unodes[k] = u;
    tb.uw[k] = wt;
  }

  const auto& pieces = tb.pieces;
  const double step = 1e-4;
  tb.profiles.resize(pieces.size());
  std::vector<cd> h0(total), d1, d2;
  std::array<std::vector<cd>, 5> ring;  // overlap at delta + j*step, j=-2..2

  auto fill_ring = [&](int axis) {
    for (int s = -2; s <= 2; ++s) {
      auto& dst = ring[s + 2];
      dst.resize(total);
      std::array<double, 2> v = {p.delta[0], p.delta[1]};
      v[axis] += step * s;
      for (std::size_t k = 0; k < total; ++k)
        dst[k] = overlap_point(w, B, p, q.flux_order, tb.unodes[k].data(), v.data());
    }
  };

  for (std::size_t k = 0; k < total; ++k)
    h0[k] = overlap_point(w, B, p, q.flux_order, tb.unodes[k].data(), p.delta.data());

  int ring_axis = -1;
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    const PolyPiece& pc = pieces[j];
    if (pc.xiexp > 0 && pc.axis != ring_axis) {
      fill_ring(pc.axis);
      ring_axis = pc.axis;
      d1.resize(total);
      d2.resize(total);
      for (std::size_t k = 0; k < total; ++k) {
        d1[k] = (ring[0][k] - 8.0 * ring[1][k] + 8.0 * ring[3][k] - ring[4][k]) / (12.0 * step);
        d2[k] = (-ring[0][k] + 16.0 * ring[1][k] - 30.0 * ring[2][k] + 16.0 * ring[3][k] -
                 ring[4][k]) /
                (12.0 * step * step);
      }
    }
    for (int kk = 0; kk <= pc.xiexp; ++kk) {
      auto& prof = tb.profiles[j][kk];
      prof.resize(total);
      const std::vector<cd>& src = kk == 0 ? h0 : (kk == 1 ? d1 : d2);
      for (std::size_t k = 0; k < total; ++k) {
        double mono = 1.0;
        for (int i = 0; i < d; ++i) {
          const double xi = tb.unodes[k][i] + p.cx[i];
          for (int e = 0; e < pc.xexp[i]; ++e) mono *= xi;
        }
        prof[k] = tb.uw[k] * mono * src[k];
      }
    }
  }
  tb.empty = false;
  return tb;
}

cd delta_eval(const DeltaTables& tb, const num::FrameIndex& row, const num::FrameIndex& col,
              std::vector<cd>& escratch) {
  if (tb.empty) return {0.0, 0.0};
  const PairFrame& p = tb.frame;
  const int d = p.d;
  double cxi[2] = {0.0, 0.0}, sigma[2] = {0.0, 0.0};
  for (int i = 0; i < d; ++i) {
    cxi[i] = (1.0 - p.t) * row.ap[i] + p.t * col.ap[i];
    sigma[i] = col.ap[i] - row.ap[i];
  }

  const std::size_t total = tb.unodes.size();
  escratch.resize(total);
  for (std::size_t k = 0; k < total; ++k) {
    double ph = 0.0;
    for (int i = 0; i < d; ++i) ph += tb.unodes[k][i] * sigma[i];
    escratch[k] = std::polar(1.0, ph);
  }

  const auto& pieces = tb.pieces;
  const cd ipow[3] = {cd{1.0, 0.0}, kI, cd{-1.0, 0.0}};
  cd acc{0.0, 0.0};
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    const PolyPiece& pc = pieces[j];
    const double c = cxi[pc.axis];
    for (int kk = 0; kk <= pc.xiexp; ++kk) {
      // binomial split of (zeta + c_xi)^xiexp on the active axis
      double binom = 1.0;
      if (pc.xiexp == 1 && kk == 0) binom = c;
      if (pc.xiexp == 2) binom = kk == 0 ? c * c : (kk == 1 ? 2.0 * c : 1.0);
      const cd s = kernels::cdotu(tb.profiles[j][kk].data(), escratch.data(), total);
      acc += pc.coef * binom * ipow[kk] * s;
    }
  }

  double center_ph = p.phase_ab;
  for (int i = 0; i < d; ++i) center_ph -= cxi[i] * p.delta[i];
  // e^{i c_xi.(a-b)} e^{i phi(a,b)} with delta = b - a
  return pref_pow(d) * std::polar(1.0, center_ph) * acc;
}

// ---------------------------------------------------------------------------
// banded pairing route for general one-dimensional symbols

struct PairingTables {
  PairFrame frame;
  double xi_cutoff = 0.0;
  double tail_tol = 0.0;
  std::vector<double> znodes, zw;   // frequency nodes over the covered band
  std::vector<double> unodes, uw;   // overlap nodes on (-1, 1)
  num::ComplexMatrix vint;          // vint(l, i): v integral at (zeta_l, u_i)
};

PairingTables make_pairing_tables(const QuantizationParams& q, const mag::VectorPotential& A,
                                  const frame::Window& w, const num::FrameIndex& row,
                                  const num::FrameIndex& col) {
  PairingTables tb;
  tb.frame = make_pair_frame(q, A, row, col);
  tb.xi_cutoff = q.xi_cutoff;
  tb.tail_tol = q.tail_tol;
  const double t = q.t;
  const double delta = tb.frame.delta[0];

  const double rate = std::abs(delta) + 2.0;
  num::scaled_panel_rule(q.xi_cutoff, rate, q.zeta_base_order, q.max_zeta_nodes, tb.znodes,
                         tb.zw);

  std::vector<double> gn, gw;
  num::gauss_legendre(q.u_order, gn, gw);
  tb.unodes = gn;
  tb.uw = gw;

  // four oscillation bands share window tables sized for their top frequency
  const int kBands = 4;
  std::vector<std::vector<double>> vn(kBands), vw(kBands);
  std::vector<num::ComplexMatrix> p(kBands);
  for (int b = 0; b < kBands; ++b) {
    const double z_hi = q.xi_cutoff * (b + 1) / kBands;
    const int nv = q.v_order + static_cast<int>(std::ceil(4.0 * 4.0 * z_hi / kTwoPi));
    num::gauss_legendre(nv, gn, gw);
    vn[b].resize(gn.size());
    vw[b].resize(gn.size());
    for (std::size_t j = 0; j < gn.size(); ++j) {
      vn[b][j] = 2.0 * gn[j];
      vw[b][j] = 2.0 * gw[j];
    }
    p[b] = num::ComplexMatrix(tb.unodes.size(), vn[b].size());
    for (std::size_t i = 0; i < tb.unodes.size(); ++i) {
      const double u = tb.unodes[i];
      for (std::size_t j = 0; j < vn[b].size(); ++j) {
        const double v = vn[b][j];
        p[b].at(i, j) = vw[b][j] * w.g1(u + (1.0 - t) * v) * w.g1(u - t * v);
      }
    }
  }

  tb.vint = num::ComplexMatrix(tb.znodes.size(), tb.unodes.size());
  std::vector<cd> ev;
  for (std::size_t l = 0; l < tb.znodes.size(); ++l) {
    const double z = tb.znodes[l];
    int b = std::min(kBands - 1,
                     static_cast<int>(std::floor(std::abs(z) * kBands / q.xi_cutoff)));
    ev.resize(vn[b].size());
    for (std::size_t j = 0; j < vn[b].size(); ++j) ev[j] = std::polar(1.0, z * vn[b][j]);
    const cd shift = std::polar(1.0, -z * delta);
    for (std::size_t i = 0; i < tb.unodes.size(); ++i)
      tb.vint.at(l, i) = shift * kernels::cdotu(&p[b].at(i, 0), ev.data(), vn[b].size());
  }
  return tb;
}

// Symbol values against the v integral, u weights folded in, for one value
// of the frequency center.
void fill_symbol_block(const PairingTables& tb, const sym::Symbol& f, double cxi,
                       num::ComplexMatrix& block) {
  if (block.rows != tb.znodes.size() || block.cols != tb.unodes.size())
    block = num::ComplexMatrix(tb.znodes.size(), tb.unodes.size());
  double x[1], xi[1];
  for (std::size_t l = 0; l < tb.znodes.size(); ++l) {
    xi[0] = tb.znodes[l] + cxi;
    for (std::size_t i = 0; i < tb.unodes.size(); ++i) {
      x[0] = tb.unodes[i] + tb.frame.cx[0];
      block.at(l, i) = tb.uw[i] * f.at(x, xi) * tb.vint.at(l, i);
    }
  }
}

cd pairing_eval(const PairingTables& tb, const num::ComplexMatrix& block, double cxi, int sigma,
                std::vector<cd>& esig) {
  const std::size_t nu = tb.unodes.size();
  if (esig.size() != nu) esig.resize(nu);
  for (std::size_t i = 0; i < nu; ++i) esig[i] = std::polar(1.0, tb.unodes[i] * sigma);

  const double cut = tb.xi_cutoff;
  cd acc{0.0, 0.0};
  double f_hi = 0.0, f_mid = 0.0;
  for (std::size_t l = 0; l < tb.znodes.size(); ++l) {
    const cd s = kernels::cdotu(&block.at(l, 0), esig.data(), nu);
    acc += tb.zw[l] * s;
    const double az = std::abs(tb.znodes[l]);
    if (az >= 0.8 * cut)
      f_hi = std::max(f_hi, std::abs(s));
    else if (az >= 0.6 * cut)
      f_mid = std::max(f_mid, std::abs(s));
  }

  const double pref = pref_pow(2 * tb.frame.d);
  // geometric extension of the edge magnitude sizes the dropped tail
  const double r = f_mid > 0.0 ? std::min(f_hi / f_mid, 2.0) : 0.0;
  const double est =
      pref * f_hi * 0.2 * cut * (r < 1.0 ? 1.0 + r / (1.0 - r) : 50.0);
  if (est > tb.tail_tol) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "matrix_element: frequency tail estimate %.3e exceeds tail_tol %.3e; "
                  "increase xi_cutoff",
                  est, tb.tail_tol);
    throw std::runtime_error(buf);
  }

  return pref * std::polar(1.0, tb.frame.phase_ab - cxi * tb.frame.delta[0]) * acc;
}

void check_element_dims(const sym::Symbol& f, const mag::VectorPotential& A,
                        const mag::MagneticField& B, const frame::Window& w, int d) {
  if (f.d != d || A.d != d || B.d != d || w.d != d)
    throw std::invalid_argument("matrix_element: dimension mismatch");
  if (d == 1 && !B.is_zero())
    throw std::invalid_argument("matrix_element: one-dimensional runs have no field two-form");
}

}  // namespace

cd matrix_element(const sym::Symbol& f, const QuantizationParams& q,
                  const mag::VectorPotential& A, const mag::MagneticField& B,
                  const frame::Window& w, const num::FrameIndex& row,
                  const num::FrameIndex& col) {
  q.validate();
  if (row.d != col.d) throw std::invalid_argument("matrix_element: index dimensions differ");
  check_element_dims(f, A, B, w, row.d);

  std::vector<cd> scratch;
  if (!f.poly.empty()) {
    DeltaTables tb = make_delta_tables(f, q, A, B, w, row, col);
    return delta_eval(tb, row, col, scratch);
  }
  if (row.d != 1)
    throw std::invalid_argument(
        "matrix_element: general symbols pair in one dimension; polynomial symbols cover two");
  PairingTables tb = make_pairing_tables(q, A, w, row, col);
  num::ComplexMatrix block;
  const double cxi = (1.0 - q.t) * row.ap[0] + q.t * col.ap[0];
  fill_symbol_block(tb, f, cxi, block);
  return pairing_eval(tb, block, cxi, col.ap[0] - row.ap[0], scratch);
}

OperatorMatrix assemble_matrix(const sym::Symbol& f, const QuantizationParams& q,
                               const mag::VectorPotential& A, const mag::MagneticField& B,
                               const frame::Window& w, const num::LatticeBox& box,
                               int nthreads) {
  q.validate();
  check_element_dims(f, A, B, w, box.d);
  if (box.count() > 2000)
    throw std::invalid_argument("assemble_matrix: box exceeds the dense cap of 2000 indices");

  OperatorMatrix mx;
  mx.box = box;
  mx.t = q.t;
  mx.symbol_label = f.label;
  mx.field_label = A.label;
  mx.xi_cutoff = q.xi_cutoff;
  mx.tail_tol = q.tail_tol;
  const std::size_t side = box.count();
  mx.m = num::ComplexMatrix(side, side);

  const int d = box.d;
  // positions and momenta range over the same sub-lattice, enumeration order
  std::vector<std::array<int, 2>> moms;
  if (d == 1) {
    for (int a = -box.R; a <= box.R; ++a) moms.push_back({a, 0});
  } else {
    for (int a0 = -box.R; a0 <= box.R; ++a0)
      for (int a1 = -box.R; a1 <= box.R; ++a1) moms.push_back({a0, a1});
  }
  const auto& poss = moms;

  const bool poly = !f.poly.empty();
  if (!poly && d != 1)
    throw std::invalid_argument(
        "assemble_matrix: general symbols pair in one dimension; polynomial symbols cover two");

  num::parallel_for(poss.size() * poss.size(), nthreads, [&](std::size_t task) {
    const std::size_t ia = task / poss.size(), ib = task % poss.size();
    num::FrameIndex row{d, poss[ia], {0, 0}};
    num::FrameIndex col{d, poss[ib], {0, 0}};
    std::vector<cd> scratch;

    if (poly) {
      DeltaTables tb = make_delta_tables(f, q, A, B, w, row, col);
      for (const auto& rap : moms) {
        row.ap = rap;
        const std::size_t r = num::lattice_offset(box, row);
        for (const auto& cap : moms) {
          col.ap = cap;
          mx.m.at(r, num::lattice_offset(box, col)) = delta_eval(tb, row, col, scratch);
        }
      }
      return;
    }

    PairingTables tb = make_pairing_tables(q, A, w, row, col);
    // group momentum pairs by their shared frequency center
    std::vector<std::tuple<double, int, int>> order;
    order.reserve(moms.size() * moms.size());
    for (const auto& rap : moms)
      for (const auto& cap : moms)
        order.emplace_back((1.0 - q.t) * rap[0] + q.t * cap[0], rap[0], cap[0]);
    std::sort(order.begin(), order.end());

    num::ComplexMatrix block;
    double have_cxi = std::numeric_limits<double>::quiet_NaN();
    for (const auto& [cxi, rap, cap] : order) {
      if (cxi != have_cxi) {
        fill_symbol_block(tb, f, cxi, block);
        have_cxi = cxi;
      }
      row.ap = {rap, 0};
      col.ap = {cap, 0};
      mx.m.at(num::lattice_offset(box, row), num::lattice_offset(box, col)) =
          pairing_eval(tb, block, cxi, cap - rap, scratch);
    }
  });
  return mx;
}

// ---------------------------------------------------------------------------
// inverses

namespace {

// Window overlap integral against e^{i omega w} over the admissible band of
// separations at offset du from the pair center.
cd separation_integral(const frame::Window& w, double t, double du, double omega, int base_order,
                       int max_nodes) {
  double lo = -2.0, hi = 2.0;
  if (t < 1.0) {
    lo = std::max(lo, (-1.0 - du) / (1.0 - t));
    hi = std::min(hi, (1.0 - du) / (1.0 - t));
  }
  if (t > 0.0) {
    lo = std::max(lo, (du - 1.0) / t);
    hi = std::min(hi, (du + 1.0) / t);
  }
  if (!(lo < hi)) return {0.0, 0.0};
  const int order =
      base_order + static_cast<int>(std::ceil(4.0 * std::abs(omega) * (hi - lo) / kTwoPi));
  if (order > max_nodes)
    throw std::invalid_argument(
        "inverse_rank_one: frequency offset beyond the resolvable band; raise max_zeta_nodes");
  std::vector<double> gn, gw;
  num::gauss_legendre(order, gn, gw);
  cd acc{0.0, 0.0};
  for (std::size_t j = 0; j < gn.size(); ++j) {
    const double wv = 0.5 * (hi + lo) + 0.5 * (hi - lo) * gn[j];
    const double gg = w.g1(du + (1.0 - t) * wv) * w.g1(du - t * wv);
    if (gg != 0.0) acc += 0.5 * (hi - lo) * gw[j] * std::polar(gg, omega * wv);
  }
  return acc;
}

void check_sampling(const frame::Window& w, const mag::VectorPotential& A, const num::Grid& xgrid,
                    const num::Grid& xigrid, const char* who) {
  if (w.d != 1 || A.d != 1 || xgrid.d != 1 || xigrid.d != 1)
    throw std::invalid_argument(std::string(who) + ": phase-space sampling is one dimensional");
}

}  // namespace

SymbolSamples inverse_rank_one(const frame::Window& w, const mag::VectorPotential& A,
                               const QuantizationParams& q, const num::FrameIndex& row,
                               const num::FrameIndex& col, const num::Grid& xgrid,
                               const num::Grid& xigrid) {
  q.validate();
  check_sampling(w, A, xgrid, xigrid, "inverse_rank_one");
  if (row.d != 1 || col.d != 1)
    throw std::invalid_argument("inverse_rank_one: indices must be one dimensional");

  const double t = q.t;
  const double alpha = row.a[0], alphap = row.ap[0];
  const double beta = col.a[0], betap = col.ap[0];
  const double cx = t * alpha + (1.0 - t) * beta;
  const double cxi = (1.0 - t) * alphap + t * betap;

  double base_ph = beta * betap - alpha * alphap;
  if (!A.is_zero()) {
    double bv[1] = {beta}, av[1] = {alpha};
    base_ph += mag::circulation(A, bv, av, q.flux_order);
  }
  const cd pref = pref_pow(1) * std::polar(1.0, base_ph);

  SymbolSamples out;
  out.xgrid = xgrid;
  out.xigrid = xigrid;
  out.values.assign(xgrid.n * xigrid.n, cd{0.0, 0.0});
  for (std::size_t ix = 0; ix < xgrid.n; ++ix) {
    const double u = xgrid.coord(ix);
    const double du = u - cx;
    if (std::abs(du) >= 1.0) continue;  // outside the overlap, exactly zero
    const cd up = std::polar(1.0, u * (alphap - betap));
    for (std::size_t ixi = 0; ixi < xigrid.n; ++ixi) {
      const double omega = cxi - xigrid.coord(ixi);
      const cd sep = separation_integral(w, t, du, omega, q.v_order, q.max_zeta_nodes);
      out.at(ix, ixi) = pref * up * std::polar(1.0, omega * (alpha - beta)) * sep;
    }
  }
  return out;
}

SymbolSamples inverse_kernel_symbol(const KernelSamples& k, const mag::VectorPotential& A,
                                    const QuantizationParams& q, const num::Grid& xgrid,
                                    const num::Grid& xigrid) {
  q.validate();
  if (A.d != 1 || xgrid.d != 1 || xigrid.d != 1 || k.grid.d != 1)
    throw std::invalid_argument("inverse_kernel_symbol: phase-space sampling is one dimensional");
  const double h = k.grid.h();
  const double nyq = kTwoPi / (2.0 * h);
  if (std::max(std::abs(xigrid.coord(0)), std::abs(xigrid.coord(xigrid.n - 1))) > nyq)
    throw std::invalid_argument("inverse_kernel_symbol: xi grid exceeds the kernel sampling band");

  const double t = q.t;
  const double gl = -k.grid.L, gh = k.grid.L - h;
  // bilinear read of the kernel table
  auto kat = [&](double x, double y) -> cd {
    const double fx = (x - gl) / h, fy = (y - gl) / h;
    const auto i0 = static_cast<std::ptrdiff_t>(std::floor(fx));
    const auto j0 = static_cast<std::ptrdiff_t>(std::floor(fy));
    if (i0 < 0 || j0 < 0 || i0 + 1 >= static_cast<std::ptrdiff_t>(k.grid.n) ||
        j0 + 1 >= static_cast<std::ptrdiff_t>(k.grid.n))
      return {0.0, 0.0};
    const double ax = fx - static_cast<double>(i0), ay = fy - static_cast<double>(j0);
    const auto i = static_cast<std::size_t>(i0), j = static_cast<std::size_t>(j0);
    return (1.0 - ax) * ((1.0 - ay) * k.k.at(i, j) + ay * k.k.at(i, j + 1)) +
           ax * ((1.0 - ay) * k.k.at(i + 1, j) + ay * k.k.at(i + 1, j + 1));
  };

  SymbolSamples out;
  out.xgrid = xgrid;
  out.xigrid = xigrid;
  out.values.assign(xgrid.n * xigrid.n, cd{0.0, 0.0});
  for (std::size_t ix = 0; ix < xgrid.n; ++ix) {
    const double u = xgrid.coord(ix);
    double vlo = gl - gh, vhi = gh - gl;
    if (t < 1.0) {
      vlo = std::max(vlo, (gl - u) / (1.0 - t));
      vhi = std::min(vhi, (gh - u) / (1.0 - t));
    }
    if (t > 0.0) {
      vlo = std::max(vlo, (u - gh) / t);
      vhi = std::min(vhi, (u - gl) / t);
    }
    if (!(vlo < vhi)) continue;
    const auto steps = static_cast<std::size_t>(std::floor((vhi - vlo) / h));
    std::vector<cd> row(steps + 1);
    for (std::size_t s = 0; s <= steps; ++s) {
      const double v = vlo + h * static_cast<double>(s);
      const double x = u + (1.0 - t) * v, y = u - t * v;
      cd kv = kat(x, y);
      if (kv != cd{0.0, 0.0} && !A.is_zero()) {
        double xa[1] = {x}, ya[1] = {y};
        kv *= std::polar(1.0, -mag::circulation(A, xa, ya, q.flux_order));
      }
      row[s] = kv;
    }
    for (std::size_t ixi = 0; ixi < xigrid.n; ++ixi) {
      const double xi = xigrid.coord(ixi);
      cd acc{0.0, 0.0};
      for (std::size_t s = 0; s <= steps; ++s) {
        const double v = vlo + h * static_cast<double>(s);
        const double trap = (s == 0 || s == steps) ? 0.5 : 1.0;
        acc += trap * row[s] * std::polar(1.0, -xi * v);
      }
      out.at(ix, ixi) = h * acc;
    }
  }
  return out;
}

SymbolSamples synthesize_symbol(const OperatorMatrix& mx, const frame::Window& w,
                                const mag::VectorPotential& A, const QuantizationParams& q,
                                const num::Grid& xgrid, const num::Grid& xigrid, int nthreads) {
  q.validate();
  check_sampling(w, A, xgrid, xigrid, "synthesize_symbol");
  if (mx.box.d != 1)
    throw std::invalid_argument("synthesize_symbol: phase-space sampling is one dimensional");
  const std::size_t side = mx.box.count();
  if (mx.m.rows != side || mx.m.cols != side)
    throw std::invalid_argument("synthesize_symbol: matrix does not match its box");

  const double t = mx.t;
  const int R = mx.box.R;
  const int width = 2 * R + 1;

  // center circulation phases, shared across sample points
  std::vector<double> phi(static_cast<std::size_t>(width) * width, 0.0);
  if (!A.is_zero()) {
    for (int a = -R; a <= R; ++a)
      for (int b = -R; b <= R; ++b) {
        double bv[1] = {static_cast<double>(b)}, av[1] = {static_cast<double>(a)};
        phi[static_cast<std::size_t>(a + R) * width + (b + R)] =
            mag::circulation(A, bv, av, q.flux_order);
      }
  }

  SymbolSamples out;
  out.xgrid = xgrid;
  out.xigrid = xigrid;
  out.values.assign(xgrid.n * xigrid.n, cd{0.0, 0.0});
  const double pref = pref_pow(1);

  num::parallel_for(out.values.size(), nthreads, [&](std::size_t slot) {
    const std::size_t ix = slot / xigrid.n, ixi = slot % xigrid.n;
    const double u = xgrid.coord(ix);
    const double xi = xigrid.coord(ixi);
    cd acc{0.0, 0.0};
    std::vector<std::pair<double, cd>> sep_cache;
    num::FrameIndex row{1, {0, 0}, {0, 0}}, col{1, {0, 0}, {0, 0}};
    for (int a = -R; a <= R; ++a) {
      row.a[0] = a;
      for (int b = -R; b <= R; ++b) {
        const double cx = t * a + (1.0 - t) * b;
        const double du = u - cx;
        if (std::abs(du) >= 1.0) continue;
        col.a[0] = b;
        const double base_ph0 = phi[static_cast<std::size_t>(a + R) * width + (b + R)];
        sep_cache.clear();
        for (int ap = -R; ap <= R; ++ap) {
          row.ap[0] = ap;
          const std::size_t r = num::lattice_offset(mx.box, row);
          for (int bp = -R; bp <= R; ++bp) {
            col.ap[0] = bp;
            const cd entry = mx.m.at(r, num::lattice_offset(mx.box, col));
            if (entry == cd{0.0, 0.0}) continue;
            const double cxi = (1.0 - t) * ap + t * bp;
            const double omega = cxi - xi;
            cd sep{0.0, 0.0};
            bool found = false;
            for (const auto& [key, val] : sep_cache)
              if (key == cxi) {
                sep = val;
                found = true;
                break;
              }
            if (!found) {
              sep = separation_integral(w, t, du, omega, q.v_order, q.max_zeta_nodes);
              sep_cache.emplace_back(cxi, sep);
            }
            const double ph =
                base_ph0 + b * bp - a * ap + u * (ap - bp) + omega * (a - b);
            acc += entry * std::polar(1.0, ph) * sep;
          }
        }
      }
    }
    out.values[slot] = pref * acc;
  });
  return out;
}

namespace {

// Catmull-Rom weights at local offset tau in [0, 1] between the middle two
// stencil points.
void spline_weights(double tau, double* w4) {
  const double t2 = tau * tau, t3 = t2 * tau;
  w4[0] = -0.5 * t3 + t2 - 0.5 * tau;
  w4[1] = 1.5 * t3 - 2.5 * t2 + 1.0;
  w4[2] = -1.5 * t3 + 2.0 * t2 + 0.5 * tau;
  w4[3] = 0.5 * t3 - 0.5 * t2;
}

// Stencil base and weights for a query on a uniform grid; false when the
// query lies outside the sampled range.
bool spline_setup(const num::Grid& g, double v, std::ptrdiff_t& base, double* w4) {
  const double u = (v + g.L) / g.h();
  if (u < 0.0 || u > double(g.n - 1)) return false;
  std::ptrdiff_t cell = std::ptrdiff_t(std::floor(u));
  if (cell > std::ptrdiff_t(g.n) - 2) cell = std::ptrdiff_t(g.n) - 2;
  spline_weights(u - double(cell), w4);
  base = cell - 1;
  return true;
}

std::size_t clamp_index(std::ptrdiff_t i, std::size_t n) {
  if (i < 0) return 0;
  if (i >= std::ptrdiff_t(n)) return n - 1;
  return std::size_t(i);
}

}  // namespace

sym::Symbol sampled_symbol(const SymbolSamples& s, const std::string& label) {
  if (s.xgrid.d != 1 || s.xigrid.d != 1)
    throw std::invalid_argument("sampled symbols take one-dimensional grids");
  if (s.values.size() != s.xgrid.size() * s.xigrid.size())
    throw std::invalid_argument("sample count does not match the grids");
  sym::Symbol f;
  f.d = 1;
  f.label = label;
  f.weight = wts::one(1);
  f.eval = [s](const double* x, const double* xi) -> cd {
    double wx[4], wk[4];
    std::ptrdiff_t bx = 0, bk = 0;
    if (!spline_setup(s.xgrid, x[0], bx, wx)) return {0.0, 0.0};
    if (!spline_setup(s.xigrid, xi[0], bk, wk)) return {0.0, 0.0};
    cd acc{0.0, 0.0};
    for (int i = 0; i < 4; ++i) {
      const std::size_t ix = clamp_index(bx + i, s.xgrid.n);
      for (int j = 0; j < 4; ++j) acc += wx[i] * wk[j] * s.at(ix, clamp_index(bk + j, s.xigrid.n));
    }
    return acc;
  };
  return f;
}

}  // namespace magpdo::quant
