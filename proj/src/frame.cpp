#include "magpdo/frame.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "magpdo/kernels.hpp"

namespace magpdo::frame {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// bump seed: exp(-1/(1-t^2)) on (-1,1), zero outside
double bump(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - t * t));
}

// sum_k bump(x-k)^2; at most two integer shifts overlap any x
double bump_sq_sum(double x) {
  const double k0 = std::floor(x);
  const double b0 = bump(x - k0);
  const double b1 = bump(x - k0 - 1.0);
  return b0 * b0 + b1 * b1;
}

double pref_pow(int d) {
  // (2 pi)^(-d/2)
  return d == 1 ? 1.0 / std::sqrt(kTwoPi) : 1.0 / kTwoPi;
}

void check_dims(const Window& w, const mag::VectorPotential& A, int d, const char* who) {
  if (w.d != d || A.d != d) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

void check_coverage(const num::Grid& grid, int amax, const char* who) {
  const double need = static_cast<double>(amax) + 1.0;
  if (grid.L < need)
    throw std::invalid_argument(std::string(who) + ": grid half extent " + std::to_string(grid.L) +
                                " too small; the element support needs at least " +
                                std::to_string(need));
}

void check_resolution(const num::Grid& grid, int R, const char* who) {
  if (R < 1) return;
  const double hmax = M_PI / (2.0 * static_cast<double>(R));
  if (grid.h() > hmax * (1.0 + 1e-12))
    throw std::invalid_argument(std::string(who) + ": grid spacing " + std::to_string(grid.h()) +
                                " cannot resolve modulations up to R=" + std::to_string(R) +
                                "; need h <= " + std::to_string(hmax));
}

}  // namespace

double Window::g1(double t) const {
  const double b = bump(t);
  if (b == 0.0) return 0.0;
  return b / std::sqrt(bump_sq_sum(t));
}

double Window::g(const double* x) const {
  double v = 1.0;
  for (int i = 0; i < d; ++i) {
    v *= g1(x[i]);
    if (v == 0.0) return 0.0;
  }
  return v;
}

Window build_window(int d) {
  if (d != 1 && d != 2) throw std::invalid_argument("build_window: d must be 1 or 2");
  Window w;
  w.d = d;
  return w;
}

cd frame_point(const Window& w, const mag::VectorPotential& A, const num::FrameIndex& idx,
               const double* x) {
  double alpha[2] = {0.0, 0.0};
  double rel[2] = {0.0, 0.0};
  for (int i = 0; i < w.d; ++i) {
    alpha[i] = static_cast<double>(idx.a[i]);
    rel[i] = x[i] - alpha[i];
    if (std::abs(rel[i]) >= 1.0) return cd(0.0, 0.0);
  }
  const double gv = w.g(rel);
  if (gv == 0.0) return cd(0.0, 0.0);
  double theta = A.is_zero() ? 0.0 : mag::circulation(A, x, alpha);
  for (int i = 0; i < w.d; ++i) theta += static_cast<double>(idx.ap[i]) * rel[i];
  return std::polar(pref_pow(w.d) * gv, theta);
}

FrameVector frame_vector(const Window& w, const mag::VectorPotential& A,
                         const num::FrameIndex& idx, const num::Grid& grid) {
  check_dims(w, A, grid.d, "frame_vector");
  if (idx.d != grid.d) throw std::invalid_argument("frame_vector: dimension mismatch");
  int amax = 0;
  for (int i = 0; i < grid.d; ++i) amax = std::max(amax, std::abs(idx.a[i]));
  check_coverage(grid, amax, "frame_vector");

  FrameVector fv;
  fv.index = idx;
  fv.realization = num::GridFunction::zero(grid);
  double x[2];
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid.point(k, x);
    fv.realization.values[k] = frame_point(w, A, idx, x);
  }
  return fv;
}

CoefficientSet analyze(const num::GridFunction& f, const Window& w, const mag::VectorPotential& A,
                       const num::LatticeBox& box, int nthreads) {
  const num::Grid& grid = f.grid;
  check_dims(w, A, grid.d, "analyze");
  if (box.d != grid.d) throw std::invalid_argument("analyze: dimension mismatch");
  check_coverage(grid, box.R, "analyze");
  check_resolution(grid, box.R, "analyze");

  const auto indices = num::enumerate_lattice(box);
  CoefficientSet out;
  out.box = box;
  out.values.assign(indices.size(), cd(0.0, 0.0));

  const double h = grid.h();
  const double hd = grid.d == 1 ? h : h * h;
  const int n = static_cast<int>(grid.n);

  num::parallel_for(indices.size(), nthreads, [&](std::size_t ii) {
    const num::FrameIndex& idx = indices[ii];
    int lo[2] = {0, 0};
    int hi[2] = {0, 0};
    for (int i = 0; i < grid.d; ++i) {
      const double a = static_cast<double>(idx.a[i]);
      lo[i] = std::max(0, static_cast<int>(std::ceil((a - 1.0 + grid.L) / h)));
      hi[i] = std::min(n - 1, static_cast<int>(std::floor((a + 1.0 + grid.L) / h)));
    }
    double x[2];
    if (grid.d == 1) {
      const std::size_t m = static_cast<std::size_t>(hi[0] - lo[0] + 1);
      std::vector<cd> gbuf(m);
      for (int k = lo[0]; k <= hi[0]; ++k) {
        x[0] = grid.coord(k);
        gbuf[static_cast<std::size_t>(k - lo[0])] = frame_point(w, A, idx, x);
      }
      out.values[ii] = hd * kernels::cdotc(gbuf.data(), f.values.data() + lo[0], m);
      return;
    }
    const std::size_t m0 = static_cast<std::size_t>(hi[0] - lo[0] + 1);
    const std::size_t m1 = static_cast<std::size_t>(hi[1] - lo[1] + 1);
    std::vector<cd> gbuf(m0 * m1);
    std::vector<cd> fbuf(m0 * m1);
    for (int k0 = lo[0]; k0 <= hi[0]; ++k0) {
      x[0] = grid.coord(k0);
      const std::size_t row = static_cast<std::size_t>(k0 - lo[0]) * m1;
      const std::size_t src = static_cast<std::size_t>(k0) * static_cast<std::size_t>(n) +
                              static_cast<std::size_t>(lo[1]);
      for (int k1 = lo[1]; k1 <= hi[1]; ++k1) {
        x[1] = grid.coord(k1);
        gbuf[row + static_cast<std::size_t>(k1 - lo[1])] = frame_point(w, A, idx, x);
      }
      for (std::size_t j = 0; j < m1; ++j) fbuf[row + j] = f.values[src + j];
    }
    out.values[ii] = hd * kernels::cdotc(gbuf.data(), fbuf.data(), m0 * m1);
  });
  return out;
}

num::GridFunction synthesize(const CoefficientSet& coeffs, const Window& w,
                             const mag::VectorPotential& A, const num::Grid& grid, int nthreads) {
  check_dims(w, A, grid.d, "synthesize");
  if (coeffs.box.d != grid.d) throw std::invalid_argument("synthesize: dimension mismatch");
  const int R = coeffs.box.R;
  check_coverage(grid, R, "synthesize");
  check_resolution(grid, R, "synthesize");
  if (coeffs.values.size() != coeffs.box.count())
    throw std::invalid_argument("synthesize: coefficient count does not match the box");

  num::GridFunction out = num::GridFunction::zero(grid);
  const std::size_t side = static_cast<std::size_t>(2 * R + 1);
  const double pref = pref_pow(grid.d);
  const bool flat = A.is_zero();

  num::parallel_for(grid.size(), nthreads, [&](std::size_t k) {
    double x[2];
    grid.point(k, x);
    cd acc(0.0, 0.0);
    if (grid.d == 1) {
      for (int a0 = -R; a0 <= R; ++a0) {
        const double dx = x[0] - static_cast<double>(a0);
        if (std::abs(dx) >= 1.0) continue;
        const double gv = w.g1(dx);
        if (gv == 0.0) continue;
        double alpha[1] = {static_cast<double>(a0)};
        const double phi = flat ? 0.0 : mag::circulation(A, x, alpha);
        const std::size_t base = static_cast<std::size_t>(a0 + R) * side;
        for (int p0 = -R; p0 <= R; ++p0) {
          const cd c = coeffs.values[base + static_cast<std::size_t>(p0 + R)];
          acc += c * std::polar(pref * gv, phi + static_cast<double>(p0) * dx);
        }
      }
    } else {
      for (int a0 = -R; a0 <= R; ++a0) {
        const double dx0 = x[0] - static_cast<double>(a0);
        if (std::abs(dx0) >= 1.0) continue;
        const double g0 = w.g1(dx0);
        if (g0 == 0.0) continue;
        for (int a1 = -R; a1 <= R; ++a1) {
          const double dx1 = x[1] - static_cast<double>(a1);
          if (std::abs(dx1) >= 1.0) continue;
          const double gv = g0 * w.g1(dx1);
          if (gv == 0.0) continue;
          double alpha[2] = {static_cast<double>(a0), static_cast<double>(a1)};
          const double phi = flat ? 0.0 : mag::circulation(A, x, alpha);
          const std::size_t base =
              (static_cast<std::size_t>(a0 + R) * side + static_cast<std::size_t>(a1 + R)) * side;
          for (int p0 = -R; p0 <= R; ++p0) {
            const double th0 = phi + static_cast<double>(p0) * dx0;
            const std::size_t row = (base + static_cast<std::size_t>(p0 + R)) * side;
            for (int p1 = -R; p1 <= R; ++p1) {
              const cd c = coeffs.values[row + static_cast<std::size_t>(p1 + R)];
              acc += c * std::polar(pref * gv, th0 + static_cast<double>(p1) * dx1);
            }
          }
        }
      }
    }
    out.values[k] = acc;
  });
  return out;
}

double parseval_defect(const num::GridFunction& f, const Window& w, const mag::VectorPotential& A,
                       const num::LatticeBox& box, int nthreads) {
  const double nf = f.norm();
  if (!(nf > 0.0)) throw std::runtime_error("parseval_defect: the function has zero norm");
  const CoefficientSet coeffs = analyze(f, w, A, box, nthreads);
  std::vector<double> mags(coeffs.values.size());
  for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::norm(coeffs.values[i]);
  const double s = num::pairwise_sum(mags.data(), mags.size());
  const double nf2 = nf * nf;
  return std::abs(nf2 - s) / nf2;
}

}  // namespace magpdo::frame
