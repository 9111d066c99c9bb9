#include "magpdo/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "magpdo/kernels.hpp"

namespace magpdo::num {

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (int i = 0; i < d; ++i) s *= n;
  return s;
}

void Grid::point(std::size_t flat, double* out) const {
  if (d == 1) {
    out[0] = coord(flat);
    return;
  }
  out[0] = coord(flat / n);
  out[1] = coord(flat % n);
}

GridFunction GridFunction::zero(const Grid& g) {
  GridFunction f;
  f.grid = g;
  f.values.assign(g.size(), cd(0.0, 0.0));
  return f;
}

GridFunction GridFunction::sample(const Grid& g, const PointFn& fn) {
  GridFunction f;
  f.grid = g;
  f.values.resize(g.size());
  double x[2];
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    g.point(k, x);
    f.values[k] = fn(x);
  }
  return f;
}

double GridFunction::norm() const {
  double hd = std::pow(grid.h(), grid.d);
  return std::sqrt(hd * kernels::cnorm2sq(values.data(), values.size()));
}

cd GridFunction::inner(const GridFunction& g) const {
  double hd = std::pow(grid.h(), grid.d);
  return hd * kernels::cdotc(values.data(), g.values.data(), values.size());
}

std::size_t LatticeBox::count() const {
  std::size_t side = static_cast<std::size_t>(2 * R + 1);
  std::size_t c = 1;
  for (int i = 0; i < 2 * d; ++i) c *= side;
  return c;
}

std::vector<FrameIndex> enumerate_lattice(const LatticeBox& box) {
  std::vector<FrameIndex> out;
  out.reserve(box.count());
  const int R = box.R;
  // lexicographic over the concatenated tuple (a, ap)
  if (box.d == 1) {
    for (int a0 = -R; a0 <= R; ++a0)
      for (int p0 = -R; p0 <= R; ++p0) {
        FrameIndex idx;
        idx.d = 1;
        idx.a = {a0, 0};
        idx.ap = {p0, 0};
        out.push_back(idx);
      }
    return out;
  }
  for (int a0 = -R; a0 <= R; ++a0)
    for (int a1 = -R; a1 <= R; ++a1)
      for (int p0 = -R; p0 <= R; ++p0)
        for (int p1 = -R; p1 <= R; ++p1) {
          FrameIndex idx;
          idx.d = 2;
          idx.a = {a0, a1};
          idx.ap = {p0, p1};
          out.push_back(idx);
        }
  return out;
}

std::size_t lattice_offset(const LatticeBox& box, const FrameIndex& idx) {
  if (idx.d != box.d) throw std::invalid_argument("lattice_offset: dimension mismatch");
  const int R = box.R;
  const std::size_t side = static_cast<std::size_t>(2 * R + 1);
  std::size_t off = 0;
  for (int i = 0; i < box.d; ++i) {
    if (idx.a[i] < -R || idx.a[i] > R) throw std::invalid_argument("lattice_offset: index outside box");
    off = off * side + static_cast<std::size_t>(idx.a[i] + R);
  }
  for (int i = 0; i < box.d; ++i) {
    if (idx.ap[i] < -R || idx.ap[i] > R) throw std::invalid_argument("lattice_offset: index outside box");
    off = off * side + static_cast<std::size_t>(idx.ap[i] + R);
  }
  return off;
}

double ComplexMatrix::frobenius() const { return std::sqrt(kernels::cnorm2sq(a.data(), a.size())); }

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  static std::mutex mu;
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) {
      nodes = it->second.first;
      weights = it->second.second;
      return;
    }
  }
  const int n = order;
  std::vector<double> x(n), w(n);
  // Newton on P_n with the Tricomi initial guess; only the lower half is
  // solved, the rest mirrored so symmetric integrands cancel exactly.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p0 = 0, p1 = 0;
    for (int iter = 0; iter < 100; ++iter) {
      p0 = 1.0;
      p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
      }
      double dp = n * (t * p0 - p1) / (t * t - 1.0);
      double dt = p0 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) {
        p0 = 1.0;
        p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
        }
        break;
      }
    }
    double dp = n * (t * p0 - p1) / (t * t - 1.0);
    x[i] = -std::abs(t);
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    x[n - 1 - i] = -x[i];
    w[n - 1 - i] = w[i];
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  std::lock_guard<std::mutex> lock(mu);
  cache[order] = {x, w};
  nodes = x;
  weights = w;
}

namespace {

[[noreturn]] void nonfinite_node(const double* x, int d) {
  std::ostringstream os;
  os << "quad_box: non-finite integrand value at node (";
  for (int i = 0; i < d; ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  throw std::runtime_error(os.str());
}

cd tensor_quad(const PointFn& f, const Box& box, const int* order_per_axis) {
  std::vector<double> nd0, wt0, nd1, wt1;
  gauss_legendre(order_per_axis[0], nd0, wt0);
  const double c0 = 0.5 * (box.lo[0] + box.hi[0]), s0 = 0.5 * (box.hi[0] - box.lo[0]);
  if (box.d == 1) {
    std::vector<cd> vals(nd0.size());
    std::vector<double> w(nd0.size());
    double x[1];
    for (std::size_t i = 0; i < nd0.size(); ++i) {
      x[0] = c0 + s0 * nd0[i];
      cd v = f(x);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) nonfinite_node(x, 1);
      vals[i] = v;
      w[i] = wt0[i] * s0;
    }
    return kernels::cwsum(w.data(), vals.data(), vals.size());
  }
  gauss_legendre(order_per_axis[1], nd1, wt1);
  const double c1 = 0.5 * (box.lo[1] + box.hi[1]), s1 = 0.5 * (box.hi[1] - box.lo[1]);
  std::vector<cd> rows(nd0.size());
  std::vector<cd> vals(nd1.size());
  std::vector<double> w1(nd1.size());
  for (std::size_t j = 0; j < nd1.size(); ++j) w1[j] = wt1[j] * s1;
  double x[2];
  for (std::size_t i = 0; i < nd0.size(); ++i) {
    x[0] = c0 + s0 * nd0[i];
    for (std::size_t j = 0; j < nd1.size(); ++j) {
      x[1] = c1 + s1 * nd1[j];
      cd v = f(x);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) nonfinite_node(x, 2);
      vals[j] = v;
    }
    rows[i] = kernels::cwsum(w1.data(), vals.data(), vals.size());
  }
  std::vector<double> w0(nd0.size());
  for (std::size_t i = 0; i < nd0.size(); ++i) w0[i] = wt0[i] * s0;
  return kernels::cwsum(w0.data(), rows.data(), rows.size());
}

}  // namespace

cd quad_box(const PointFn& f, const Box& box, int order) {
  if (order < 2) throw std::invalid_argument("quad_box: order must be >= 2");
  for (int i = 0; i < box.d; ++i)
    if (!(box.hi[i] > box.lo[i])) throw std::invalid_argument("quad_box: degenerate box");
  int orders[2] = {order, order};
  return tensor_quad(f, box, orders);
}

cd oscillatory_dv_integral(const PointFn& F, const double* zeta, const Box& box, int base_order,
                           int max_nodes) {
  int orders[2];
  for (int i = 0; i < box.d; ++i) {
    double width = box.hi[i] - box.lo[i];
    double cycles = std::abs(zeta[i]) * width / (2.0 * M_PI);
    long need = base_order + static_cast<long>(std::ceil(4.0 * cycles));
    if (need > max_nodes) {
      double limit = (max_nodes - base_order) * 2.0 * M_PI / (4.0 * width);
      std::ostringstream os;
      os << "oscillatory_dv_integral: |zeta_" << i << "| = " << std::abs(zeta[i])
         << " exceeds the resolvable limit " << limit << " for a budget of " << max_nodes
         << " nodes per axis";
      throw std::runtime_error(os.str());
    }
    orders[i] = static_cast<int>(need);
  }
  auto g = [&](const double* v) -> cd {
    double phase = 0.0;
    for (int i = 0; i < box.d; ++i) phase += zeta[i] * v[i];
    return std::polar(1.0, phase) * F(v);
  };
  return tensor_quad(g, box, orders);
}

void scaled_panel_rule(double X, double rate, int base_order, int max_nodes,
                       std::vector<double>& nodes, std::vector<double>& weights) {
  if (!(X > 0.0)) throw std::invalid_argument("scaled_panel_rule: X must be positive");
  std::vector<double> edges{0.0};
  double e = 0.0, step = 2.0;
  while (e < X) {
    e += step;
    if (e >= 12.0) step *= 2.0;
    edges.push_back(std::min(e, X));
  }

  const int per_base = std::max(8, base_order / 4);
  long total = 0;
  std::vector<int> order(edges.size() - 1);
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double len = edges[p + 1] - edges[p];
    order[p] = per_base + static_cast<int>(std::ceil(4.0 * len * std::abs(rate) / (2.0 * M_PI)));
    total += 2 * order[p];
  }
  if (total > max_nodes) {
    std::ostringstream os;
    os << "scaled_panel_rule: " << total << " nodes needed for X = " << X << ", rate = " << rate
       << " but the cap is " << max_nodes;
    throw std::invalid_argument(os.str());
  }

  nodes.clear();
  weights.clear();
  nodes.reserve(total);
  weights.reserve(total);
  std::vector<double> gn, gw;
  // negative panels first so the node sequence is increasing
  for (std::size_t p = edges.size() - 1; p-- > 0;) {
    gauss_legendre(order[p], gn, gw);
    const double c = 0.5 * (edges[p] + edges[p + 1]), h = 0.5 * (edges[p + 1] - edges[p]);
    for (std::size_t i = 0; i < gn.size(); ++i) {
      nodes.push_back(-c + h * gn[i]);
      weights.push_back(h * gw[i]);
    }
  }
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    gauss_legendre(order[p], gn, gw);
    const double c = 0.5 * (edges[p] + edges[p + 1]), h = 0.5 * (edges[p + 1] - edges[p]);
    for (std::size_t i = 0; i < gn.size(); ++i) {
      nodes.push_back(c + h * gn[i]);
      weights.push_back(h * gw[i]);
    }
  }
}

void fft_pow2(std::vector<cd>& a, int sign) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft_pow2: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = sign * 2.0 * M_PI / static_cast<double>(len);
    cd wlen = std::polar(1.0, ang);
    for (std::size_t i = 0; i < n; i += len) {
      cd w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        cd u = a[i + j];
        cd v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

namespace {

void check_finite(const ComplexMatrix& A, const char* who) {
  for (const cd& v : A.a)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::runtime_error(std::string(who) + ": non-finite matrix entry");
}

}  // namespace

std::vector<double> singular_values(const ComplexMatrix& A) {
  check_finite(A, "singular_values");
  // Work on columns of the tall orientation; singular values are shared with
  // the conjugate transpose.
  std::size_t m = A.rows, n = A.cols;
  bool flip = m < n;
  if (flip) std::swap(m, n);
  std::vector<std::vector<cd>> col(n, std::vector<cd>(m));
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) {
      cd v = A.at(i, j);
      if (flip)
        col[i][j] = std::conj(v);
      else
        col[j][i] = v;
    }

  const double tol = 1e-14;
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double app = kernels::cnorm2sq(col[p].data(), m);
        double aqq = kernels::cnorm2sq(col[q].data(), m);
        cd apq = kernels::cdotc(col[p].data(), col[q].data(), m);
        double g = std::abs(apq);
        if (g <= tol * std::sqrt(app * aqq) || g == 0.0) continue;
        rotated = true;
        // phase-rotate column q so the pair problem is real symmetric
        cd u = std::conj(apq) / g;
        double tau = (aqq - app) / (2.0 * g);
        double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        for (std::size_t i = 0; i < m; ++i) {
          cd cp = col[p][i];
          cd cq = u * col[q][i];
          col[p][i] = c * cp - s * cq;
          col[q][i] = s * cp + c * cq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) sv[j] = std::sqrt(kernels::cnorm2sq(col[j].data(), m));
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

double top_singular_value(const ComplexMatrix& A, int max_iter, double tol) {
  check_finite(A, "top_singular_value");
  const std::size_t m = A.rows, n = A.cols;
  std::vector<cd> x(n, cd(1.0, 0.0)), y(m), z(n);
  double sigma = 0.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    for (std::size_t i = 0; i < m; ++i) y[i] = kernels::cdotu(&A.a[i * n], x.data(), n);
    // z = A^H y, accumulated as conj(sum_i conj(y_i) A_{i,:})
    std::fill(z.begin(), z.end(), cd(0, 0));
    for (std::size_t i = 0; i < m; ++i) kernels::caxpy(std::conj(y[i]), &A.a[i * n], z.data(), n);
    for (std::size_t j = 0; j < n; ++j) z[j] = std::conj(z[j]);
    double ny = std::sqrt(kernels::cnorm2sq(y.data(), m));
    double nz = std::sqrt(kernels::cnorm2sq(z.data(), n));
    if (nz == 0.0) return 0.0;
    double next = (ny > 0.0) ? nz / ny : 0.0;  // Rayleigh estimate of sigma
    kernels::cscale(cd(1.0 / nz, 0.0), z.data(), n);
    x.swap(z);
    if (iter > 2 && std::abs(next - sigma) <= tol * std::max(1.0, next)) return next;
    sigma = next;
  }
  return sigma;
}

namespace {

template <class T>
T pairwise_impl(const T* x, std::size_t n) {
  if (n == 0) return T(0);
  if (n <= 8) {
    T s = x[0];
    for (std::size_t i = 1; i < n; ++i) s += x[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_impl(x, half) + pairwise_impl(x + half, n - half);
}

}  // namespace

double pairwise_sum(const double* x, std::size_t n) { return pairwise_impl(x, n); }
cd pairwise_sum(const cd* x, std::size_t n) { return pairwise_impl(x, n); }

void parallel_for(std::size_t total, int nthreads, const std::function<void(std::size_t)>& body) {
  if (total == 0) return;
  std::size_t workers = static_cast<std::size_t>(std::max(1, nthreads));
  if (workers > total) workers = total;
  if (workers == 1) {
    for (std::size_t i = 0; i < total; ++i) body(i);
    return;
  }
  std::size_t chunk = (total + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(workers, nullptr);
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk, hi = std::min(total, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi, w] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace magpdo::num
