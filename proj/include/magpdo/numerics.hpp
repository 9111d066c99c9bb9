#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

// Shared numerical substrate: uniform box grids, tensor Gauss-Legendre
// quadrature, oscillatory integrals by Nyquist-dense sampling, a radix-2 FFT,
// dense complex SVD (one-sided Jacobi), lattice enumeration, and fixed-order
// reductions used to keep parallel runs bit-identical.

namespace magpdo::num {

using cd = std::complex<double>;

// Point evaluator for integrands and samplers; receives d coordinates.
using PointFn = std::function<cd(const double*)>;

struct Grid {
  int d = 1;          // 1 or 2
  double L = 8.0;     // half extent, box is [-L, L)^d
  std::size_t n = 256;  // points per axis

  double h() const { return 2.0 * L / static_cast<double>(n); }
  std::size_t size() const;
  // nodes are x_k = -L + k h per axis
  double coord(std::size_t k) const { return -L + h() * static_cast<double>(k); }
  void point(std::size_t flat, double* out) const;  // row-major decode
};

struct GridFunction {
  Grid grid;
  std::vector<cd> values;

  static GridFunction zero(const Grid& g);
  static GridFunction sample(const Grid& g, const PointFn& f);

  double norm() const;                      // sqrt(h^d sum |v|^2)
  cd inner(const GridFunction& g) const;    // h^d sum conj(this) * g
};

struct FrameIndex {
  int d = 1;
  std::array<int, 2> a{0, 0};    // position index alpha
  std::array<int, 2> ap{0, 0};   // momentum index alpha'

  bool operator==(const FrameIndex&) const = default;
};

struct LatticeBox {
  int d = 1;
  int R = 0;  // coordinates range over [-R, R]

  std::size_t count() const;  // (2R+1)^{2d}
};

// Deterministic lexicographic order over (a_1..a_d, ap_1..ap_d).
std::vector<FrameIndex> enumerate_lattice(const LatticeBox& box);

// Position of idx in enumerate_lattice(box); throws if out of the box.
std::size_t lattice_offset(const LatticeBox& box, const FrameIndex& idx);

struct ComplexMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<cd> a;  // row-major

  ComplexMatrix() = default;
  ComplexMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}
  cd& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  const cd& at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
  double frobenius() const;
};

struct Box {
  int d = 1;
  std::array<double, 2> lo{0, 0}, hi{0, 0};
};

// Nodes and weights on [-1,1], exactly symmetric about 0. Cached per order.
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

// Tensor Gauss-Legendre integral of f over the box. Throws on a non-finite
// integrand value, naming the node.
cd quad_box(const PointFn& f, const Box& box, int order);

// Integral of e^{i zeta.v} F(v) over the box, with at least four nodes per
// oscillation period per axis on top of base_order. Throws when the needed
// node count exceeds max_nodes, naming the resolvable frequency limit.
cd oscillatory_dv_integral(const PointFn& F, const double* zeta, const Box& box,
                           int base_order = 48, int max_nodes = 4096);

// Gauss-Legendre rule on [-X, X] in panels of width two out to |xi| = 12,
// doubling after that. Each panel gets base_order/4 nodes plus four per
// oscillation period at frequency `rate`, so integrands with unit scale
// structure near zero, poles within a few units of the axis, or an
// e^{i rate xi} factor stay resolved where a single global rule stalls.
// Throws when the total node count would exceed max_nodes.
void scaled_panel_rule(double X, double rate, int base_order, int max_nodes,
                       std::vector<double>& nodes, std::vector<double>& weights);

// In-place radix-2 FFT, n a power of two. sign=-1: X_k = sum x_j e^{-2pi i jk/n};
// sign=+1 is its unnormalized inverse (divide by n afterwards).
void fft_pow2(std::vector<cd>& a, int sign);

// Singular values, descending, length min(rows, cols). One-sided Jacobi.
std::vector<double> singular_values(const ComplexMatrix& A);

// Top singular value by power iteration on A*A with a fixed start vector.
double top_singular_value(const ComplexMatrix& A, int max_iter = 5000, double tol = 1e-12);

// Fixed-shape pairwise tree reductions (deterministic at any thread count).
double pairwise_sum(const double* x, std::size_t n);
cd pairwise_sum(const cd* x, std::size_t n);

// Runs body(i) for i in [0, total) on up to nthreads threads over contiguous
// chunks. Rethrows the first exception. Writes must go to disjoint slots.
void parallel_for(std::size_t total, int nthreads, const std::function<void(std::size_t)>& body);

}  // namespace magpdo::num
