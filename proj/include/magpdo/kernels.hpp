#pragma once

#include <complex>
#include <cstddef>

// Runtime-dispatched data-parallel primitives used by the quadrature,
// frame-analysis and matrix-assembly inner loops.
//
// Every reduction splits its input across four independent accumulators and
// combines them in a fixed order, and no path uses FMA contraction, so the
// scalar reference and the SIMD variants return bit-identical results.  The
// equivalence tests assert exact equality, and results do not depend on the
// thread count of the caller.

namespace magpdo::kernels {

using cd = std::complex<double>;

enum class Isa { Scalar, Avx2, Neon };

Isa active_isa();
const char* isa_name(Isa isa);

// Pins the scalar reference path (for tests and the --no-simd CLI switch).
// Not safe to toggle concurrently with running kernels.
void force_scalar(bool on);

double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double norm2sq(const double* x, std::size_t n);

cd cdotu(const cd* x, const cd* y, std::size_t n);      // sum x_i y_i
cd cdotc(const cd* x, const cd* y, std::size_t n);      // sum conj(x_i) y_i
cd cwsum(const double* w, const cd* f, std::size_t n);  // sum w_i f_i
double cnorm2sq(const cd* x, std::size_t n);

void caxpy(cd a, const cd* x, cd* y, std::size_t n);  // y += a*x
void cscale(cd a, cd* x, std::size_t n);

namespace detail {

struct Impl {
  double (*sum)(const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*norm2sq)(const double*, std::size_t);
  cd (*cdotu)(const cd*, const cd*, std::size_t);
  cd (*cdotc)(const cd*, const cd*, std::size_t);
  cd (*cwsum)(const double*, const cd*, std::size_t);
  double (*cnorm2sq)(const cd*, std::size_t);
  void (*caxpy)(cd, const cd*, cd*, std::size_t);
  void (*cscale)(cd, cd*, std::size_t);
};

const Impl& scalar_impl();
const Impl* avx2_impl();  // nullptr when not compiled in

}  // namespace detail

}  // namespace magpdo::kernels
