#include "magpdo/kernels.hpp"

// AVX2 variants.  This translation unit is compiled with -mavx2 and nothing
// else in the project is, so every AVX2 symbol stays behind the runtime
// check in avx2_impl().  No FMA: products and adds are emitted separately to
// stay bit-identical with the scalar reference, and the four-accumulator
// combine happens only after the scalar tail, exactly as in the reference.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace magpdo::kernels {

namespace {

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t n4 = n - (n % 4);
  for (std::size_t i = 0; i < n4; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double a[4];
  _mm256_storeu_pd(a, acc);
  for (std::size_t j = 0; n4 + j < n; ++j) a[j] += x[n4 + j];
  return (a[0] + a[2]) + (a[1] + a[3]);
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t n4 = n - (n % 4);
  for (std::size_t i = 0; i < n4; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  double a[4];
  _mm256_storeu_pd(a, acc);
  for (std::size_t j = 0; n4 + j < n; ++j) a[j] += x[n4 + j] * y[n4 + j];
  return (a[0] + a[2]) + (a[1] + a[3]);
}

double norm2sq_avx2(const double* x, std::size_t n) { return dot_avx2(x, x, n); }

// Two complex numbers per register, lanes [re0, im0, re1, im1].
// addsub(t1, t2) = [t1-t2, t1+t2, ...] reproduces the scalar product order.
inline __m256d cmul_avx2(__m256d xv, __m256d yv) {
  __m256d xr = _mm256_movedup_pd(xv);          // [xr0, xr0, xr1, xr1]
  __m256d xi = _mm256_permute_pd(xv, 0b1111);  // [xi0, xi0, xi1, xi1]
  __m256d ys = _mm256_permute_pd(yv, 0b0101);  // [yi0, yr0, yi1, yr1]
  return _mm256_addsub_pd(_mm256_mul_pd(xr, yv), _mm256_mul_pd(xi, ys));
}

inline void cmul_acc_tail(double xr, double xi, double yr, double yi, double& ar, double& ai) {
  double t1r = xr * yr;
  double t1i = xr * yi;
  double t2r = xi * yi;
  double t2i = xi * yr;
  ar += (t1r - t2r);
  ai += (t1i + t2i);
}

// Unpacks the two register accumulators into the four per-residue complex
// accumulators of the scalar reference (acc0 holds residues 0,1).
inline void spill(__m256d acc0, __m256d acc1, double ar[4], double ai[4]) {
  double o0[4], o1[4];
  _mm256_storeu_pd(o0, acc0);
  _mm256_storeu_pd(o1, acc1);
  ar[0] = o0[0];
  ai[0] = o0[1];
  ar[1] = o0[2];
  ai[1] = o0[3];
  ar[2] = o1[0];
  ai[2] = o1[1];
  ar[3] = o1[2];
  ai[3] = o1[3];
}

cd cdotu_avx2(const cd* x, const cd* y, std::size_t n) {
  const double* xp = reinterpret_cast<const double*>(x);
  const double* yp = reinterpret_cast<const double*>(y);
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t n4 = n - (n % 4);
  for (std::size_t i = 0; i < n4; i += 4) {
    acc0 = _mm256_add_pd(acc0, cmul_avx2(_mm256_loadu_pd(xp + 2 * i), _mm256_loadu_pd(yp + 2 * i)));
    acc1 = _mm256_add_pd(
        acc1, cmul_avx2(_mm256_loadu_pd(xp + 2 * i + 4), _mm256_loadu_pd(yp + 2 * i + 4)));
  }
  double ar[4], ai[4];
  spill(acc0, acc1, ar, ai);
  for (std::size_t j = 0; n4 + j < n; ++j)
    cmul_acc_tail(x[n4 + j].real(), x[n4 + j].imag(), y[n4 + j].real(), y[n4 + j].imag(), ar[j],
                  ai[j]);
  return {(ar[0] + ar[2]) + (ar[1] + ar[3]), (ai[0] + ai[2]) + (ai[1] + ai[3])};
}

cd cdotc_avx2(const cd* x, const cd* y, std::size_t n) {
  const double* xp = reinterpret_cast<const double*>(x);
  const double* yp = reinterpret_cast<const double*>(y);
  const __m256d conj_mask = _mm256_setr_pd(1.0, -1.0, 1.0, -1.0);
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t n4 = n - (n % 4);
  for (std::size_t i = 0; i < n4; i += 4) {
    acc0 = _mm256_add_pd(acc0, cmul_avx2(_mm256_mul_pd(_mm256_loadu_pd(xp + 2 * i), conj_mask),
                                         _mm256_loadu_pd(yp + 2 * i)));
    acc1 = _mm256_add_pd(acc1, cmul_avx2(_mm256_mul_pd(_mm256_loadu_pd(xp + 2 * i + 4), conj_mask),
                                         _mm256_loadu_pd(yp + 2 * i + 4)));
  }
  double ar[4], ai[4];
  spill(acc0, acc1, ar, ai);
  for (std::size_t j = 0; n4 + j < n; ++j)
    cmul_acc_tail(x[n4 + j].real(), -x[n4 + j].imag(), y[n4 + j].real(), y[n4 + j].imag(), ar[j],
                  ai[j]);
  return {(ar[0] + ar[2]) + (ar[1] + ar[3]), (ai[0] + ai[2]) + (ai[1] + ai[3])};
}

cd cwsum_avx2(const double* w, const cd* f, std::size_t n) {
  const double* fp = reinterpret_cast<const double*>(f);
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t n4 = n - (n % 4);
  for (std::size_t i = 0; i < n4; i += 4) {
    __m256d wv0 =
        _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(w + i)), 0b01010000);
    __m256d wv1 =
        _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(w + i + 2)), 0b01010000);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(wv0, _mm256_loadu_pd(fp + 2 * i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(wv1, _mm256_loadu_pd(fp + 2 * i + 4)));
  }
  double ar[4], ai[4];
  spill(acc0, acc1, ar, ai);
  for (std::size_t j = 0; n4 + j < n; ++j) {
    ar[j] += w[n4 + j] * f[n4 + j].real();
    ai[j] += w[n4 + j] * f[n4 + j].imag();
  }
  return {(ar[0] + ar[2]) + (ar[1] + ar[3]), (ai[0] + ai[2]) + (ai[1] + ai[3])};
}

double cnorm2sq_avx2(const cd* x, std::size_t n) {
  return norm2sq_avx2(reinterpret_cast<const double*>(x), 2 * n);
}

void caxpy_avx2(cd a, const cd* x, cd* y, std::size_t n) {
  const double* xp = reinterpret_cast<const double*>(x);
  double* yp = reinterpret_cast<double*>(y);
  __m256d av = _mm256_setr_pd(a.real(), a.imag(), a.real(), a.imag());
  std::size_t n2 = n - (n % 2);
  for (std::size_t i = 0; i < n2; i += 2) {
    __m256d r =
        _mm256_add_pd(_mm256_loadu_pd(yp + 2 * i), cmul_avx2(av, _mm256_loadu_pd(xp + 2 * i)));
    _mm256_storeu_pd(yp + 2 * i, r);
  }
  for (std::size_t i = n2; i < n; ++i) {
    double ar = y[i].real(), ai = y[i].imag();
    cmul_acc_tail(a.real(), a.imag(), x[i].real(), x[i].imag(), ar, ai);
    y[i] = cd(ar, ai);
  }
}

void cscale_avx2(cd a, cd* x, std::size_t n) {
  double* xp = reinterpret_cast<double*>(x);
  __m256d av = _mm256_setr_pd(a.real(), a.imag(), a.real(), a.imag());
  std::size_t n2 = n - (n % 2);
  for (std::size_t i = 0; i < n2; i += 2)
    _mm256_storeu_pd(xp + 2 * i, cmul_avx2(av, _mm256_loadu_pd(xp + 2 * i)));
  for (std::size_t i = n2; i < n; ++i) {
    double ar = 0.0, ai = 0.0;
    cmul_acc_tail(a.real(), a.imag(), x[i].real(), x[i].imag(), ar, ai);
    x[i] = cd(ar, ai);
  }
}

const detail::Impl g_avx2_impl = {sum_avx2,      dot_avx2,   norm2sq_avx2, cdotu_avx2, cdotc_avx2,
                                  cwsum_avx2,    cnorm2sq_avx2, caxpy_avx2, cscale_avx2};

}  // namespace

namespace detail {

const Impl* avx2_impl() {
#if defined(__GNUC__) || defined(__clang__)
  if (__builtin_cpu_supports("avx2")) return &g_avx2_impl;
#endif
  return nullptr;
}

}  // namespace detail

}  // namespace magpdo::kernels

#endif  // x86_64
