#include "magpdo/kernels.hpp"

#include <atomic>
#include <cstdlib>

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>
#define MAGPDO_HAVE_NEON 1
#endif

namespace magpdo::kernels {

namespace {

// Scalar reference path.  Element i feeds accumulator i mod 4 and the final
// combine is (a0+a2)+(a1+a3); the SIMD variants realize the same tree, which
// is what makes them bit-identical to this code.

double sum_scalar(const double* x, std::size_t n) {
  double a[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t n4 = n - (n % 4);
  for (std::size_t i = 0; i < n4; i += 4) {
    a[0] += x[i];
    a[1] += x[i + 1];
    a[2] += x[i + 2];
    a[3] += x[i + 3];
  }
  for (std::size_t j = 0; n4 + j < n; ++j) a[j] += x[n4 + j];
  return (a[0] + a[2]) + (a[1] + a[3]);
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double a[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t n4 = n - (n % 4);
  for (std::size_t i = 0; i < n4; i += 4) {
    a[0] += x[i] * y[i];
    a[1] += x[i + 1] * y[i + 1];
    a[2] += x[i + 2] * y[i + 2];
    a[3] += x[i + 3] * y[i + 3];
  }
  for (std::size_t j = 0; n4 + j < n; ++j) a[j] += x[n4 + j] * y[n4 + j];
  return (a[0] + a[2]) + (a[1] + a[3]);
}

double norm2sq_scalar(const double* x, std::size_t n) { return dot_scalar(x, x, n); }

inline void cmul_acc(double xr, double xi, double yr, double yi, double& ar, double& ai) {
  double t1r = xr * yr;
  double t1i = xr * yi;
  double t2r = xi * yi;
  double t2i = xi * yr;
  ar += (t1r - t2r);
  ai += (t1i + t2i);
}

cd cdotu_scalar(const cd* x, const cd* y, std::size_t n) {
  double ar[4] = {0, 0, 0, 0}, ai[4] = {0, 0, 0, 0};
  std::size_t n4 = n - (n % 4);
  for (std::size_t i = 0; i < n4; i += 4) {
    for (std::size_t j = 0; j < 4; ++j)
      cmul_acc(x[i + j].real(), x[i + j].imag(), y[i + j].real(), y[i + j].imag(), ar[j], ai[j]);
  }
  for (std::size_t j = 0; n4 + j < n; ++j)
    cmul_acc(x[n4 + j].real(), x[n4 + j].imag(), y[n4 + j].real(), y[n4 + j].imag(), ar[j], ai[j]);
  return {(ar[0] + ar[2]) + (ar[1] + ar[3]), (ai[0] + ai[2]) + (ai[1] + ai[3])};
}

cd cdotc_scalar(const cd* x, const cd* y, std::size_t n) {
  double ar[4] = {0, 0, 0, 0}, ai[4] = {0, 0, 0, 0};
  std::size_t n4 = n - (n % 4);
  for (std::size_t i = 0; i < n4; i += 4) {
    for (std::size_t j = 0; j < 4; ++j)
      cmul_acc(x[i + j].real(), -x[i + j].imag(), y[i + j].real(), y[i + j].imag(), ar[j], ai[j]);
  }
  for (std::size_t j = 0; n4 + j < n; ++j)
    cmul_acc(x[n4 + j].real(), -x[n4 + j].imag(), y[n4 + j].real(), y[n4 + j].imag(), ar[j], ai[j]);
  return {(ar[0] + ar[2]) + (ar[1] + ar[3]), (ai[0] + ai[2]) + (ai[1] + ai[3])};
}

cd cwsum_scalar(const double* w, const cd* f, std::size_t n) {
  double ar[4] = {0, 0, 0, 0}, ai[4] = {0, 0, 0, 0};
  std::size_t n4 = n - (n % 4);
  for (std::size_t i = 0; i < n4; i += 4) {
    for (std::size_t j = 0; j < 4; ++j) {
      ar[j] += w[i + j] * f[i + j].real();
      ai[j] += w[i + j] * f[i + j].imag();
    }
  }
  for (std::size_t j = 0; n4 + j < n; ++j) {
    ar[j] += w[n4 + j] * f[n4 + j].real();
    ai[j] += w[n4 + j] * f[n4 + j].imag();
  }
  return {(ar[0] + ar[2]) + (ar[1] + ar[3]), (ai[0] + ai[2]) + (ai[1] + ai[3])};
}

double cnorm2sq_scalar(const cd* x, std::size_t n) {
  // Interleaved re/im doubles reduced as one real array of length 2n.
  return norm2sq_scalar(reinterpret_cast<const double*>(x), 2 * n);
}

void caxpy_scalar(cd a, const cd* x, cd* y, std::size_t n) {
  double arr = a.real(), aii = a.imag();
  for (std::size_t i = 0; i < n; ++i) {
    double t1r = arr * x[i].real();
    double t1i = arr * x[i].imag();
    double t2r = aii * x[i].imag();
    double t2i = aii * x[i].real();
    y[i] = cd(y[i].real() + (t1r - t2r), y[i].imag() + (t1i + t2i));
  }
}

void cscale_scalar(cd a, cd* x, std::size_t n) {
  double arr = a.real(), aii = a.imag();
  for (std::size_t i = 0; i < n; ++i) {
    double t1r = arr * x[i].real();
    double t1i = arr * x[i].imag();
    double t2r = aii * x[i].imag();
    double t2i = aii * x[i].real();
    x[i] = cd(t1r - t2r, t1i + t2i);
  }
}

#if defined(MAGPDO_HAVE_NEON)

double sum_neon(const double* x, std::size_t n) {
  float64x2_t acc01 = vdupq_n_f64(0.0), acc23 = vdupq_n_f64(0.0);
  std::size_t n4 = n - (n % 4);
  for (std::size_t i = 0; i < n4; i += 4) {
    acc01 = vaddq_f64(acc01, vld1q_f64(x + i));
    acc23 = vaddq_f64(acc23, vld1q_f64(x + i + 2));
  }
  double a[4] = {vgetq_lane_f64(acc01, 0), vgetq_lane_f64(acc01, 1), vgetq_lane_f64(acc23, 0),
                 vgetq_lane_f64(acc23, 1)};
  for (std::size_t j = 0; n4 + j < n; ++j) a[j] += x[n4 + j];
  return (a[0] + a[2]) + (a[1] + a[3]);
}

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc01 = vdupq_n_f64(0.0), acc23 = vdupq_n_f64(0.0);
  std::size_t n4 = n - (n % 4);
  for (std::size_t i = 0; i < n4; i += 4) {
    acc01 = vaddq_f64(acc01, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    acc23 = vaddq_f64(acc23, vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
  }
  double a[4] = {vgetq_lane_f64(acc01, 0), vgetq_lane_f64(acc01, 1), vgetq_lane_f64(acc23, 0),
                 vgetq_lane_f64(acc23, 1)};
  for (std::size_t j = 0; n4 + j < n; ++j) a[j] += x[n4 + j] * y[n4 + j];
  return (a[0] + a[2]) + (a[1] + a[3]);
}

double norm2sq_neon(const double* x, std::size_t n) { return dot_neon(x, x, n); }

// One complex per 128-bit register; [t1.0 - t2.0, t1.1 + t2.1] realizes the
// same products and add/sub order as cmul_acc.
inline float64x2_t cmul_neon(float64x2_t xv, float64x2_t yv) {
  float64x2_t t1 = vmulq_f64(vdupq_laneq_f64(xv, 0), yv);
  float64x2_t t2 = vmulq_f64(vdupq_laneq_f64(xv, 1), vextq_f64(yv, yv, 1));
  float64x2_t d = vsubq_f64(t1, t2);
  float64x2_t s = vaddq_f64(t1, t2);
  return vcopyq_laneq_f64(d, 1, s, 1);
}

cd cdotu_neon(const cd* x, const cd* y, std::size_t n) {
  const double* xp = reinterpret_cast<const double*>(x);
  const double* yp = reinterpret_cast<const double*>(y);
  float64x2_t a0 = vdupq_n_f64(0.0), a1 = a0, a2 = a0, a3 = a0;
  std::size_t n4 = n - (n % 4);
  for (std::size_t i = 0; i < n4; i += 4) {
    a0 = vaddq_f64(a0, cmul_neon(vld1q_f64(xp + 2 * i), vld1q_f64(yp + 2 * i)));
    a1 = vaddq_f64(a1, cmul_neon(vld1q_f64(xp + 2 * i + 2), vld1q_f64(yp + 2 * i + 2)));
    a2 = vaddq_f64(a2, cmul_neon(vld1q_f64(xp + 2 * i + 4), vld1q_f64(yp + 2 * i + 4)));
    a3 = vaddq_f64(a3, cmul_neon(vld1q_f64(xp + 2 * i + 6), vld1q_f64(yp + 2 * i + 6)));
  }
  double ar[4] = {vgetq_lane_f64(a0, 0), vgetq_lane_f64(a1, 0), vgetq_lane_f64(a2, 0),
                  vgetq_lane_f64(a3, 0)};
  double ai[4] = {vgetq_lane_f64(a0, 1), vgetq_lane_f64(a1, 1), vgetq_lane_f64(a2, 1),
                  vgetq_lane_f64(a3, 1)};
  for (std::size_t j = 0; n4 + j < n; ++j)
    cmul_acc(x[n4 + j].real(), x[n4 + j].imag(), y[n4 + j].real(), y[n4 + j].imag(), ar[j], ai[j]);
  return {(ar[0] + ar[2]) + (ar[1] + ar[3]), (ai[0] + ai[2]) + (ai[1] + ai[3])};
}

cd cdotc_neon(const cd* x, const cd* y, std::size_t n) {
  const double* xp = reinterpret_cast<const double*>(x);
  const double* yp = reinterpret_cast<const double*>(y);
  const float64x2_t conj_mask = {1.0, -1.0};
  float64x2_t a0 = vdupq_n_f64(0.0), a1 = a0, a2 = a0, a3 = a0;
  std::size_t n4 = n - (n % 4);
  for (std::size_t i = 0; i < n4; i += 4) {
    a0 = vaddq_f64(a0, cmul_neon(vmulq_f64(vld1q_f64(xp + 2 * i), conj_mask), vld1q_f64(yp + 2 * i)));
    a1 = vaddq_f64(a1, cmul_neon(vmulq_f64(vld1q_f64(xp + 2 * i + 2), conj_mask),
                                 vld1q_f64(yp + 2 * i + 2)));
    a2 = vaddq_f64(a2, cmul_neon(vmulq_f64(vld1q_f64(xp + 2 * i + 4), conj_mask),
                                 vld1q_f64(yp + 2 * i + 4)));
    a3 = vaddq_f64(a3, cmul_neon(vmulq_f64(vld1q_f64(xp + 2 * i + 6), conj_mask),
                                 vld1q_f64(yp + 2 * i + 6)));
  }
  double ar[4] = {vgetq_lane_f64(a0, 0), vgetq_lane_f64(a1, 0), vgetq_lane_f64(a2, 0),
                  vgetq_lane_f64(a3, 0)};
  double ai[4] = {vgetq_lane_f64(a0, 1), vgetq_lane_f64(a1, 1), vgetq_lane_f64(a2, 1),
                  vgetq_lane_f64(a3, 1)};
  for (std::size_t j = 0; n4 + j < n; ++j)
    cmul_acc(x[n4 + j].real(), -x[n4 + j].imag(), y[n4 + j].real(), y[n4 + j].imag(), ar[j], ai[j]);
  return {(ar[0] + ar[2]) + (ar[1] + ar[3]), (ai[0] + ai[2]) + (ai[1] + ai[3])};
}

cd cwsum_neon(const double* w, const cd* f, std::size_t n) {
  const double* fp = reinterpret_cast<const double*>(f);
  float64x2_t a0 = vdupq_n_f64(0.0), a1 = a0, a2 = a0, a3 = a0;
  std::size_t n4 = n - (n % 4);
  for (std::size_t i = 0; i < n4; i += 4) {
    a0 = vaddq_f64(a0, vmulq_f64(vdupq_n_f64(w[i]), vld1q_f64(fp + 2 * i)));
    a1 = vaddq_f64(a1, vmulq_f64(vdupq_n_f64(w[i + 1]), vld1q_f64(fp + 2 * i + 2)));
    a2 = vaddq_f64(a2, vmulq_f64(vdupq_n_f64(w[i + 2]), vld1q_f64(fp + 2 * i + 4)));
    a3 = vaddq_f64(a3, vmulq_f64(vdupq_n_f64(w[i + 3]), vld1q_f64(fp + 2 * i + 6)));
  }
  double ar[4] = {vgetq_lane_f64(a0, 0), vgetq_lane_f64(a1, 0), vgetq_lane_f64(a2, 0),
                  vgetq_lane_f64(a3, 0)};
  double ai[4] = {vgetq_lane_f64(a0, 1), vgetq_lane_f64(a1, 1), vgetq_lane_f64(a2, 1),
                  vgetq_lane_f64(a3, 1)};
  for (std::size_t j = 0; n4 + j < n; ++j) {
    ar[j] += w[n4 + j] * f[n4 + j].real();
    ai[j] += w[n4 + j] * f[n4 + j].imag();
  }
  return {(ar[0] + ar[2]) + (ar[1] + ar[3]), (ai[0] + ai[2]) + (ai[1] + ai[3])};
}

double cnorm2sq_neon(const cd* x, std::size_t n) {
  return norm2sq_neon(reinterpret_cast<const double*>(x), 2 * n);
}

void caxpy_neon(cd a, const cd* x, cd* y, std::size_t n) {
  double av[2] = {a.real(), a.imag()};
  float64x2_t avv = vld1q_f64(av);
  double* yp = reinterpret_cast<double*>(y);
  const double* xp = reinterpret_cast<const double*>(x);
  for (std::size_t i = 0; i < n; ++i) {
    float64x2_t r = vaddq_f64(vld1q_f64(yp + 2 * i), cmul_neon(avv, vld1q_f64(xp + 2 * i)));
    vst1q_f64(yp + 2 * i, r);
  }
}

void cscale_neon(cd a, cd* x, std::size_t n) {
  double av[2] = {a.real(), a.imag()};
  float64x2_t avv = vld1q_f64(av);
  double* xp = reinterpret_cast<double*>(x);
  for (std::size_t i = 0; i < n; ++i) vst1q_f64(xp + 2 * i, cmul_neon(avv, vld1q_f64(xp + 2 * i)));
}

const detail::Impl g_neon_impl = {sum_neon,    dot_neon,      norm2sq_neon,
                                  cdotu_neon,  cdotc_neon,    cwsum_neon,
                                  cnorm2sq_neon, caxpy_neon,  cscale_neon};

#endif  // MAGPDO_HAVE_NEON

const detail::Impl g_scalar_impl = {sum_scalar,    dot_scalar,   norm2sq_scalar,
                                    cdotu_scalar,  cdotc_scalar, cwsum_scalar,
                                    cnorm2sq_scalar, caxpy_scalar, cscale_scalar};

struct Dispatch {
  const detail::Impl* impl;
  Isa isa;
};

Dispatch detect() {
  if (const char* env = std::getenv("MAGPDO_FORCE_SCALAR"); env && env[0] == '1')
    return {&g_scalar_impl, Isa::Scalar};
#if defined(MAGPDO_HAVE_NEON)
  return {&g_neon_impl, Isa::Neon};
#else
  if (const detail::Impl* impl = detail::avx2_impl()) return {impl, Isa::Avx2};
  return {&g_scalar_impl, Isa::Scalar};
#endif
}

std::atomic<const detail::Impl*> g_impl{nullptr};
std::atomic<Isa> g_isa{Isa::Scalar};
std::atomic<bool> g_forced{false};

const detail::Impl& active() {
  const detail::Impl* p = g_impl.load(std::memory_order_acquire);
  if (!p) {
    Dispatch d = detect();
    g_isa.store(d.isa, std::memory_order_relaxed);
    g_impl.store(d.impl, std::memory_order_release);
    p = d.impl;
  }
  return *p;
}

}  // namespace

namespace detail {
const Impl& scalar_impl() { return g_scalar_impl; }
#if !defined(__x86_64__) && !defined(_M_X64)
const Impl* avx2_impl() { return nullptr; }
#endif
}  // namespace detail

Isa active_isa() {
  active();
  return g_isa.load(std::memory_order_relaxed);
}

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
    default: return "scalar";
  }
}

void force_scalar(bool on) {
  if (on) {
    g_forced.store(true);
    g_impl.store(&g_scalar_impl, std::memory_order_release);
    g_isa.store(Isa::Scalar, std::memory_order_relaxed);
  } else {
    g_forced.store(false);
    Dispatch d = detect();
    g_isa.store(d.isa, std::memory_order_relaxed);
    g_impl.store(d.impl, std::memory_order_release);
  }
}

double sum(const double* x, std::size_t n) { return active().sum(x, n); }
double dot(const double* x, const double* y, std::size_t n) { return active().dot(x, y, n); }
double norm2sq(const double* x, std::size_t n) { return active().norm2sq(x, n); }
cd cdotu(const cd* x, const cd* y, std::size_t n) { return active().cdotu(x, y, n); }
cd cdotc(const cd* x, const cd* y, std::size_t n) { return active().cdotc(x, y, n); }
cd cwsum(const double* w, const cd* f, std::size_t n) { return active().cwsum(w, f, n); }
double cnorm2sq(const cd* x, std::size_t n) { return active().cnorm2sq(x, n); }
void caxpy(cd a, const cd* x, cd* y, std::size_t n) { active().caxpy(a, x, y, n); }
void cscale(cd a, cd* x, std::size_t n) { active().cscale(a, x, n); }

}  // namespace magpdo::kernels
