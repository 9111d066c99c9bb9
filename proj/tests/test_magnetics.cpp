#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "magpdo/magnetics.hpp"

using magpdo::mag::MagneticField;
using magpdo::mag::VectorPotential;

namespace {

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uni() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
  double sym(double scale) { return scale * (2.0 * uni() - 1.0); }
};

}  // namespace

TEST_CASE("transversal gauge of a constant field matches the closed form") {
  const double b = 0.7;
  auto B = magpdo::mag::constant_field_2d(b);
  auto A = magpdo::mag::transversal_potential(B);
  Rng rng(0xA1);
  for (int trial = 0; trial < 20; ++trial) {
    double x[2] = {rng.sym(3.0), rng.sym(3.0)};
    double a[2];
    A.at(x, a);
    CHECK(std::abs(a[0] - (-0.5 * b * x[1])) < 1e-12);
    CHECK(std::abs(a[1] - 0.5 * b * x[0]) < 1e-12);
  }
  double origin[2] = {0.0, 0.0}, a0[2];
  A.at(origin, a0);
  CHECK(a0[0] == 0.0);
  CHECK(a0[1] == 0.0);
}

TEST_CASE("transversal gauge recovers its field as a curl") {
  auto B = magpdo::mag::tanh_field_2d(0.5);
  auto A = magpdo::mag::transversal_potential(B);
  const double h = 1e-5;
  Rng rng(0xA2);
  for (int trial = 0; trial < 12; ++trial) {
    double x[2] = {rng.sym(2.0), rng.sym(2.0)};
    double ap[2], am[2];
    double xp[2] = {x[0] + h, x[1]}, xm[2] = {x[0] - h, x[1]};
    A.at(xp, ap);
    A.at(xm, am);
    double d1a2 = (ap[1] - am[1]) / (2.0 * h);
    double yp[2] = {x[0], x[1] + h}, ym[2] = {x[0], x[1] - h};
    A.at(yp, ap);
    A.at(ym, am);
    double d2a1 = (ap[0] - am[0]) / (2.0 * h);
    CHECK(std::abs((d1a2 - d2a1) - B.b12(x)) < 1e-6);
  }
}

TEST_CASE("transversal potential grows at most linearly with the field bound") {
  const double b = 0.9;
  auto A = magpdo::mag::transversal_potential(magpdo::mag::tanh_field_2d(b));
  Rng rng(0xA3);
  for (int trial = 0; trial < 30; ++trial) {
    double x[2] = {rng.sym(6.0), rng.sym(6.0)};
    double a[2];
    A.at(x, a);
    double na = std::hypot(a[0], a[1]);
    double nx = std::hypot(x[0], x[1]);
    CHECK(na <= b * nx + 1e-12);
  }
}

TEST_CASE("constant-field circulation has the cross-product closed form") {
  const double b = 0.5;
  auto A = magpdo::mag::transversal_potential(magpdo::mag::constant_field_2d(b));
  Rng rng(0xA4);
  for (int trial = 0; trial < 20; ++trial) {
    double x[2] = {rng.sym(3.0), rng.sym(3.0)};
    double y[2] = {rng.sym(3.0), rng.sym(3.0)};
    double got = magpdo::mag::circulation(A, x, y);
    double want = 0.5 * b * (y[0] * x[1] - x[0] * y[1]);
    CHECK(std::abs(got - want) < 1e-12);
    CHECK(std::abs(magpdo::mag::circulation(A, y, x) + got) < 1e-12);
  }
}

TEST_CASE("one-dimensional tanh potential integrates to the log-cosh closed form") {
  const double b = 0.8;
  auto A = magpdo::mag::tanh_potential_1d(b);
  REQUIRE(A.d == 1);
  Rng rng(0xA5);
  for (int trial = 0; trial < 20; ++trial) {
    double x[1] = {rng.sym(3.0)};
    double y[1] = {rng.sym(3.0)};
    double got = magpdo::mag::circulation(A, x, y);
    double want = 0.5 * b * ((x[0] - y[0]) + std::log(std::cosh(x[0])) - std::log(std::cosh(y[0])));
    CHECK(std::abs(got - want) < 1e-12);
  }
}

TEST_CASE("triangle flux of a constant field is the signed area times the field") {
  const double b = 0.5;
  auto B = magpdo::mag::constant_field_2d(b);
  double x[2] = {0.0, 0.0}, y[2] = {1.0, 0.0}, z[2] = {0.0, 1.0};
  CHECK(std::abs(magpdo::mag::triangle_flux(B, x, y, z) - 0.25) < 1e-13);
  CHECK(std::abs(magpdo::mag::triangle_flux(B, x, z, y) + 0.25) < 1e-13);

  Rng rng(0xA6);
  for (int trial = 0; trial < 20; ++trial) {
    double p[2] = {rng.sym(3.0), rng.sym(3.0)};
    double q[2] = {rng.sym(3.0), rng.sym(3.0)};
    double r[2] = {rng.sym(3.0), rng.sym(3.0)};
    double J = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    CHECK(std::abs(magpdo::mag::triangle_flux(B, p, q, r) - 0.5 * b * J) < 1e-12);
  }
}

TEST_CASE("triangle flux respects orientation and degeneracy") {
  auto B = magpdo::mag::tanh_field_2d(0.5);
  Rng rng(0xA7);
  for (int trial = 0; trial < 10; ++trial) {
    double p[2] = {rng.sym(3.0), rng.sym(3.0)};
    double q[2] = {rng.sym(3.0), rng.sym(3.0)};
    double r[2] = {rng.sym(3.0), rng.sym(3.0)};
    double f = magpdo::mag::triangle_flux(B, p, q, r);
    CHECK(std::abs(magpdo::mag::triangle_flux(B, q, r, p) - f) < 1e-9);
    CHECK(std::abs(magpdo::mag::triangle_flux(B, p, r, q) + f) < 1e-9);
    // field values sit in [0, b]; the flux cannot beat b times the area
    double J = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    CHECK(std::abs(f) <= 0.5 * 0.5 * std::abs(J) + 1e-9);

    // rounding in forming the midpoint leaves a sliver of area at most ~ulp
    double mid[2] = {p[0] + 0.5 * (q[0] - p[0]), p[1] + 0.5 * (q[1] - p[1])};
    CHECK(std::abs(magpdo::mag::triangle_flux(B, p, q, mid)) < 1e-15);
  }
  double u[2] = {0.0, 0.0}, v[2] = {2.0, 4.0}, w[2] = {1.0, 2.0};
  CHECK(magpdo::mag::triangle_flux(B, u, v, w) == 0.0);
}

TEST_CASE("circulation around a triangle equals the enclosed flux") {
  Rng rng(0xA8);
  auto Bc = magpdo::mag::constant_field_2d(0.5);
  auto Ac = magpdo::mag::transversal_potential(Bc);
  auto Bt = magpdo::mag::tanh_field_2d(0.5);
  auto At = magpdo::mag::transversal_potential(Bt, 32);
  for (int trial = 0; trial < 40; ++trial) {
    double p[2] = {rng.sym(3.0), rng.sym(3.0)};
    double q[2] = {rng.sym(3.0), rng.sym(3.0)};
    double r[2] = {rng.sym(3.0), rng.sym(3.0)};
    CHECK(magpdo::mag::stokes_defect(Ac, Bc, p, q, r) < 1e-10);
    CHECK(magpdo::mag::stokes_defect(At, Bt, p, q, r) < 1e-6);
    CHECK(magpdo::mag::stokes_defect(At, Bt, p, q, r, 32) < 1e-8);
  }
}

TEST_CASE("zero field and zero potential short-circuit to zero") {
  auto B = magpdo::mag::zero_field(2);
  auto A = magpdo::mag::zero_potential(2);
  CHECK(B.is_zero());
  CHECK(A.is_zero());
  double x[2] = {1.0, 2.0}, y[2] = {-1.0, 0.5}, z[2] = {0.0, -2.0};
  CHECK(magpdo::mag::circulation(A, x, y) == 0.0);
  CHECK(magpdo::mag::triangle_flux(B, x, y, z) == 0.0);
  CHECK(magpdo::mag::stokes_defect(A, B, x, y, z) == 0.0);
  CHECK(magpdo::mag::constant_field_2d(0.0).is_zero());
  double a[2] = {5.0, 5.0};
  A.at(x, a);
  CHECK(a[0] == 0.0);
  CHECK(a[1] == 0.0);
}

TEST_CASE("gauge shifts move circulations by boundary values of chi") {
  auto A = magpdo::mag::transversal_potential(magpdo::mag::constant_field_2d(0.5));
  auto chi = [](const double* x) { return x[0]; };
  auto grad = [](const double*, double* g) {
    g[0] = 1.0;
    g[1] = 0.0;
  };
  auto As = magpdo::mag::gauge_shift(A, chi, grad);
  Rng rng(0xA9);
  for (int trial = 0; trial < 15; ++trial) {
    double x[2] = {rng.sym(3.0), rng.sym(3.0)};
    double y[2] = {rng.sym(3.0), rng.sym(3.0)};
    double base = magpdo::mag::circulation(A, x, y);
    double shifted = magpdo::mag::circulation(As, x, y);
    CHECK(std::abs(shifted - base - (x[0] - y[0])) < 1e-10);
  }

  // shifting back is the identity on circulations
  auto chin = [](const double* x) { return -x[0]; };
  auto gradn = [](const double*, double* g) {
    g[0] = -1.0;
    g[1] = 0.0;
  };
  auto Ab = magpdo::mag::gauge_shift(As, chin, gradn);
  double x[2] = {1.3, -0.4}, y[2] = {-2.1, 0.9};
  CHECK(std::abs(magpdo::mag::circulation(Ab, x, y) - magpdo::mag::circulation(A, x, y)) < 1e-12);

  auto sinchi = [](const double* x) { return std::sin(x[0]) * std::cos(x[1]); };
  auto singrad = [](const double* x, double* g) {
    g[0] = std::cos(x[0]) * std::cos(x[1]);
    g[1] = -std::sin(x[0]) * std::sin(x[1]);
  };
  auto Asin = magpdo::mag::gauge_shift(A, sinchi, singrad);
  double got = magpdo::mag::circulation(Asin, x, y);
  double want = magpdo::mag::circulation(A, x, y) + sinchi(x) - sinchi(y);
  CHECK(std::abs(got - want) < 1e-10);
}

TEST_CASE("gauge shifts reject a gradient that disagrees with chi") {
  auto A = magpdo::mag::zero_potential(2);
  auto chi = [](const double* x) { return x[0] * x[0]; };
  auto wrong = [](const double*, double* g) {
    g[0] = 1.0;  // should be 2 x_0
    g[1] = 0.0;
  };
  try {
    magpdo::mag::gauge_shift(A, chi, wrong);
    FAIL("expected a throw");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("grad_chi") != std::string::npos);
  }
}
