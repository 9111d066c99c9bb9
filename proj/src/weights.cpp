#include "magpdo/weights.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace magpdo::wts {

namespace {

double bracket(double norm2) { return std::sqrt(1.0 + norm2); }

double pair_norm2(const PhasePair& p, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += p.y[i] * p.y[i] + p.zeta[i] * p.zeta[i];
  return s;
}

}  // namespace

std::vector<PhasePair> standard_sample_pairs(int d) {
  std::mt19937_64 eng(0x5EED);
  auto uni = [&eng] { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
  auto coord = [&] { return 10.0 * (2.0 * uni() - 1.0); };
  std::vector<PhasePair> out(2000);
  for (auto& p : out) {
    for (int i = 0; i < d; ++i) p.x[i] = coord();
    for (int i = 0; i < d; ++i) p.xi[i] = coord();
    for (int i = 0; i < d; ++i) p.y[i] = coord();
    for (int i = 0; i < d; ++i) p.zeta[i] = coord();
  }
  return out;
}

PeetreReport peetre_check(const TemperedWeight& M, const std::vector<PhasePair>& pairs) {
  PeetreReport rep;
  double sx[2], sxi[2];
  for (const auto& p : pairs) {
    double base = M.at(p.x.data(), p.xi.data());
    for (int i = 0; i < M.d; ++i) {
      sx[i] = p.x[i] + p.y[i];
      sxi[i] = p.xi[i] + p.zeta[i];
    }
    double shifted = M.at(sx, sxi);
    if (!(base > 0.0) || !(shifted > 0.0))
      throw std::runtime_error("peetre_check: weight '" + M.label +
                               "' is not strictly positive on a sample");
    double ratio = shifted / (base * std::pow(bracket(pair_norm2(p, M.d)), M.a));
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.worst = p;
    }
  }
  rep.pass = rep.max_ratio <= M.C * (1.0 + 1e-9);
  return rep;
}

TemperedWeight make_weight(int d, const std::string& label,
                           std::function<double(const double*, const double*)> eval, double C,
                           double a) {
  if (d != 1 && d != 2) throw std::invalid_argument("make_weight: d must be 1 or 2");
  if (!(C > 0.0) || a < 0.0) throw std::invalid_argument("make_weight: need C > 0 and a >= 0");
  TemperedWeight w;
  w.d = d;
  w.label = label;
  w.eval = std::move(eval);
  w.C = C;
  w.a = a;
  auto rep = peetre_check(w, standard_sample_pairs(d));
  if (!rep.pass) {
    std::ostringstream os;
    os << "make_weight: '" << label << "' fails its certificate (C=" << C << ", a=" << a
       << "): sampled ratio " << rep.max_ratio;
    throw std::invalid_argument(os.str());
  }
  return w;
}

namespace {

double sq_sum(const double* v, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += v[i] * v[i];
  return s;
}

}  // namespace

TemperedWeight one(int d) {
  return make_weight(d, "one", [](const double*, const double*) { return 1.0; }, 1.0, 0.0);
}

TemperedWeight xi_power(int d, double s) {
  std::ostringstream os;
  os << "xi_power(" << s << ")";
  return make_weight(
      d, os.str(),
      [d, s](const double*, const double* xi) { return std::pow(1.0 + sq_sum(xi, d), 0.5 * s); },
      std::pow(2.0, 0.5 * std::abs(s)), std::abs(s));
}

TemperedWeight x_power(int d, double s) {
  std::ostringstream os;
  os << "x_power(" << s << ")";
  return make_weight(
      d, os.str(),
      [d, s](const double* x, const double*) { return std::pow(1.0 + sq_sum(x, d), 0.5 * s); },
      std::pow(2.0, 0.5 * std::abs(s)), std::abs(s));
}

TemperedWeight phase_power(int d, double s) {
  std::ostringstream os;
  os << "phase_power(" << s << ")";
  return make_weight(
      d, os.str(),
      [d, s](const double* x, const double* xi) {
        return std::pow(1.0 + sq_sum(x, d) + sq_sum(xi, d), 0.5 * s);
      },
      std::pow(2.0, 0.5 * std::abs(s)), std::abs(s));
}

TemperedWeight weight_mul(const TemperedWeight& M1, const TemperedWeight& M2) {
  if (M1.d != M2.d) throw std::invalid_argument("weight_mul: dimension mismatch");
  TemperedWeight w;
  w.d = M1.d;
  w.label = M1.label + "*" + M2.label;
  auto e1 = M1.eval, e2 = M2.eval;
  w.eval = [e1, e2](const double* x, const double* xi) { return e1(x, xi) * e2(x, xi); };
  w.C = M1.C * M2.C;
  w.a = M1.a + M2.a;
  return w;
}

TemperedWeight weight_pow(const TemperedWeight& M, double p) {
  TemperedWeight w;
  w.d = M.d;
  std::ostringstream os;
  os << M.label << "^" << p;
  w.label = os.str();
  auto e = M.eval;
  w.eval = [e, p](const double* x, const double* xi) { return std::pow(e(x, xi), p); };
  w.C = std::pow(M.C, std::abs(p));
  w.a = M.a * std::abs(p);
  return w;
}

LatticeLpReport lattice_lp_test(const TemperedWeight& M, double p, const std::vector<int>& radii) {
  if (!(p > 0.0)) throw std::invalid_argument("lattice_lp_test: p must be positive");
  if (radii.size() < 2) throw std::invalid_argument("lattice_lp_test: need at least two radii");
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    if (radii[i] >= radii[i + 1] || radii[i] < 0)
      throw std::invalid_argument("lattice_lp_test: radii must be increasing and nonnegative");

  LatticeLpReport rep;
  const int d = M.d;
  double x[2] = {0, 0}, xi[2] = {0, 0};
  for (int R : radii) {
    double sum = 0.0;
    if (d == 1) {
      for (int a0 = -R; a0 <= R; ++a0)
        for (int p0 = -R; p0 <= R; ++p0) {
          x[0] = a0;
          xi[0] = p0;
          sum += std::pow(M.at(x, xi), p);
        }
    } else {
      for (int a0 = -R; a0 <= R; ++a0)
        for (int a1 = -R; a1 <= R; ++a1)
          for (int p0 = -R; p0 <= R; ++p0)
            for (int p1 = -R; p1 <= R; ++p1) {
              x[0] = a0;
              x[1] = a1;
              xi[0] = p0;
              xi[1] = p1;
              sum += std::pow(M.at(x, xi), p);
            }
    }
    rep.partial_sums.push_back(sum);
  }

  // Increments between consecutive boxes are positive. Accept either uniform
  // geometric decay of the increments or a negligible final increment.
  std::vector<double> inc;
  for (std::size_t i = 0; i + 1 < rep.partial_sums.size(); ++i)
    inc.push_back(rep.partial_sums[i + 1] - rep.partial_sums[i]);
  bool geometric = inc.size() >= 2;
  for (std::size_t i = 0; i + 1 < inc.size(); ++i)
    if (!(inc[i + 1] <= 0.9 * inc[i])) geometric = false;
  double last_rel = inc.back() / rep.partial_sums.back();
  rep.converged = geometric || last_rel < 1e-3;
  return rep;
}

}  // namespace magpdo::wts
