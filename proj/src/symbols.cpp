#include "magpdo/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace magpdo::sym {

namespace {

bool is_zero(const MultiIndex& g) { return g[0] == 0 && g[1] == 0 && g[2] == 0 && g[3] == 0; }

double int_pow(double b, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

double falling(int m, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= double(m - i);
  return r;
}

cd poly_derivative(const std::vector<PolyTerm>& terms, int d, const MultiIndex& g, const double* x,
                   const double* xi) {
  cd acc(0.0, 0.0);
  for (const auto& t : terms) {
    double factor = 1.0;
    bool dead = false;
    for (int k = 0; k < d && !dead; ++k) {
      if (t.xexp[k] < g[k] || t.xiexp[k] < g[2 + k]) dead = true;
    }
    if (dead) continue;
    double mono = 1.0;
    for (int k = 0; k < d; ++k) {
      factor *= falling(t.xexp[k], g[k]) * falling(t.xiexp[k], g[2 + k]);
      mono *= int_pow(x[k], t.xexp[k] - g[k]) * int_pow(xi[k], t.xiexp[k] - g[2 + k]);
    }
    acc += t.coef * factor * mono;
  }
  return acc;
}

}  // namespace

cd derivative(const Symbol& f, const MultiIndex& gamma, const double* x, const double* xi,
              double fd_scale) {
  if (is_zero(gamma)) return f.at(x, xi);
  if (f.deriv) {
    auto v = f.deriv(gamma, x, xi);
    if (v) return *v;
  }
  int k = 0;
  while (gamma[k] == 0) ++k;
  MultiIndex rest = gamma;
  rest[k] -= 1;
  double xs[2] = {0.0, 0.0}, xis[2] = {0.0, 0.0};
  for (int i = 0; i < f.d; ++i) {
    xs[i] = x[i];
    xis[i] = xi[i];
  }
  double* slot = (k < 2) ? &xs[k] : &xis[k - 2];
  const double base = *slot;
  const double h = fd_scale * (1.0 + std::abs(base));
  *slot = base + h;
  cd hi = derivative(f, rest, xs, xis, fd_scale);
  *slot = base - h;
  cd lo = derivative(f, rest, xs, xis, fd_scale);
  return (hi - lo) / (2.0 * h);
}

std::vector<MultiIndex> multi_indices(int d, int n) {
  std::vector<MultiIndex> out;
  const int gx1 = n, gx2 = (d == 2) ? n : 0;
  for (int a = 0; a <= gx1; ++a)
    for (int b = 0; b <= gx2; ++b)
      for (int c = 0; c <= n; ++c)
        for (int e = 0; e <= ((d == 2) ? n : 0); ++e)
          if (a + b + c + e <= n) out.push_back({a, b, c, e});
  std::sort(out.begin(), out.end(), [](const MultiIndex& p, const MultiIndex& q) {
    int sp = p[0] + p[1] + p[2] + p[3], sq = q[0] + q[1] + q[2] + q[3];
    if (sp != sq) return sp < sq;
    return p < q;
  });
  return out;
}

namespace {

[[noreturn]] void bad_derivative(const MultiIndex& g, const double* x, const double* xi, int d) {
  std::ostringstream os;
  os << "seminorm: non-finite derivative, gamma=(" << g[0];
  if (d == 2) os << "," << g[1];
  os << ";" << g[2];
  if (d == 2) os << "," << g[3];
  os << ") at x=(" << x[0];
  if (d == 2) os << "," << x[1];
  os << ") xi=(" << xi[0];
  if (d == 2) os << "," << xi[1];
  os << ")";
  throw std::runtime_error(os.str());
}

std::vector<double> make_ticks(double half_extent, int density) {
  int q = (density % 2 == 1) ? density : density + 1;
  std::vector<double> t(q);
  for (int k = 0; k < q; ++k)
    t[k] = -half_extent + 2.0 * half_extent * double(k) / double(q - 1);
  t[q / 2] = 0.0;
  t.front() = -half_extent;
  t.back() = half_extent;
  return t;
}

}  // namespace

double seminorm(const Symbol& f, int n, double half_extent, int density) {
  if (n < 0) throw std::invalid_argument("seminorm: order must be nonnegative");
  if (n > 4 && !f.deriv)
    throw std::invalid_argument("seminorm: difference-mode derivatives support order <= 4");
  if (!(half_extent > 0.0) || density < 3)
    throw std::invalid_argument("seminorm: need a positive region and >= 3 points per axis");
  auto ticks = make_ticks(half_extent, density);
  auto gammas = multi_indices(f.d, n);
  double total = 0.0;
  double x[2] = {0.0, 0.0}, xi[2] = {0.0, 0.0};
  for (const auto& g : gammas) {
    double sup = 0.0;
    if (f.d == 1) {
      for (double tx : ticks) {
        x[0] = tx;
        for (double txi : ticks) {
          xi[0] = txi;
          cd v = derivative(f, g, x, xi);
          double m = f.weight.at(x, xi);
          if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || !(m > 0.0))
            bad_derivative(g, x, xi, 1);
          sup = std::max(sup, std::abs(v) / m);
        }
      }
    } else {
      for (double t0 : ticks) {
        x[0] = t0;
        for (double t1 : ticks) {
          x[1] = t1;
          for (double t2 : ticks) {
            xi[0] = t2;
            for (double t3 : ticks) {
              xi[1] = t3;
              cd v = derivative(f, g, x, xi);
              double m = f.weight.at(x, xi);
              if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || !(m > 0.0))
                bad_derivative(g, x, xi, 2);
              sup = std::max(sup, std::abs(v) / m);
            }
          }
        }
      }
    }
    total += sup;
  }
  return total;
}

MembershipReport membership_report(const Symbol& f, int n_max, const std::vector<double>& extents,
                                   int base_density) {
  if (extents.size() < 2) throw std::invalid_argument("membership_report: need >= 2 regions");
  for (std::size_t i = 0; i + 1 < extents.size(); ++i)
    if (!(extents[i] < extents[i + 1]))
      throw std::invalid_argument("membership_report: extents must increase");
  MembershipReport rep;
  rep.extents = extents;
  const int q0 = (base_density % 2 == 1) ? base_density : base_density + 1;
  const double spacing = 2.0 * extents.front() / double(q0 - 1);
  rep.seminorms.assign(n_max + 1, std::vector<double>(extents.size(), 0.0));
  for (std::size_t r = 0; r < extents.size(); ++r) {
    // hold the spacing fixed so sample grids nest across regions
    int density = static_cast<int>(std::lround(2.0 * extents[r] / spacing)) + 1;
    for (int n = 0; n <= n_max; ++n) rep.seminorms[n][r] = seminorm(f, n, extents[r], density);
  }
  rep.stable = true;
  const std::size_t last = extents.size() - 1;
  for (int n = 0; n <= n_max; ++n) {
    double a = rep.seminorms[n][last - 1], b = rep.seminorms[n][last];
    double rel = std::abs(b - a) / std::max({std::abs(a), std::abs(b), 1e-300});
    if (rel >= 0.05) rep.stable = false;
  }
  return rep;
}

namespace {

Symbol poly_symbol(int d, std::string label, std::vector<PolyTerm> terms, wts::TemperedWeight w,
                   bool x_indep) {
  Symbol s;
  s.d = d;
  s.label = std::move(label);
  s.weight = std::move(w);
  s.poly = std::move(terms);
  s.x_independent = x_indep;
  auto terms_copy = s.poly;
  s.eval = [terms_copy, d](const double* x, const double* xi) {
    return poly_derivative(terms_copy, d, {0, 0, 0, 0}, x, xi);
  };
  s.deriv = [terms_copy, d](const MultiIndex& g, const double* x,
                            const double* xi) -> std::optional<cd> {
    return poly_derivative(terms_copy, d, g, x, xi);
  };
  return s;
}

}  // namespace

Symbol one_symbol(int d) {
  return poly_symbol(d, "one", {PolyTerm{}}, wts::one(d), true);
}

Symbol xi_coordinate(int d, int j) {
  if (j < 1 || j > d) throw std::invalid_argument("xi_coordinate: bad axis");
  PolyTerm t;
  t.xiexp[j - 1] = 1;
  std::ostringstream os;
  os << "xi_" << j;
  return poly_symbol(d, os.str(), {t}, wts::xi_power(d, 1.0), true);
}

Symbol x_coordinate(int d, int j) {
  if (j < 1 || j > d) throw std::invalid_argument("x_coordinate: bad axis");
  PolyTerm t;
  t.xexp[j - 1] = 1;
  std::ostringstream os;
  os << "x_" << j;
  return poly_symbol(d, os.str(), {t}, wts::x_power(d, 1.0), false);
}

Symbol kinetic(int d) {
  std::vector<PolyTerm> terms(1 + d);
  for (int k = 0; k < d; ++k) terms[1 + k].xiexp[k] = 2;
  return poly_symbol(d, "kinetic", std::move(terms), wts::xi_power(d, 2.0), true);
}

Symbol x1_xi1(int d) {
  PolyTerm t;
  t.xexp[0] = 1;
  t.xiexp[0] = 1;
  return poly_symbol(d, "x1_xi1", {t}, wts::phase_power(d, 2.0), false);
}

Symbol xi_bracket_power(int d, double s) {
  Symbol f;
  f.d = d;
  std::ostringstream os;
  os << "xi_bracket(" << s << ")";
  f.label = os.str();
  f.weight = wts::xi_power(d, s);
  f.x_independent = true;
  f.eval = [d, s](const double*, const double* xi) {
    double w = 1.0;
    for (int k = 0; k < d; ++k) w += xi[k] * xi[k];
    return cd(std::pow(w, 0.5 * s), 0.0);
  };
  f.deriv = [d, s](const MultiIndex& g, const double*, const double* xi) -> std::optional<cd> {
    if (g[0] > 0 || g[1] > 0) return cd(0.0, 0.0);
    int tot = g[2] + g[3];
    double w = 1.0;
    for (int k = 0; k < d; ++k) w += xi[k] * xi[k];
    if (tot == 0) return cd(std::pow(w, 0.5 * s), 0.0);
    if (tot == 1) {
      int j = g[2] ? 0 : 1;
      return cd(s * xi[j] * std::pow(w, 0.5 * s - 1.0), 0.0);
    }
    if (tot == 2) {
      int j, k;
      if (g[2] == 2) j = k = 0;
      else if (g[3] == 2) j = k = 1;
      else { j = 0; k = 1; }
      double val = s * (s - 2.0) * xi[j] * xi[k] * std::pow(w, 0.5 * s - 2.0);
      if (j == k) val += s * std::pow(w, 0.5 * s - 1.0);
      return cd(val, 0.0);
    }
    return std::nullopt;
  };
  return f;
}

Symbol gaussian_bump(int d) {
  Symbol f;
  f.d = d;
  f.label = "gaussian_bump";
  f.weight = wts::phase_power(d, -3.0);
  f.x_independent = false;
  auto pack = [d](const double* x, const double* xi, double* v) {
    for (int k = 0; k < d; ++k) {
      v[k] = x[k];
      v[2 + k] = xi[k];
    }
  };
  f.eval = [d](const double* x, const double* xi) {
    double q = 0.0;
    for (int k = 0; k < d; ++k) q += x[k] * x[k] + xi[k] * xi[k];
    return cd(std::exp(-0.5 * q), 0.0);
  };
  f.deriv = [d, pack](const MultiIndex& g, const double* x,
                      const double* xi) -> std::optional<cd> {
    int tot = g[0] + g[1] + g[2] + g[3];
    if (tot > 2) return std::nullopt;
    double v[4] = {0, 0, 0, 0};
    pack(x, xi, v);
    double q = 0.0;
    for (int k = 0; k < d; ++k) q += v[k] * v[k] + v[2 + k] * v[2 + k];
    double G = std::exp(-0.5 * q);
    if (tot == 0) return cd(G, 0.0);
    if (tot == 1) {
      for (int a = 0; a < 4; ++a)
        if (g[a]) return cd(-v[a] * G, 0.0);
    }
    int a = -1, b = -1;
    for (int k = 0; k < 4; ++k) {
      if (g[k] == 2) { a = b = k; }
      else if (g[k] == 1) { (a < 0 ? a : b) = k; }
    }
    return cd((v[a] * v[b] - (a == b ? 1.0 : 0.0)) * G, 0.0);
  };
  return f;
}

Symbol sin_xi_decay(int d) {
  Symbol f;
  f.d = d;
  f.label = "sin_xi_decay";
  f.weight = wts::xi_power(d, -2.0);
  f.x_independent = false;
  f.eval = [d](const double* x, const double* xi) {
    double w = 1.0;
    for (int k = 0; k < d; ++k) w += xi[k] * xi[k];
    return cd(std::sin(x[0]) / w, 0.0);
  };
  return f;
}

}  // namespace magpdo::sym
