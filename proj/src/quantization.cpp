#include "magpdo/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "magpdo/kernels.hpp"

namespace magpdo::quant {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
const cd kI{0.0, 1.0};

double pref_pow(int d) {
  double p = 1.0;
  for (int i = 0; i < d; ++i) p /= kTwoPi;
  return p;
}

void check_dims(const sym::Symbol& f, const mag::VectorPotential& A, int d, const char* who) {
  if (f.d != d || A.d != d) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

// Tail classification: compare the declared weight at the cutoff and at twice
// the cutoff along each frequency axis.
enum class TailClass { growing, flat, decaying };

TailClass classify_tail(const sym::Symbol& f, double cutoff) {
  double x[2] = {0.0, 0.0};
  double ratio = 0.0;
  for (int j = 0; j < f.d; ++j) {
    for (double s : {1.0, -1.0}) {
      double xi1[2] = {0.0, 0.0}, xi2[2] = {0.0, 0.0};
      xi1[j] = s * cutoff;
      xi2[j] = s * 2.0 * cutoff;
      double w1 = f.weight.at(x, xi1), w2 = f.weight.at(x, xi2);
      if (!(w1 > 0.0)) throw std::invalid_argument("classify_tail: weight must be positive");
      ratio = std::max(ratio, w2 / w1);
    }
  }
  if (ratio > 1.5) return TailClass::growing;
  if (ratio < 0.5) return TailClass::decaying;
  return TailClass::flat;
}

cd symbol_xi_deriv(const sym::Symbol& f, double c, double xi) {
  sym::MultiIndex g{0, 0, 1, 0};
  double x[1] = {c}, p[1] = {xi};
  return sym::derivative(f, g, x, p);
}

// Two integration-by-parts terms for int_X^inf e^{i xi z} F(xi) d xi where
// F(xi) = f(c, sgn * xi); the caller folds the sign into z and the deriv.
cd ibp_tail(cd fX, cd dfX, double X, double z) {
  cd iz = kI * z;
  return std::exp(kI * (X * z)) * (-fX / iz + dfX / (iz * iz));
}

struct TailResult {
  cd value{0.0, 0.0};
  double estimate = 0.0;
};

// Frequency tail beyond [-X0, X0] for a decaying symbol at separation z:
// oscillation-resolved geometric panels while they still contribute, then a
// two-term integration by parts whose next term sizes the residual.
TailResult decaying_tail(const sym::Symbol& f, double c, double z, double X0, double tail_tol) {
  TailResult out;
  double xv[1] = {c};
  if (std::abs(z) < 1e-9) {
    // substituting xi = X0/u maps both tails onto (0, 1]; the order
    // refinement difference bounds the quadrature error
    auto sub = [&](int order) {
      std::vector<double> nodes, wts;
      num::gauss_legendre(order, nodes, wts);
      cd acc{0.0, 0.0};
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        double u = 0.5 * (nodes[i] + 1.0);
        double xi = X0 / u;
        double pv[1] = {xi}, mv[1] = {-xi};
        acc += 0.5 * wts[i] * (f.at(xv, pv) + f.at(xv, mv)) * (X0 / (u * u));
      }
      return acc;
    };
    out.value = sub(48);
    out.estimate = std::abs(out.value - sub(32));
    return out;
  }

  double X = X0;
  int calm = 0;
  for (int panel = 0; panel < 40 && calm < 2; ++panel) {
    int need = 16 + static_cast<int>(std::ceil(4.0 * std::abs(z) * X / kTwoPi));
    if (need > 2048) break;
    std::vector<double> nodes, wts;
    num::gauss_legendre(need, nodes, wts);
    cd contrib{0.0, 0.0};
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      double xi = X * (1.5 + 0.5 * nodes[i]);  // [X, 2X]
      double pv[1] = {xi}, mv[1] = {-xi};
      contrib += 0.5 * X * wts[i] *
                 (std::exp(kI * (xi * z)) * f.at(xv, pv) + std::exp(-kI * (xi * z)) * f.at(xv, mv));
    }
    out.value += contrib;
    calm = std::abs(contrib) < 0.0625 * tail_tol ? calm + 1 : 0;
    X *= 2.0;
  }

  double pv[1] = {X}, mv[1] = {-X};
  cd fp = f.at(xv, pv), fm = f.at(xv, mv);
  cd dfp = symbol_xi_deriv(f, c, X), dfm = -symbol_xi_deriv(f, c, -X);
  out.value += ibp_tail(fp, dfp, X, z) + ibp_tail(fm, dfm, X, -z);
  // residual after two parts is a second-derivative moment over z^2
  sym::MultiIndex g2{0, 0, 2, 0};
  cd d2p = sym::derivative(f, g2, xv, pv), d2m = sym::derivative(f, g2, xv, mv);
  out.estimate = (std::abs(d2p) + std::abs(d2m)) * X / (2.0 * z * z);
  return out;
}

num::GridFunction spectral_derivative(const num::GridFunction& u, int axis) {
  const num::Grid& g = u.grid;
  const std::size_t n = g.n;
  num::GridFunction out = u;
  const double base = kTwoPi / (2.0 * g.L);  // frequency step pi/L
  auto freq = [&](std::size_t m) {
    auto sm = static_cast<std::ptrdiff_t>(m);
    if (m >= n / 2) sm -= static_cast<std::ptrdiff_t>(n);
    return base * static_cast<double>(sm);
  };
  std::vector<cd> line(n);
  const std::size_t lines = g.size() / n;
  for (std::size_t l = 0; l < lines; ++l) {
    std::size_t start, stride;
    if (g.d == 1) {
      start = 0, stride = 1;
    } else if (axis == 1) {
      start = l * n, stride = 1;  // contiguous rows
    } else {
      start = l, stride = n;
    }
    for (std::size_t m = 0; m < n; ++m) line[m] = out.values[start + m * stride];
    num::fft_pow2(line, -1);
    for (std::size_t m = 0; m < n; ++m) line[m] *= kI * freq(m);
    num::fft_pow2(line, +1);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t m = 0; m < n; ++m) out.values[start + m * stride] = line[m] * inv;
  }
  return out;
}

// Covariant momentum along an axis: -i d_j - A_j.
num::GridFunction covariant_momentum(const num::GridFunction& u, const mag::VectorPotential& A,
                                     int axis) {
  num::GridFunction der = spectral_derivative(u, axis);
  num::GridFunction out = num::GridFunction::zero(u.grid);
  double x[2], a[2];
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    out.values[i] = -kI * der.values[i];
    if (!A.is_zero()) {
      u.grid.point(i, x);
      A.at(x, a);
      out.values[i] -= a[axis] * u.values[i];
    }
  }
  return out;
}

double monomial(const double* x, const std::array<int, 2>& e, int d) {
  double p = 1.0;
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < e[i]; ++k) p *= x[i];
  return p;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void QuantizationParams::validate() const {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("params: t must lie in [0, 1]");
  if (!(xi_cutoff > 0.0)) throw std::invalid_argument("params: xi_cutoff must be positive");
  if (zeta_base_order < 8 || u_order < 8 || v_order < 8)
    throw std::invalid_argument("params: quadrature orders must be at least 8");
  if (!(tail_tol > 0.0)) throw std::invalid_argument("params: tail_tol must be positive");
  if (flux_order < 2) throw std::invalid_argument("params: flux_order must be at least 2");
  if (max_zeta_nodes < zeta_base_order)
    throw std::invalid_argument("params: max_zeta_nodes below the base order");
}

KernelSamples kernel_from_symbol(const sym::Symbol& f, const QuantizationParams& q,
                                 const mag::VectorPotential& A, const num::Grid& grid) {
  q.validate();
  check_dims(f, A, grid.d, "kernel_from_symbol");
  if (grid.d != 1)
    throw std::invalid_argument("kernel_from_symbol: dense kernels are one dimensional");

  const TailClass cls = classify_tail(f, q.xi_cutoff);
  if (cls == TailClass::growing)
    throw std::invalid_argument(
        "kernel_from_symbol: symbol weight grows along xi, the kernel integral does not "
        "converge; only decaying or bounded symbols can be materialized");

  const std::size_t n = grid.n;
  const double pref = pref_pow(1);
  KernelSamples out;
  out.grid = grid;
  out.k = num::ComplexMatrix(n, n);
  out.tail_policy = cls == TailClass::decaying ? "corrected" : "truncated";

  double worst_tail = 0.0;
  std::vector<double> xin, xiw;
  // base value at separation z and midpoint c, plus its tail treatment
  auto slice = [&](double c, double z) {
    num::scaled_panel_rule(q.xi_cutoff, z, q.zeta_base_order, q.max_zeta_nodes, xin, xiw);
    cd val{0.0, 0.0};
    for (std::size_t l = 0; l < xin.size(); ++l) {
      double xv[1] = {c}, xiv[1] = {xin[l]};
      val += xiw[l] * std::polar(1.0, xin[l] * z) * f.at(xv, xiv);
    }
    if (cls == TailClass::decaying) {
      TailResult tail = decaying_tail(f, c, z, q.xi_cutoff, q.tail_tol);
      val += tail.value;
      worst_tail = std::max(worst_tail, tail.estimate);
    } else {
      double xv[1] = {c}, pv[1] = {q.xi_cutoff}, mv[1] = {-q.xi_cutoff};
      double edge = std::abs(f.at(xv, pv)) + std::abs(f.at(xv, mv));
      worst_tail = std::max(worst_tail, edge / std::max(std::abs(z), 1.0 / q.xi_cutoff));
    }
    return pref * val;
  };

  if (f.x_independent) {
    // the base integral depends on the separation alone
    std::vector<cd> by_sep(2 * n - 1);
    for (std::size_t k = 0; k < by_sep.size(); ++k) {
      double z = grid.h() * (static_cast<double>(k) - static_cast<double>(n - 1));
      by_sep[k] = slice(0.0, z);
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out.k.at(i, j) = by_sep[n - 1 + i - j];
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      double x = grid.coord(i);
      for (std::size_t j = 0; j < n; ++j) {
        double y = grid.coord(j);
        out.k.at(i, j) = slice(q.t * x + (1.0 - q.t) * y, x - y);
      }
    }
  }

  out.tail_estimate = worst_tail;
  if (cls == TailClass::decaying && worst_tail > q.tail_tol) {
    std::ostringstream msg;
    msg << "kernel_from_symbol: frequency tail estimate " << worst_tail
        << " exceeds the budget " << q.tail_tol << "; increase xi_cutoff";
    throw std::runtime_error(msg.str());
  }

  if (!A.is_zero()) {
    for (std::size_t i = 0; i < n; ++i) {
      double x[1] = {grid.coord(i)};
      for (std::size_t j = 0; j < n; ++j) {
        double y[1] = {grid.coord(j)};
        if (i != j)
          out.k.at(i, j) *= std::exp(kI * mag::circulation(A, x, y, q.flux_order));
      }
    }
  }
  return out;
}

num::GridFunction apply_op(const sym::Symbol& f, const QuantizationParams& q,
                           const mag::VectorPotential& A, const num::GridFunction& u) {
  q.validate();
  check_dims(f, A, u.grid.d, "apply_op");

  if (!f.poly.empty()) {
    num::GridFunction out = num::GridFunction::zero(u.grid);
    const int d = u.grid.d;
    double x[2];
    for (const sym::PolyTerm& term : f.poly) {
      const int total = term.xiexp[0] + term.xiexp[1];
      int axis = term.xiexp[1] > 0 ? 1 : 0;
      if (total == 0) {
        for (std::size_t i = 0; i < out.values.size(); ++i) {
          u.grid.point(i, x);
          out.values[i] += term.coef * monomial(x, term.xexp, d) * u.values[i];
        }
      } else if (total == 1) {
        // a(x) xi_j quantizes to a P_j - i (1-t) (d_j a)
        num::GridFunction pu = covariant_momentum(u, A, axis);
        std::array<int, 2> dexp = term.xexp;
        const double fall = dexp[axis] > 0 ? dexp[axis]-- : 0;
        for (std::size_t i = 0; i < out.values.size(); ++i) {
          u.grid.point(i, x);
          out.values[i] += term.coef * monomial(x, term.xexp, d) * pu.values[i];
          if (fall > 0.0)
            out.values[i] -=
                kI * (1.0 - q.t) * term.coef * fall * monomial(x, dexp, d) * u.values[i];
        }
      } else if (total == 2 && term.xiexp[axis] == 2 && term.xexp[0] == 0 && term.xexp[1] == 0) {
        num::GridFunction pu = covariant_momentum(covariant_momentum(u, A, axis), A, axis);
        for (std::size_t i = 0; i < out.values.size(); ++i)
          out.values[i] += term.coef * pu.values[i];
      } else {
        throw std::invalid_argument(
            "apply_op: polynomial term outside the supported shapes x^a, x^a xi_j, xi_j^2");
      }
    }
    return out;
  }

  if (u.grid.d != 1)
    throw std::invalid_argument("apply_op: general symbols apply through one-dimensional kernels");
  KernelSamples ker = kernel_from_symbol(f, q, A, u.grid);
  num::GridFunction out = num::GridFunction::zero(u.grid);
  const double h = u.grid.h();
  for (std::size_t i = 0; i < u.grid.n; ++i)
    out.values[i] = h * kernels::cdotu(&ker.k.at(i, 0), u.values.data(), u.grid.n);
  return out;
}

cd OperatorMatrix::at(const num::FrameIndex& row, const num::FrameIndex& col) const {
  return m.at(num::lattice_offset(box, row), num::lattice_offset(box, col));
}

double decay_certificate(const OperatorMatrix& mx, const wts::TemperedWeight& M, int n, int m) {
  if (M.d != mx.box.d) throw std::invalid_argument("decay_certificate: dimension mismatch");
  if (n < 0 || m < 0) throw std::invalid_argument("decay_certificate: orders must be nonnegative");
  const auto idxs = num::enumerate_lattice(mx.box);
  const double t = mx.t;
  double sup = 0.0;
  for (std::size_t r = 0; r < idxs.size(); ++r) {
    for (std::size_t c = 0; c < idxs.size(); ++c) {
      double da2 = 0.0, dp2 = 0.0;
      double cx[2] = {0.0, 0.0}, cxi[2] = {0.0, 0.0};
      for (int i = 0; i < mx.box.d; ++i) {
        const double da = idxs[r].a[i] - idxs[c].a[i];
        const double dp = idxs[r].ap[i] - idxs[c].ap[i];
        da2 += da * da;
        dp2 += dp * dp;
        cx[i] = t * idxs[r].a[i] + (1.0 - t) * idxs[c].a[i];
        cxi[i] = (1.0 - t) * idxs[r].ap[i] + t * idxs[c].ap[i];
      }
      const double w =
          std::pow(1.0 + da2, 0.5 * n) * std::pow(1.0 + dp2, 0.5 * m) / M.at(cx, cxi);
      sup = std::max(sup, w * std::abs(mx.m.at(r, c)));
    }
  }
  return sup;
}

void save_matrix(const OperatorMatrix& mx, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_matrix: cannot open " + path);
  out << "# operator matrix\n";
  out << "# d=" << mx.box.d << "\n";
  out << "# R=" << mx.box.R << "\n";
  out << "# t=" << fmt17(mx.t) << "\n";
  out << "# symbol=" << mx.symbol_label << "\n";
  out << "# field=" << mx.field_label << "\n";
  out << "# xi_cutoff=" << fmt17(mx.xi_cutoff) << "\n";
  out << "# tail_tol=" << fmt17(mx.tail_tol) << "\n";
  const auto idxs = num::enumerate_lattice(mx.box);
  const int d = mx.box.d;
  for (std::size_t r = 0; r < idxs.size(); ++r) {
    for (std::size_t c = 0; c < idxs.size(); ++c) {
      for (int i = 0; i < d; ++i) out << idxs[r].a[i] << ",";
      for (int i = 0; i < d; ++i) out << idxs[r].ap[i] << ",";
      for (int i = 0; i < d; ++i) out << idxs[c].a[i] << ",";
      for (int i = 0; i < d; ++i) out << idxs[c].ap[i] << ",";
      const cd v = mx.m.at(r, c);
      out << fmt17(v.real()) << "," << fmt17(v.imag()) << "\n";
    }
  }
  if (!out) throw std::runtime_error("save_matrix: write failed on " + path);
}

OperatorMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_matrix: cannot open " + path);
  std::map<std::string, std::string> header;
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::size_t key0 = line.find_first_not_of("# \t");
      header[line.substr(key0, eq - key0)] = line.substr(eq + 1);
      continue;
    }
    rows.push_back(line);
  }
  for (const char* key : {"d", "R", "t"})
    if (!header.count(key))
      throw std::runtime_error(std::string("load_matrix: missing header key ") + key);

  OperatorMatrix mx;
  mx.box.d = std::stoi(header["d"]);
  mx.box.R = std::stoi(header["R"]);
  if (mx.box.d != 1 && mx.box.d != 2) throw std::runtime_error("load_matrix: d must be 1 or 2");
  if (mx.box.R < 0) throw std::runtime_error("load_matrix: R must be nonnegative");
  mx.t = std::stod(header["t"]);
  mx.symbol_label = header.count("symbol") ? header["symbol"] : "";
  mx.field_label = header.count("field") ? header["field"] : "";
  if (header.count("xi_cutoff")) mx.xi_cutoff = std::stod(header["xi_cutoff"]);
  if (header.count("tail_tol")) mx.tail_tol = std::stod(header["tail_tol"]);

  const std::size_t side = mx.box.count();
  if (rows.size() != side * side)
    throw std::runtime_error("load_matrix: entry count does not match the declared box");
  mx.m = num::ComplexMatrix(side, side);
  std::vector<char> seen(side * side, 0);

  const int d = mx.box.d;
  const std::size_t want = 4 * static_cast<std::size_t>(d) + 2;
  std::vector<std::string> fields;
  num::FrameIndex ridx{d, {0, 0}, {0, 0}}, cidx{d, {0, 0}, {0, 0}};
  for (const std::string& row : rows) {
    fields.clear();
    std::size_t pos = 0;
    while (pos <= row.size()) {
      const auto next = row.find(',', pos);
      fields.push_back(row.substr(pos, next == std::string::npos ? next : next - pos));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    if (fields.size() != want)
      throw std::runtime_error("load_matrix: row with wrong field count in " + path);
    int at = 0;
    for (int i = 0; i < d; ++i) ridx.a[i] = std::stoi(fields[at++]);
    for (int i = 0; i < d; ++i) ridx.ap[i] = std::stoi(fields[at++]);
    for (int i = 0; i < d; ++i) cidx.a[i] = std::stoi(fields[at++]);
    for (int i = 0; i < d; ++i) cidx.ap[i] = std::stoi(fields[at++]);
    const std::size_t r = num::lattice_offset(mx.box, ridx);
    const std::size_t c = num::lattice_offset(mx.box, cidx);
    if (seen[r * side + c]++)
      throw std::runtime_error("load_matrix: duplicate entry for one index pair");
    mx.m.at(r, c) = cd{std::stod(fields[at]), std::stod(fields[at + 1])};
  }
  return mx;
}

}  // namespace magpdo::quant
