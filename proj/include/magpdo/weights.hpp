#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

// Tempered weights on phase space: positive functions M(x, xi) carrying an
// explicit moderate-growth certificate (C, a) for
//   M(p + q) <= C M(p) (1 + |q|^2)^{a/2}
// together with sampling diagnostics and the certificate algebra.

namespace magpdo::wts {

struct TemperedWeight {
  int d = 1;
  std::string label;
  std::function<double(const double*, const double*)> eval;  // (x, xi)
  double C = 1.0;
  double a = 0.0;

  double at(const double* x, const double* xi) const { return eval(x, xi); }
};

// One sampled pair ((x, xi), (y, zeta)); only the first d slots are used.
struct PhasePair {
  std::array<double, 2> x{}, xi{}, y{}, zeta{};
};

// 2000 deterministic pairs in [-10, 10]^{4d}.
std::vector<PhasePair> standard_sample_pairs(int d);

struct PeetreReport {
  double max_ratio = 0.0;
  bool pass = false;
  PhasePair worst{};
};

// max over pairs of M(x+y, xi+zeta) / (M(x, xi) <(y, zeta)>^a); pass while
// the certificate constant is not exceeded beyond roundoff slack.
PeetreReport peetre_check(const TemperedWeight& M, const std::vector<PhasePair>& pairs);

// Validating constructor: rejects a certificate its standard samples refute.
TemperedWeight make_weight(int d, const std::string& label,
                           std::function<double(const double*, const double*)> eval, double C,
                           double a);

TemperedWeight one(int d);
TemperedWeight xi_power(int d, double s);     // <xi>^s
TemperedWeight x_power(int d, double s);      // <x>^s
TemperedWeight phase_power(int d, double s);  // <(x, xi)>^s

TemperedWeight weight_mul(const TemperedWeight& M1, const TemperedWeight& M2);
TemperedWeight weight_pow(const TemperedWeight& M, double p);

struct LatticeLpReport {
  std::vector<double> partial_sums;
  bool converged = false;
};

// Partial sums of M(gamma)^p over integer phase lattice boxes of growing
// radius. Convergence is accepted on geometric decay of the shell increments
// or a relatively negligible last increment.
LatticeLpReport lattice_lp_test(const TemperedWeight& M, double p, const std::vector<int>& radii);

}  // namespace magpdo::wts
