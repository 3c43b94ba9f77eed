#pragma once

#include <iosfwd>
#include <vector>

namespace bgrecon::hadamard {

/// Cauchy datum φ_k(x) = sin(πkx)/(πk) on y = 0.
double phi_k(int k, double x);

/// u_k(x,y) = sinh(πky) sin(πkx)/(πk)², harmonic with u_k(x,0) = 0 and ∂_y u_k(x,0) = φ_k(x).
double u_k(int k, double x, double y);

/// ∂u_k/∂y, evaluated analytically.
double du_k_dy(int k, double x, double y);

struct AmplificationRow {
  int k;
  double data_norm;     ///< sup_x |φ_k(x)| = 1/(πk)
  double solution_sup;  ///< sup over the unit square of |u_k| = sinh(πk)/(πk)²
  double ratio;         ///< solution_sup / data_norm = sinh(πk)/(πk)
};

/// Rows k = 1..k_max; throws std::invalid_argument for k_max < 1.
std::vector<AmplificationRow> amplification_table(int k_max);

void write_amplification_csv(std::ostream& out, const std::vector<AmplificationRow>& rows);

}  // namespace bgrecon::hadamard
