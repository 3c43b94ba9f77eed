#include "bgrecon/hadamard.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace bgrecon::hadamard {

namespace {

constexpr double kPi = std::numbers::pi;

void check_frequency(int k) {
  if (k < 1) throw std::invalid_argument("hadamard: frequency k must be at least 1");
}

// sinh(z)/c for large z without forming sinh(z) itself
double scaled_sinh(double z, double c) {
  if (z <= 20.0 * kPi) return std::sinh(z) / c;
  return std::exp(z - std::log(2.0 * c) + std::log1p(-std::exp(-2.0 * z)));
}

}  // namespace

double phi_k(int k, double x) {
  check_frequency(k);
  return std::sin(kPi * k * x) / (kPi * k);
}

double u_k(int k, double x, double y) {
  check_frequency(k);
  const double w = kPi * k;
  return scaled_sinh(w * y, w * w) * std::sin(w * x);
}

double du_k_dy(int k, double x, double y) {
  check_frequency(k);
  const double w = kPi * k;
  return std::cosh(w * y) * std::sin(w * x) / w;
}

std::vector<AmplificationRow> amplification_table(int k_max) {
  if (k_max < 1) throw std::invalid_argument("amplification_table: k_max must be at least 1");
  std::vector<AmplificationRow> rows;
  rows.reserve(k_max);
  for (int k = 1; k <= k_max; ++k) {
    const double w = kPi * k;
    rows.push_back({k, 1.0 / w, scaled_sinh(w, w * w), scaled_sinh(w, w)});
  }
  return rows;
}

void write_amplification_csv(std::ostream& out, const std::vector<AmplificationRow>& rows) {
  out << "k,data_norm,solution_sup,ratio\n";
  char line[128];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g\n", r.k, r.data_norm, r.solution_sup,
                  r.ratio);
    out << line;
  }
}

}  // namespace bgrecon::hadamard
