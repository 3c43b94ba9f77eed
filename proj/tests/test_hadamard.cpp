#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "bgrecon/hadamard.hpp"

using namespace bgrecon::hadamard;
using std::numbers::pi;

TEST_CASE("Cauchy datum") {
  CHECK(phi_k(3, 0.0) == 0.0);
  CHECK(phi_k(1, 0.5) == doctest::Approx(1.0 / pi).epsilon(1e-15));
  double prev = 1e9;
  for (int k = 1; k <= 8; ++k) {
    double sup = 0.0;
    for (int i = 0; i <= 4000; ++i) sup = std::max(sup, std::abs(phi_k(k, i / 4000.0)));
    CHECK(sup == doctest::Approx(1.0 / (pi * k)).epsilon(1e-6));
    CHECK(sup < prev);
    prev = sup;
  }
  CHECK_THROWS_AS(phi_k(0, 0.5), std::invalid_argument);
}

TEST_CASE("solution vanishes on y = 0 and has the datum as normal derivative") {
  for (int k : {1, 4}) {
    for (double x : {0.1, 0.35, 0.8}) {
      CHECK(u_k(k, x, 0.0) == 0.0);
      CHECK(du_k_dy(k, x, 0.0) == doctest::Approx(phi_k(k, x)).epsilon(1e-14));
      const double d = 1e-6;
      const double fd = (u_k(k, x, 0.5 + d) - u_k(k, x, 0.5 - d)) / (2 * d);
      CHECK(fd == doctest::Approx(du_k_dy(k, x, 0.5)).epsilon(1e-6));
    }
  }
}

TEST_CASE("five-point Laplacian of the solution is second order small") {
  const int n = 50;
  const double h = 1.0 / n;
  for (int k : {1, 2, 3}) {
    double worst = 0.0, sup = 0.0;
    for (int i = 1; i < n; ++i) {
      for (int j = 1; j < n; ++j) {
        const double x = i * h, y = j * h;
        const double lap = (u_k(k, x + h, y) + u_k(k, x - h, y) + u_k(k, x, y + h) + u_k(k, x, y - h) -
                            4 * u_k(k, x, y)) / (h * h);
        worst = std::max(worst, std::abs(lap));
        sup = std::max(sup, std::abs(u_k(k, x, y)));
      }
    }
    // truncation error h²/12 (u_xxxx + u_yyyy) with |∂⁴u| ≤ (πk)⁴ sup|u|
    const double bound = h * h / 12.0 * 2.0 * std::pow(pi * k, 4) * sup;
    CHECK(worst <= 1.05 * bound);
  }
}

TEST_CASE("amplification table rows") {
  const auto rows = amplification_table(10);
  REQUIRE(rows.size() == 10);
  CHECK(rows[0].k == 1);
  CHECK(rows[0].data_norm == doctest::Approx(1.0 / pi).epsilon(1e-15));
  CHECK(rows[0].solution_sup == doctest::Approx(std::sinh(pi) / (pi * pi)).epsilon(1e-15));
  CHECK(rows[0].ratio == doctest::Approx(std::sinh(pi) / pi).epsilon(1e-15));
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].ratio > rows[i - 1].ratio);
  for (const auto& r : rows) {
    const double k = r.k;
    CHECK(std::abs(r.data_norm - 1.0 / (pi * k)) <= 1e-10 * (1.0 / (pi * k)));
    CHECK(std::abs(r.ratio - std::sinh(pi * k) / (pi * k)) <= 1e-10 * r.ratio);
  }
  CHECK_THROWS_AS(amplification_table(0), std::invalid_argument);
}

TEST_CASE("amplification passes one thousand at k = 4 and one million at k = 6") {
  const auto rows = amplification_table(6);
  CHECK(rows[2].ratio < 1e3);
  CHECK(rows[3].ratio > 1e3);
  CHECK(rows[4].ratio < 1e6);
  CHECK(rows[5].ratio > 1e6);
}

TEST_CASE("large frequencies stay finite") {
  const auto rows = amplification_table(100);
  CHECK(std::isfinite(rows.back().ratio));
  CHECK(std::isfinite(u_k(100, 0.3, 1.0)));
}

TEST_CASE("amplification csv") {
  std::ostringstream out;
  write_amplification_csv(out, amplification_table(3));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "k,data_norm,solution_sup,ratio");
  std::getline(in, line);
  CHECK(line.rfind("1,", 0) == 0);
}
