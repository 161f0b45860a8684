// Kernel weights, derivatives, and the analytic constants behind the
// plug-in bandwidth, all pinned by quadrature / finite-difference oracles.
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support/oracles.hpp"
#include "trendratio/kernels.hpp"

using namespace trendratio;

namespace {
constexpr Kernel kAll[] = {Kernel::Bartlett, Kernel::Parzen,
                           Kernel::QuadraticSpectral, Kernel::Daniell};
}

TEST_CASE("weights at zero and symmetry") {
  for (Kernel k : kAll) {
    CHECK(kernel_weight(k, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    for (double x : {0.05, 0.3, 0.77, 1.4, 3.2}) {
      CHECK(kernel_weight(k, x) == doctest::Approx(kernel_weight(k, -x)).epsilon(1e-14));
    }
  }
}

TEST_CASE("hand-checked weight values") {
  CHECK(kernel_weight(Kernel::Bartlett, 0.5) == doctest::Approx(0.5));
  CHECK(kernel_weight(Kernel::Bartlett, 1.0) == doctest::Approx(0.0));
  CHECK(kernel_weight(Kernel::Bartlett, 2.0) == doctest::Approx(0.0));
  // Parzen at 1/4 and 3/4 from the piecewise cubic.
  CHECK(kernel_weight(Kernel::Parzen, 0.25) ==
        doctest::Approx(1.0 - 6.0 / 16.0 + 6.0 / 64.0).epsilon(1e-14));
  CHECK(kernel_weight(Kernel::Parzen, 0.75) == doctest::Approx(2.0 * 0.015625).epsilon(1e-14));
  CHECK(kernel_weight(Kernel::Parzen, 1.0) == doctest::Approx(0.0));
  // Daniell zeros at integer arguments, QS zero of sin(z) = z tan-free check.
  CHECK(kernel_weight(Kernel::Daniell, 1.0) == doctest::Approx(0.0).scale(1.0));
  CHECK(kernel_weight(Kernel::Daniell, 0.5) ==
        doctest::Approx(std::sin(std::numbers::pi * 0.5) / (std::numbers::pi * 0.5)).epsilon(1e-14));
}

TEST_CASE("series branches join the closed forms smoothly") {
  // Evaluate QS and Daniell just below and above the series switchover and
  // compare against a long-double direct evaluation.
  for (Kernel k : {Kernel::QuadraticSpectral, Kernel::Daniell}) {
    for (double x : {1e-6, 1e-4, 1e-3, 0.004, 0.0132, 0.02, 0.4}) {
      const double w = kernel_weight(k, x);
      const double c = (k == Kernel::Daniell) ? std::numbers::pi : 6.0 * std::numbers::pi / 5.0;
      long double z = c * x;
      long double direct;
      if (k == Kernel::Daniell) {
        direct = std::sin(z) / z;
      } else {
        direct = 3.0L * (std::sin(z) - z * std::cos(z)) / (z * z * z);
      }
      // long-double direct evaluation itself loses ~1e-8 at the smallest x
      CHECK(w == doctest::Approx(static_cast<double>(direct)).epsilon(1e-6));
    }
  }
}

TEST_CASE("second derivatives match central differences") {
  for (Kernel k : {Kernel::Parzen, Kernel::QuadraticSpectral, Kernel::Daniell}) {
    for (double x : {0.07, 0.2, 0.33, 0.49, 0.61, 0.8, 0.97, 1.7}) {
      if (k == Kernel::Parzen && (std::abs(x - 0.5) < 0.02 || x > 0.98)) continue;
      const double fd = oracle::second_difference(k, x, 1e-5);
      const double an = kernel_second_derivative(k, x);
      CHECK(an == doctest::Approx(fd).epsilon(5e-5).scale(1.0));
    }
  }
  CHECK_THROWS_AS(kernel_second_derivative(Kernel::Bartlett, 0.3), std::logic_error);
}

TEST_CASE("curvature at the origin") {
  // k''(0) = -2 k_q for the smooth kernels.
  for (Kernel k : {Kernel::Parzen, Kernel::QuadraticSpectral, Kernel::Daniell}) {
    CHECK(kernel_second_derivative(k, 0.0) ==
          doctest::Approx(-2.0 * kernel_moment(k)).epsilon(1e-12));
  }
}

TEST_CASE("moment constants match the limit (1 - k(x)) / x^q") {
  for (Kernel k : kAll) {
    const int q = kernel_exponent(k);
    const double x = 1e-3;
    const double lim = (1.0 - kernel_weight(k, x)) / std::pow(x, q);
    // Parzen's limit converges only O(x), hence the loose tolerance.
    CHECK(kernel_moment(k) == doctest::Approx(lim).epsilon(7e-3));
  }
  CHECK(kernel_exponent(Kernel::Bartlett) == 1);
  CHECK(kernel_exponent(Kernel::Daniell) == 2);
}

TEST_CASE("L2 norms match adaptive quadrature") {
  // Compact kernels: integrate the support exactly.
  for (Kernel k : {Kernel::Bartlett, Kernel::Parzen}) {
    const double got = oracle::integrate(
        [k](double x) { const double w = kernel_weight(k, x); return w * w; }, -1.0, 1.0);
    CHECK(kernel_l2_norm(k) == doctest::Approx(got).epsilon(1e-10));
  }
  // QS decays like x^-4: truncate far out; the discarded tail is ~3e-8.
  {
    const double X = 80.0;
    const double got = 2.0 * oracle::integrate_chunked(
        [](double x) { const double w = kernel_weight(Kernel::QuadraticSpectral, x); return w * w; },
        0.0, X, 0.5, 1e-11);
    CHECK(kernel_l2_norm(Kernel::QuadraticSpectral) == doctest::Approx(got).epsilon(1e-5));
  }
  // Daniell decays like x^-2; integrate to X and add the averaged tail
  // 1/(2 pi^2 X) from sin^2 -> 1/2.
  {
    const double X = 400.0;
    const double got = 2.0 * (oracle::integrate_chunked(
        [](double x) { const double w = kernel_weight(Kernel::Daniell, x); return w * w; },
        0.0, X, 0.5, 1e-11) + 1.0 / (2.0 * std::numbers::pi * std::numbers::pi * X));
    CHECK(kernel_l2_norm(Kernel::Daniell) == doctest::Approx(got).epsilon(1e-4));
  }
}

TEST_CASE("plug-in bandwidth constants recover the known values") {
  // These match the classic tabulated constants for the three standard
  // kernels; the fourth follows from the same formula.
  CHECK(bandwidth_constant(Kernel::Bartlett) == doctest::Approx(1.1447).epsilon(2e-4));
  CHECK(bandwidth_constant(Kernel::Parzen) == doctest::Approx(2.6614).epsilon(2e-4));
  CHECK(bandwidth_constant(Kernel::QuadraticSpectral) == doctest::Approx(1.3221).epsilon(2e-4));
  CHECK(bandwidth_constant(Kernel::Daniell) ==
        doctest::Approx(std::pow(2.0 * std::pow(std::numbers::pi * std::numbers::pi / 6.0, 2), 0.2))
            .epsilon(1e-12));
}

TEST_CASE("classification and names") {
  CHECK(fixedb_class(Kernel::Bartlett) == FixedbClass::Bartlett);
  CHECK(fixedb_class(Kernel::Parzen) == FixedbClass::Type2);
  CHECK(fixedb_class(Kernel::QuadraticSpectral) == FixedbClass::Type1);
  CHECK(fixedb_class(Kernel::Daniell) == FixedbClass::Type1);
  CHECK(kernel_left_derivative_at_one(Kernel::Parzen) == doctest::Approx(0.0));
  CHECK_THROWS_AS(kernel_left_derivative_at_one(Kernel::Daniell), std::logic_error);
  for (Kernel k : kAll) CHECK(kernel_from_string(to_string(k)) == k);
  CHECK(kernel_from_string("QS") == Kernel::QuadraticSpectral);
  CHECK_THROWS_AS(kernel_from_string("epanechnikov"), std::invalid_argument);
}
