// kernels.cpp - closed forms for the four supported kernels
#include "trendratio/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace trendratio {

namespace {

constexpr double kPi = std::numbers::pi;

// Scale constant of the quadratic spectral kernel: z = c*x with c = 6*pi/5.
constexpr double kQsScale = 6.0 * kPi / 5.0;

// QS kernel in its natural argument, k(z) = 3 (sin z - z cos z) / z^3.
// Series used near z = 0 where the closed form cancels catastrophically.
double qs_weight_z(double z) {
  const double az = std::abs(z);
  if (az < 5e-2) {
    const double z2 = z * z;
    return 1.0 - z2 / 10.0 + z2 * z2 / 280.0;
  }
  return 3.0 * (std::sin(z) - z * std::cos(z)) / (z * z * z);
}

// d^2/dz^2 of the QS kernel: 3 [(12 - 5 z^2) sin z + (z^3 - 12 z) cos z] / z^5.
double qs_second_derivative_z(double z) {
  const double az = std::abs(z);
  if (az < 5e-2) {
    const double z2 = z * z;
    return -0.2 + 3.0 * z2 / 70.0 - z2 * z2 / 504.0;
  }
  const double z2 = z * z;
  const double num = (12.0 - 5.0 * z2) * std::sin(z) + (z2 * z - 12.0 * z) * std::cos(z);
  return 3.0 * num / (z2 * z2 * z);
}

// Daniell kernel, k(x) = sin(pi x) / (pi x).
double daniell_weight(double x) {
  const double z = kPi * x;
  if (std::abs(z) < 5e-2) {
    const double z2 = z * z;
    return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sin(z) / z;
}

// k''(x) for the Daniell kernel (a = pi):
//   k''(x) = -a sin(ax)/x - 2 cos(ax)/x^2 + 2 sin(ax)/(a x^3)
double daniell_second_derivative(double x) {
  const double a = kPi;
  const double z = a * x;
  if (std::abs(z) < 5e-2) {
    const double x2 = x * x;
    const double a2 = a * a;
    return -a2 / 3.0 + a2 * a2 * x2 / 10.0 - a2 * a2 * a2 * x2 * x2 / 168.0;
  }
  const double s = std::sin(z);
  const double c = std::cos(z);
  return -a * s / x - 2.0 * c / (x * x) + 2.0 * s / (a * x * x * x);
}

}  // namespace

FixedbClass fixedb_class(Kernel k) {
  switch (k) {
    case Kernel::Bartlett: return FixedbClass::Bartlett;
    case Kernel::Parzen: return FixedbClass::Type2;
    case Kernel::QuadraticSpectral:
    case Kernel::Daniell: return FixedbClass::Type1;
  }
  throw std::logic_error("unknown kernel");
}

double kernel_weight(Kernel k, double x) {
  const double ax = std::abs(x);
  switch (k) {
    case Kernel::Bartlett:
      return ax < 1.0 ? 1.0 - ax : 0.0;
    case Kernel::Parzen:
      if (ax <= 0.5) return 1.0 - 6.0 * ax * ax + 6.0 * ax * ax * ax;
      if (ax <= 1.0) {
        const double w = 1.0 - ax;
        return 2.0 * w * w * w;
      }
      return 0.0;
    case Kernel::QuadraticSpectral:
      return qs_weight_z(kQsScale * x);
    case Kernel::Daniell:
      return daniell_weight(x);
  }
  throw std::logic_error("unknown kernel");
}

double kernel_second_derivative(Kernel k, double x) {
  const double ax = std::abs(x);
  switch (k) {
    case Kernel::Bartlett:
      throw std::logic_error("Bartlett kernel has no usable second derivative");
    case Kernel::Parzen:
      // Piecewise cubic: k'' is continuous on (-1, 1), zero outside.
      if (ax <= 0.5) return -12.0 + 36.0 * ax;
      if (ax < 1.0) return 12.0 * (1.0 - ax);
      return 0.0;
    case Kernel::QuadraticSpectral:
      return kQsScale * kQsScale * qs_second_derivative_z(kQsScale * x);
    case Kernel::Daniell:
      return daniell_second_derivative(x);
  }
  throw std::logic_error("unknown kernel");
}

double kernel_left_derivative_at_one(Kernel k) {
  if (fixedb_class(k) != FixedbClass::Type2)
    throw std::logic_error("left edge derivative defined only for Type2 kernels");
  // Parzen: k(x) = 2 (1-x)^3 on [1/2, 1], so k'(1-) = 0.
  return 0.0;
}

int kernel_exponent(Kernel k) { return k == Kernel::Bartlett ? 1 : 2; }

double kernel_moment(Kernel k) {
  switch (k) {
    case Kernel::Bartlett: return 1.0;            // (1 - (1-x)) / x
    case Kernel::Parzen: return 6.0;              // from 1 - 6x^2 + 6x^3
    case Kernel::QuadraticSpectral:
      return 18.0 * kPi * kPi / 125.0;            // c^2/10 with c = 6*pi/5
    case Kernel::Daniell: return kPi * kPi / 6.0; // sinc series
  }
  throw std::logic_error("unknown kernel");
}

double kernel_l2_norm(Kernel k) {
  switch (k) {
    case Kernel::Bartlett: return 2.0 / 3.0;
    case Kernel::Parzen: return 151.0 / 280.0;
    case Kernel::QuadraticSpectral: return 1.0;
    case Kernel::Daniell: return 1.0;
  }
  throw std::logic_error("unknown kernel");
}

double bandwidth_constant(Kernel k) {
  const double q = kernel_exponent(k);
  const double kq = kernel_moment(k);
  return std::pow(q * kq * kq / kernel_l2_norm(k), 1.0 / (2.0 * q + 1.0));
}

std::string to_string(Kernel k) {
  switch (k) {
    case Kernel::Bartlett: return "bartlett";
    case Kernel::Parzen: return "parzen";
    case Kernel::QuadraticSpectral: return "qs";
    case Kernel::Daniell: return "daniell";
  }
  throw std::logic_error("unknown kernel");
}

Kernel kernel_from_string(const std::string& name) {
  std::string s;
  s.reserve(name.size());
  for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "bartlett") return Kernel::Bartlett;
  if (s == "parzen") return Kernel::Parzen;
  if (s == "qs" || s == "quadratic-spectral" || s == "quadraticspectral") return Kernel::QuadraticSpectral;
  if (s == "daniell") return Kernel::Daniell;
  throw std::invalid_argument("unknown kernel name: '" + name +
                              "' (expected bartlett, parzen, qs, or daniell)");
}

}  // namespace trendratio
