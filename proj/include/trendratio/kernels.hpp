// kernels.hpp - covariance-weighting kernels and their analytic constants
#pragma once

#include <string>

namespace trendratio {

// Kernels available for long-run variance estimation.  All are normalized so
// k(0) = 1 and produce positive semidefinite weighted covariance sums.
enum class Kernel { Bartlett, Parzen, QuadraticSpectral, Daniell };

// Classification used by the fixed-bandwidth limit machinery:
//   Type1    - twice continuously differentiable everywhere (QS, Daniell)
//   Type2    - twice continuously differentiable on |x| < 1, zero outside (Parzen)
//   Bartlett - handled by its own closed-form branch
enum class FixedbClass { Type1, Type2, Bartlett };

FixedbClass fixedb_class(Kernel k);

// k(x); defined for all real x, symmetric in x.
double kernel_weight(Kernel k, double x);

// Second derivative k''(x).  Only defined for kernels whose fixed-b branch
// needs it (Type1 everywhere; Type2 on |x| < 1).  Throws for Bartlett.
double kernel_second_derivative(Kernel k, double x);

// One-sided derivative k'(1-) at the support edge, used by the Type2 branch
// boundary term.  Throws for kernels that are not Type2.
double kernel_left_derivative_at_one(Kernel k);

// Characteristic exponent q of the kernel (1 for Bartlett, 2 otherwise).
int kernel_exponent(Kernel k);

// Curvature constant k_q = lim_{x->0} (1 - k(x)) / |x|^q.
double kernel_moment(Kernel k);

// L2 norm: integral of k(x)^2 over the whole real line.
double kernel_l2_norm(Kernel k);

// Plug-in bandwidth constant c_k = (q * k_q^2 / integral k^2)^(1/(2q+1)).
double bandwidth_constant(Kernel k);

std::string to_string(Kernel k);

// Parses "bartlett", "parzen", "qs", "daniell" (case-insensitive); throws
// std::invalid_argument otherwise.
Kernel kernel_from_string(const std::string& name);

}  // namespace trendratio
