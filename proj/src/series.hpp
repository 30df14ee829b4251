#pragma once

// Truncated power-series arithmetic used by the coefficient tables: the
// eta^24 pipeline on fixed-width 128-bit integers, Eisenstein divisor-sum
// sieves, and a Kronecker-substitution product (pack both series into one
// big integer each, one GMP multiply, unpack).

#include <gmpxx.h>

#include <cstdint>
#include <vector>

namespace heckescope::series {

using int128 = __int128;

// Power series are indexed by exponent: s[i] is the coefficient of q^i,
// 0 <= i <= n_max.

// Coefficients of prod_{m>=1} (1-q^m)^24 up to q^n_max, computed by 24
// passes of the pentagonal-number expansion of prod (1-q^m).
// int128 is safe for n_max <= 2e6 (max |coeff| of the final series is
// below 2^124 there); larger requests are rejected upstream.
std::vector<int128> eta_pow24(std::size_t n_max);

// 1 + 240 sum sigma_3(n) q^n  /  1 - 504 sum sigma_5(n) q^n
std::vector<int128> eisenstein_e4(std::size_t n_max);
std::vector<int128> eisenstein_e6(std::size_t n_max);

// Truncated product a*b, keeping exponents <= n_max.
std::vector<mpz_class> kronecker_product(const std::vector<mpz_class>& a,
                                         const std::vector<int128>& b,
                                         std::size_t n_max);

std::vector<mpz_class> to_mpz(const std::vector<int128>& v);

}  // namespace heckescope::series
