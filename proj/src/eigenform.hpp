#pragma once

// Exact Fourier coefficients of the six one-dimensional spaces of level-1
// cusp forms (weights 12, 16, 18, 20, 22, 26), prime-power extension via
// the two-term Hecke recurrence, normalized coefficients, and the algebraic
// identity checks that tie prime-power values to Chebyshev polynomials.

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "real.hpp"

namespace heckescope {

struct FormId {
    int weight = 12;
    int level = 1;
    std::string label = "delta";
};

// The six built-in forms. Throws std::invalid_argument for anything else.
const std::vector<FormId>& builtin_forms();
FormId form_by_label(const std::string& label);
FormId form_by_weight(int weight);

class EigenformTable {
public:
    EigenformTable(FormId form, std::vector<mpz_class> coeffs);

    const FormId& form() const { return form_; }
    int weight() const { return form_.weight; }
    const std::string& label() const { return form_.label; }
    uint64_t n_max() const { return coeffs_.size(); }

    // a_f(n), 1 <= n <= n_max
    const mpz_class& coeff(uint64_t n) const;

private:
    FormId form_;
    std::vector<mpz_class> coeffs_;  // coeffs_[n-1] = a_f(n)
};

// Largest n_max the fixed-width series pipeline accepts (the int128 arrays
// are overflow-safe up to here: max |a(n)| <= d(n) n^{11/2} < 2^124).
inline constexpr uint64_t kMaxTableSize = 2'000'000;

// Builds the coefficient table. Weight 12 comes from 24 pentagonal-series
// passes; higher weights multiply lower tables by E4/E6 (single big-integer
// Kronecker product each). When cache_dir is non-empty, tables (including
// chain intermediates) are reused from / written to "<label>.hscf" files.
std::shared_ptr<const EigenformTable> build_form(const FormId& form, uint64_t n_max,
                                                 const std::string& cache_dir = "");

// Binary table cache. Files hold a fixed-width two's-complement dump of
// a_f(1..n_max); a cached table longer than the request loads as a prefix.
void save_table_cache(const EigenformTable& table, const std::string& path);
std::optional<EigenformTable> load_table_cache(const std::string& path, int weight,
                                               uint64_t n_max);

struct PrimePowerValue {
    uint64_t p = 0;
    uint32_t m = 0;
    mpz_class value;
};

// a_f(p^m) by iterating a(p^{j+1}) = a(p) a(p^j) - p^{k-1} a(p^{j-1}).
PrimePowerValue coeff_at_prime_power(const EigenformTable& table, uint64_t p, uint32_t m);

struct NormalizedAngle {
    uint64_t p = 0;
    double lambda = 0.0;
};

// a_f(p) / (2 p^{(k-1)/2}), clamped to [-1,1] against rounding only.
// Throws if the exact Deligne comparison a_f(p)^2 <= 4 p^{k-1} fails.
NormalizedAngle normalized_lambda(const EigenformTable& table, uint64_t p);
Real normalized_lambda_real(const EigenformTable& table, uint64_t p, mpfr_prec_t prec);

// |a_f(p^{n-1}) - (alpha^n - beta^n)/(alpha - beta)| / max(1, |a_f(p^{n-1})|)
// with alpha, beta the roots of x^2 - a_f(p) x + p^{k-1} evaluated at `prec`
// bits. Contract: <= 2^-(prec-10).
double lucas_closed_form_check(const EigenformTable& table, uint64_t p, uint32_t n,
                               mpfr_prec_t prec);

struct LucasDivisibility {
    bool holds = true;
    uint32_t failing_d = 0;
    uint32_t failing_n = 0;
};

// a_f(p^{d-1}) | a_f(p^n) for every d | n+1 with a_f(p^{d-1}) != 0.
LucasDivisibility verify_lucas_divisibility(const EigenformTable& table, uint64_t p,
                                            uint32_t n);

struct ProductIdentityResidual {
    double product_residual = 0.0;  // a_f(p^{q-1}) vs (4p^{k-1})^{(q-1)/2} prod(lambda^2 - cos^2(pi j/q))
    double um_residual = 0.0;       // a_f(p^m) vs p^{m(k-1)/2} U_m(lambda), m = q-1

    double max_residual() const {
        return product_residual > um_residual ? product_residual : um_residual;
    }
};

// Both sides evaluated at `prec` bits. Contract: residuals <= 2^-(prec-8q).
ProductIdentityResidual chebyshev_product_identity_check(const EigenformTable& table,
                                                         uint64_t p, uint32_t q,
                                                         mpfr_prec_t prec);

}  // namespace heckescope
