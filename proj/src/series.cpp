#include "series.hpp"

#include <gmp.h>

#include <cstring>
#include <stdexcept>
#include <utility>

namespace heckescope::series {

namespace {

struct PentTerm {
    std::size_t exponent;
    int sign;  // (-1)^k
};

// Generalized pentagonal exponents k(3k -+ 1)/2 below the cutoff.
std::vector<PentTerm> pentagonal_terms(std::size_t n_max) {
    std::vector<PentTerm> terms;
    for (std::size_t k = 1;; ++k) {
        std::size_t g1 = k * (3 * k - 1) / 2;
        std::size_t g2 = k * (3 * k + 1) / 2;
        if (g1 > n_max && g2 > n_max) break;
        int s = (k % 2 == 0) ? 1 : -1;
        if (g1 <= n_max) terms.push_back({g1, s});
        if (g2 <= n_max) terms.push_back({g2, s});
    }
    return terms;
}

unsigned bit_length(unsigned __int128 v) {
    unsigned bits = 0;
    while (v) {
        ++bits;
        v >>= 1;
    }
    return bits;
}

unsigned __int128 abs128(int128 v) {
    return v < 0 ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
}

}  // namespace

std::vector<int128> eta_pow24(std::size_t n_max) {
    const auto pent = pentagonal_terms(n_max);
    std::vector<int128> cur(n_max + 1, 0), next(n_max + 1);
    cur[0] = 1;
    for (int pass = 0; pass < 24; ++pass) {
        std::memcpy(next.data(), cur.data(), (n_max + 1) * sizeof(int128));
        for (const auto& [g, s] : pent) {
            const int128* src = cur.data();
            int128* dst = next.data() + g;
            std::size_t count = n_max + 1 - g;
            if (s > 0)
                for (std::size_t i = 0; i < count; ++i) dst[i] += src[i];
            else
                for (std::size_t i = 0; i < count; ++i) dst[i] -= src[i];
        }
        std::swap(cur, next);
    }
    return cur;
}

std::vector<int128> eisenstein_e4(std::size_t n_max) {
    std::vector<uint64_t> sigma3(n_max + 1, 0);
    for (uint64_t d = 1; d <= n_max; ++d) {
        uint64_t d3 = d * d * d;
        for (std::size_t m = d; m <= n_max; m += d) sigma3[m] += d3;
    }
    std::vector<int128> e4(n_max + 1);
    e4[0] = 1;
    for (std::size_t n = 1; n <= n_max; ++n)
        e4[n] = 240 * static_cast<int128>(sigma3[n]);
    return e4;
}

std::vector<int128> eisenstein_e6(std::size_t n_max) {
    std::vector<unsigned __int128> sigma5(n_max + 1, 0);
    for (uint64_t d = 1; d <= n_max; ++d) {
        unsigned __int128 d5 = static_cast<unsigned __int128>(d) * d * d * d * d;
        for (std::size_t m = d; m <= n_max; m += d) sigma5[m] += d5;
    }
    std::vector<int128> e6(n_max + 1);
    e6[0] = 1;
    for (std::size_t n = 1; n <= n_max; ++n)
        e6[n] = -504 * static_cast<int128>(sigma5[n]);
    return e6;
}

std::vector<mpz_class> to_mpz(const std::vector<int128>& v) {
    std::vector<mpz_class> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        unsigned __int128 a = abs128(v[i]);
        mpz_class z;
        if (a != 0) mpz_import(z.get_mpz_t(), 2, -1, 8, 0, 0, &a);
        if (v[i] < 0) z = -z;
        out[i] = std::move(z);
    }
    return out;
}

// Kronecker substitution with an additive offset to make every packed slot
// nonnegative: with A'_i = A_i + 2^ea and B'_j = B_j + 2^eb,
//   sum_{i+j=n} A'_i B'_j = C_n + 2^ea PB_n + 2^eb PA_n + 2^(ea+eb) (n+1),
// PA/PB being prefix sums of the signed coefficients. Slots are multiples
// of 64 bits so the big product slices exactly on limb boundaries.
std::vector<mpz_class> kronecker_product(const std::vector<mpz_class>& a,
                                         const std::vector<int128>& b,
                                         std::size_t n_max) {
    if (a.size() < n_max + 1 || b.size() < n_max + 1)
        throw std::invalid_argument("kronecker_product: inputs shorter than n_max");
    const std::size_t len = n_max + 1;

    std::size_t max_bits_a = 1;
    for (std::size_t i = 0; i < len; ++i)
        max_bits_a = std::max(max_bits_a, mpz_sizeinbase(a[i].get_mpz_t(), 2));
    std::size_t max_bits_b = 1;
    for (std::size_t i = 0; i < len; ++i)
        max_bits_b = std::max<std::size_t>(max_bits_b, bit_length(abs128(b[i])));
    if (max_bits_b > 125)
        throw std::invalid_argument("kronecker_product: second factor too wide");

    const std::size_t ea = max_bits_a + 1;  // 2^ea > |A_i|
    const std::size_t eb = max_bits_b + 1;
    // C'_n <= (n+1) 2^(ea+1) 2^(eb+1)
    std::size_t slot_bits = ea + eb + 2 + bit_length(len) + 1;
    slot_bits = (slot_bits + 63) / 64 * 64;
    const std::size_t slot_limbs = slot_bits / 64;
    const std::size_t pack_limbs = len * slot_limbs;

    std::vector<mp_limb_t> pa(pack_limbs, 0), pb(pack_limbs, 0);

    {
        mpz_class tmp, offset = mpz_class(1) << ea;
        for (std::size_t i = 0; i < len; ++i) {
            tmp = a[i] + offset;
            std::size_t written = 0;
            mpz_export(pa.data() + i * slot_limbs, &written, -1, 8, 0, 0, tmp.get_mpz_t());
        }
    }
    for (std::size_t j = 0; j < len; ++j) {
        // eb <= 126, so B_j + 2^eb < 2^127 fits unsigned 128-bit
        unsigned __int128 v = static_cast<unsigned __int128>(b[j]) +
                              (static_cast<unsigned __int128>(1) << eb);
        mp_limb_t* s = pb.data() + j * slot_limbs;
        s[0] = static_cast<mp_limb_t>(v);
        if (slot_limbs > 1) s[1] = static_cast<mp_limb_t>(v >> 64);
    }

    std::vector<mp_limb_t> prod(2 * pack_limbs + 1, 0);
    mpn_mul(prod.data(), pa.data(), pack_limbs, pb.data(), pack_limbs);

    std::vector<mpz_class> result(len);
    std::vector<mpz_class> b_mpz = to_mpz(b);
    mpz_class prefix_a = 0, prefix_b = 0, slice, corr;
    for (std::size_t n = 0; n < len; ++n) {
        prefix_a += a[n];
        prefix_b += b_mpz[n];
        mpz_import(slice.get_mpz_t(), slot_limbs, -1, 8, 0, 0,
                   prod.data() + n * slot_limbs);
        corr = prefix_b << ea;
        slice -= corr;
        corr = prefix_a << eb;
        slice -= corr;
        corr = mpz_class(n + 1) << (ea + eb);
        slice -= corr;
        result[n] = std::move(slice);
    }
    return result;
}

}  // namespace heckescope::series
