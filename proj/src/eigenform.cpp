#include "eigenform.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <stdexcept>

#include "primes.hpp"
#include "series.hpp"

namespace heckescope {

namespace {

// weight -> (parent weight, multiplier); weight 12 is the eta product.
struct ChainStep {
    int weight;
    const char* label;
    int parent;       // 0 for the base form
    char multiplier;  // '4' = E4, '6' = E6
};

constexpr ChainStep kChain[] = {
    {12, "delta", 0, 0},     {16, "delta16", 12, '4'}, {18, "delta18", 12, '6'},
    {20, "delta20", 16, '4'}, {22, "delta22", 16, '6'}, {26, "delta26", 20, '6'},
};

const ChainStep& chain_step(int weight) {
    for (const auto& s : kChain)
        if (s.weight == weight) return s;
    throw std::invalid_argument("unsupported weight " + std::to_string(weight) +
                                " (supported: 12, 16, 18, 20, 22, 26)");
}

std::string cache_path(const std::string& cache_dir, const std::string& label) {
    return cache_dir + "/" + label + ".hscf";
}

std::vector<mpz_class> build_coeffs(int weight, uint64_t n_max, const std::string& cache_dir);

std::vector<mpz_class> load_or_build(int weight, uint64_t n_max,
                                     const std::string& cache_dir) {
    const ChainStep& step = chain_step(weight);
    if (!cache_dir.empty()) {
        auto cached = load_table_cache(cache_path(cache_dir, step.label), weight, n_max);
        if (cached) {
            std::vector<mpz_class> coeffs;
            coeffs.reserve(n_max);
            for (uint64_t n = 1; n <= n_max; ++n) coeffs.push_back(cached->coeff(n));
            return coeffs;
        }
    }
    std::vector<mpz_class> coeffs = build_coeffs(weight, n_max, cache_dir);
    if (!cache_dir.empty()) {
        std::filesystem::create_directories(cache_dir);
        EigenformTable t({step.weight, 1, step.label}, coeffs);
        save_table_cache(t, cache_path(cache_dir, step.label));
    }
    return coeffs;
}

std::vector<mpz_class> build_coeffs(int weight, uint64_t n_max,
                                    const std::string& cache_dir) {
    const ChainStep& step = chain_step(weight);
    if (step.parent == 0) {
        auto eta = series::eta_pow24(n_max - 1);  // a(n) = [q^{n-1}] eta^24
        return series::to_mpz(eta);
    }
    std::vector<mpz_class> parent = load_or_build(step.parent, n_max, cache_dir);
    std::vector<series::int128> eis = step.multiplier == '4'
                                          ? series::eisenstein_e4(n_max - 1)
                                          : series::eisenstein_e6(n_max - 1);
    return series::kronecker_product(parent, eis, n_max - 1);
}

mpz_class pk1(const EigenformTable& table, uint64_t p) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), p, static_cast<unsigned long>(table.weight() - 1));
    return r;
}

void require_table_prime(const EigenformTable& table, uint64_t p) {
    if (!primes::is_prime_u64(p))
        throw std::invalid_argument("p = " + std::to_string(p) + " is not prime");
    if (p > table.n_max())
        throw std::out_of_range("p = " + std::to_string(p) + " exceeds table size " +
                                std::to_string(table.n_max()));
}

}  // namespace

const std::vector<FormId>& builtin_forms() {
    static const std::vector<FormId> forms = [] {
        std::vector<FormId> v;
        for (const auto& s : kChain) v.push_back({s.weight, 1, s.label});
        return v;
    }();
    return forms;
}

FormId form_by_label(const std::string& label) {
    for (const auto& f : builtin_forms())
        if (f.label == label) return f;
    throw std::invalid_argument("unknown form label \"" + label + "\"");
}

FormId form_by_weight(int weight) {
    return {chain_step(weight).weight, 1, chain_step(weight).label};
}

EigenformTable::EigenformTable(FormId form, std::vector<mpz_class> coeffs)
    : form_(std::move(form)), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty() || coeffs_[0] != 1)
        throw std::invalid_argument("coefficient table must start with a(1) = 1");
}

const mpz_class& EigenformTable::coeff(uint64_t n) const {
    if (n == 0 || n > coeffs_.size())
        throw std::out_of_range("coefficient index " + std::to_string(n) +
                                " outside 1.." + std::to_string(coeffs_.size()));
    return coeffs_[n - 1];
}

std::shared_ptr<const EigenformTable> build_form(const FormId& form, uint64_t n_max,
                                                 const std::string& cache_dir) {
    chain_step(form.weight);  // validates weight
    if (form.level != 1) throw std::invalid_argument("only level 1 is supported");
    if (n_max == 0) throw std::invalid_argument("n_max must be positive");
    if (n_max > kMaxTableSize)
        throw std::invalid_argument("n_max " + std::to_string(n_max) +
                                    " exceeds the pipeline limit " +
                                    std::to_string(kMaxTableSize));
    return std::make_shared<EigenformTable>(form_by_weight(form.weight),
                                            load_or_build(form.weight, n_max, cache_dir));
}

// ---- binary cache -----------------------------------------------------

namespace {

constexpr char kMagic[4] = {'H', 'S', 'C', 'F'};
constexpr uint16_t kVersion = 1;

void put_u16(std::string& s, uint16_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>(v >> 8));
}
void put_u64(std::string& s, uint64_t v) {
    for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

void save_table_cache(const EigenformTable& table, const std::string& path) {
    const uint64_t n_max = table.n_max();
    std::size_t width = 1;
    for (uint64_t n = 1; n <= n_max; ++n) {
        std::size_t bits = mpz_sizeinbase(table.coeff(n).get_mpz_t(), 2) + 1;  // sign bit
        width = std::max(width, (bits + 7) / 8);
    }
    if (width > 255) throw std::runtime_error("coefficients too wide for cache format");

    std::string header;
    header.append(kMagic, 4);
    put_u16(header, kVersion);
    put_u16(header, static_cast<uint16_t>(table.weight()));
    put_u64(header, n_max);
    header.push_back(static_cast<char>(width));

    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write cache file " + path);
    std::fwrite(header.data(), 1, header.size(), f);

    mpz_class tmp;
    const mpz_class wrap = mpz_class(1) << (8 * width);
    std::vector<unsigned char> buf(width);
    for (uint64_t n = 1; n <= n_max; ++n) {
        tmp = table.coeff(n);
        if (tmp < 0) tmp += wrap;  // two's complement
        std::fill(buf.begin(), buf.end(), 0);
        std::size_t written = 0;
        mpz_export(buf.data(), &written, -1, 1, 0, 0, tmp.get_mpz_t());
        std::fwrite(buf.data(), 1, width, f);
    }
    if (std::fclose(f) != 0) throw std::runtime_error("error closing cache file " + path);
}

std::optional<EigenformTable> load_table_cache(const std::string& path, int weight,
                                               uint64_t n_max) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) return std::nullopt;
    struct Closer {
        std::FILE* f;
        ~Closer() { std::fclose(f); }
    } closer{f};

    unsigned char header[17];
    if (std::fread(header, 1, sizeof header, f) != sizeof header) return std::nullopt;
    if (std::memcmp(header, kMagic, 4) != 0) return std::nullopt;
    uint16_t version = header[4] | (header[5] << 8);
    uint16_t file_weight = header[6] | (header[7] << 8);
    uint64_t file_n_max = 0;
    for (int i = 0; i < 8; ++i) file_n_max |= static_cast<uint64_t>(header[8 + i]) << (8 * i);
    std::size_t width = header[16];
    if (version != kVersion || file_weight != weight || file_n_max < n_max || width == 0)
        return std::nullopt;

    std::vector<mpz_class> coeffs;
    coeffs.reserve(n_max);
    std::vector<unsigned char> buf(width);
    const mpz_class wrap = mpz_class(1) << (8 * width);
    const mpz_class half = mpz_class(1) << (8 * width - 1);
    mpz_class tmp;
    for (uint64_t n = 1; n <= n_max; ++n) {
        if (std::fread(buf.data(), 1, width, f) != width) return std::nullopt;
        mpz_import(tmp.get_mpz_t(), width, -1, 1, 0, 0, buf.data());
        if (tmp >= half) tmp -= wrap;
        coeffs.push_back(tmp);
    }
    try {
        return EigenformTable(form_by_weight(weight), std::move(coeffs));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

// ---- prime-power values and identity checks ---------------------------

PrimePowerValue coeff_at_prime_power(const EigenformTable& table, uint64_t p, uint32_t m) {
    require_table_prime(table, p);
    PrimePowerValue out{p, m, 1};
    if (m == 0) return out;
    const mpz_class& ap = table.coeff(p);
    if (m == 1) {
        out.value = ap;
        return out;
    }
    const mpz_class q = pk1(table, p);
    mpz_class prev = 1, cur = ap, next;
    for (uint32_t j = 1; j < m; ++j) {
        next = ap * cur - q * prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    out.value = std::move(cur);
    return out;
}

Real normalized_lambda_real(const EigenformTable& table, uint64_t p, mpfr_prec_t prec) {
    require_table_prime(table, p);
    const mpz_class& ap = table.coeff(p);
    const mpz_class four_pk1 = 4 * pk1(table, p);
    if (ap * ap > four_pk1)
        throw std::domain_error("Deligne bound violated at p = " + std::to_string(p) +
                                " for " + table.label());
    Real lam = Real(ap, prec) / sqrt(Real(four_pk1, prec));
    Real one(1L, prec);
    if (lam > one) lam = one;
    if (lam < -one) lam = -one;
    return lam;
}

NormalizedAngle normalized_lambda(const EigenformTable& table, uint64_t p) {
    Real lam = normalized_lambda_real(table, p, 128);
    double d = lam.to_double();
    if (d > 1.0) d = 1.0;
    if (d < -1.0) d = -1.0;
    return {p, d};
}

double lucas_closed_form_check(const EigenformTable& table, uint64_t p, uint32_t n,
                               mpfr_prec_t prec) {
    if (n < 2) throw std::invalid_argument("lucas_closed_form_check requires n >= 2");
    require_table_prime(table, p);
    const mpz_class exact = coeff_at_prime_power(table, p, n - 1).value;

    const mpz_class& ap = table.coeff(p);
    const mpz_class q = pk1(table, p);
    const mpz_class disc = ap * ap - 4 * q;

    Real closed(prec);
    Real a_real(ap, prec);
    Real half(0.5, prec);
    if (sgn(disc) < 0) {
        // conjugate roots (alpha^n - beta^n)/(alpha - beta) = Im(alpha^n)/Im(alpha)
        Real s = sqrt(Real(-disc, prec)) * half;
        ComplexReal alpha{a_real * half, s};
        ComplexReal an = ComplexReal::pow(alpha, n);
        closed = an.im / s;
    } else {
        Real s = sqrt(Real(disc, prec)) * half;
        Real alpha = a_real * half + s;
        Real beta = a_real * half - s;
        closed = (Real::pow_ui(alpha, n) - Real::pow_ui(beta, n)) / (s + s);
    }

    Real err = abs(Real(exact, prec) - closed);
    Real denom(exact, prec);
    denom = abs(denom);
    if (denom < Real(1L, prec)) denom = Real(1L, prec);
    return (err / denom).to_double();
}

LucasDivisibility verify_lucas_divisibility(const EigenformTable& table, uint64_t p,
                                            uint32_t n) {
    const mpz_class an = coeff_at_prime_power(table, p, n).value;
    for (uint32_t d = 1; d <= n + 1; ++d) {
        if ((n + 1) % d != 0) continue;
        const mpz_class ad = coeff_at_prime_power(table, p, d - 1).value;
        if (ad == 0) continue;
        if (!mpz_divisible_p(an.get_mpz_t(), ad.get_mpz_t())) return {false, d, n};
    }
    return {true, 0, 0};
}

ProductIdentityResidual chebyshev_product_identity_check(const EigenformTable& table,
                                                         uint64_t p, uint32_t q,
                                                         mpfr_prec_t prec) {
    if (q < 3 || q % 2 == 0 || !primes::is_prime_u64(q))
        throw std::invalid_argument("q must be an odd prime");
    require_table_prime(table, p);
    const uint32_t m = q - 1;
    const mpz_class exact = coeff_at_prime_power(table, p, m).value;

    const Real lam = normalized_lambda_real(table, p, prec);
    const Real lam2 = lam * lam;
    const Real pi = Real::pi(prec);
    const Real q_real(static_cast<long>(q), prec);

    // (4 p^{k-1})^{(q-1)/2} is an exact integer
    mpz_class scale;
    mpz_class base = 4 * pk1(table, p);
    mpz_pow_ui(scale.get_mpz_t(), base.get_mpz_t(), m / 2);

    Real prod(1L, prec);
    for (uint32_t j = 1; j <= m / 2; ++j) {
        Real c = cos(pi * Real(static_cast<long>(j), prec) / q_real);
        prod *= lam2 - c * c;
    }
    Real rhs = Real(scale, prec) * prod;

    Real denom = abs(Real(exact, prec));
    if (denom < Real(1L, prec)) denom = Real(1L, prec);
    ProductIdentityResidual out;
    out.product_residual = (abs(Real(exact, prec) - rhs) / denom).to_double();

    // a_f(p^m) = p^{m(k-1)/2} U_m(lambda); m even so the power is integral
    mpz_class pm;
    mpz_ui_pow_ui(pm.get_mpz_t(), p, static_cast<unsigned long>(m) * (table.weight() - 1) / 2);
    Real u_prev(1L, prec), u_cur = lam + lam;
    for (uint32_t j = 2; j <= m; ++j) {
        Real u_next = (lam + lam) * u_cur - u_prev;
        u_prev = std::move(u_cur);
        u_cur = std::move(u_next);
    }
    Real um = m == 0 ? Real(1L, prec) : u_cur;
    Real rhs2 = Real(pm, prec) * um;
    out.um_residual = (abs(Real(exact, prec) - rhs2) / denom).to_double();
    return out;
}

}  // namespace heckescope
