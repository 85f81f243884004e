#pragma once

#include "moebius/error.hpp"
#include "moebius/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace moebius {

/// target ~ sum of base^exponent. Exponents may repeat.
template <class T>
struct Expansion {
    std::vector<std::int64_t> exponents;
    Real residual = 0;
    T base{};
};

namespace detail {

inline Real real_power(Real b, std::int64_t e)
{
    return std::pow(b, static_cast<Real>(e));
}

/// Greedy with repeats over the integer powers of `base`. Appends to `out`
/// and returns the remainder. A remainder exactly equal to a power ends the run.
inline Real greedy_terms(Real t, Real base, Real eps, std::size_t max_terms, std::vector<std::int64_t>& out)
{
    const Real ln_base = std::log(base);
    Real rem = t;
    while (rem > eps) {
        if (out.size() >= max_terms)
            throw Error(Errc::BudgetExceeded, "expansion needs more than " + std::to_string(max_terms) + " terms");
        auto alpha = static_cast<std::int64_t>(std::floor(std::log(rem) / ln_base));
        while (real_power(base, alpha) > rem)
            --alpha;
        while (real_power(base, alpha + 1) <= rem)
            ++alpha;
        Real term = real_power(base, alpha);
        out.push_back(alpha);
        if (term == rem)
            return 0;
        rem -= term;
    }
    return rem;
}

} // namespace detail

/// Greedy base-b expansion of t >= 0 with exponents non-increasing.
inline Expansion<Real> greedy_expand_real(Real t, Real b, Real eps, std::size_t max_terms = 4096)
{
    if (!(t >= 0) || !std::isfinite(t))
        throw Error(Errc::DomainError, "expansion target must be finite and >= 0");
    if (!(b > 1))
        throw Error(Errc::DomainError, "expansion base must exceed 1");
    if (!(eps > 0))
        throw Error(Errc::DomainError, "expansion tolerance must be positive");
    Expansion<Real> e;
    e.base = b;
    detail::greedy_terms(t, b, eps, max_terms, e.exponents);
    Real sum = 0;
    for (auto alpha : e.exponents)
        sum += detail::real_power(b, alpha);
    e.residual = std::abs(t - sum);
    return e;
}

/// b^alpha for b = r i: r^alpha i^(alpha mod 4).
inline Complex imaginary_base_power(Real r, std::int64_t alpha)
{
    Real mag = std::pow(r, static_cast<Real>(alpha));
    switch (((alpha % 4) + 4) % 4) {
    case 0: return {mag, 0};
    case 1: return {0, mag};
    case 2: return {-mag, 0};
    default: return {0, -mag};
    }
}

/// Expansion of t in powers of b = r i. Each signed component uses one
/// residue class mod 4 (re > 0: 0, im > 0: 1, re < 0: 2, im < 0: 3) and is
/// expanded greedily in base r^4. Exponents are returned in decreasing order.
inline Expansion<Complex> greedy_expand_complex(Complex t, Complex b, Real eps, std::size_t max_terms = 4096)
{
    if (!(b.real() == 0) || !(std::abs(b.imag()) > 1))
        throw Error(Errc::DomainError, "complex expansion needs b = r i with r > 1");
    if (b.imag() < 0)
        throw Error(Errc::DomainError, "complex expansion needs b = r i with r > 1");
    if (!is_finite(t))
        throw Error(Errc::DomainError, "expansion target must be finite");
    if (!(eps > 0))
        throw Error(Errc::DomainError, "expansion tolerance must be positive");
    const Real r = b.imag();
    const Real r4 = r * r * r * r;
    Expansion<Complex> e;
    e.base = b;
    auto component = [&](Real value, int cls) {
        if (value == 0)
            return;
        Real scale = std::pow(r, static_cast<Real>(cls));
        std::vector<std::int64_t> ks;
        detail::greedy_terms(std::abs(value) / scale, r4, eps / (std::sqrt(Real(2)) * scale),
                             max_terms - std::min(max_terms, e.exponents.size()), ks);
        for (auto k : ks)
            e.exponents.push_back(4 * k + cls);
    };
    component(t.real(), t.real() > 0 ? 0 : 2);
    component(t.imag(), t.imag() > 0 ? 1 : 3);
    std::sort(e.exponents.begin(), e.exponents.end(), std::greater<>());
    Complex sum = 0;
    for (auto alpha : e.exponents)
        sum += imaginary_base_power(r, alpha);
    e.residual = std::abs(t - sum);
    return e;
}

} // namespace moebius
