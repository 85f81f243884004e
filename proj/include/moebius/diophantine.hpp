#pragma once

#include "moebius/error.hpp"
#include "moebius/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <string>

namespace moebius {

/// b^k c^(-l) approximating a target.
struct RatioSolution {
    std::int64_t k = 0;
    std::int64_t l = 0;
    /// k ln b - l ln c; the achieved value is exp of this.
    Real log_achieved = 0;
    Real achieved = 0;
    Real rel_err = 0;
};

struct RatioBounds {
    std::int64_t l_min = 1;
    std::int64_t l_max = 100000;
};

/// Extra acceptance test applied after the tolerance check, for callers
/// whose real constraint is not the ratio error itself.
using RatioAccept = std::function<bool(const RatioSolution&)>;

namespace detail {

inline Real nearest_distance_to_integer(Real x)
{
    return std::abs(x - std::nearbyint(x));
}

inline RatioSolution make_ratio(std::int64_t k, std::int64_t l, Real ln_b, Real ln_c, Real log_target)
{
    RatioSolution s;
    s.k = k;
    s.l = l;
    s.log_achieved = static_cast<Real>(k) * ln_b - static_cast<Real>(l) * ln_c;
    s.achieved = std::exp(s.log_achieved);
    s.rel_err = std::abs(std::expm1(s.log_achieved - log_target));
    return s;
}

} // namespace detail

/// Scans l in [l_min, l_max] and returns the first (smallest l) pair with
/// |b^k c^(-l) - target| / target <= tol. The target is given by its logarithm
/// so that values far outside the floating range stay usable.
inline RatioSolution solve_ratio_log(Real log_target, Real b, Real c, Real tol, RatioBounds bounds = {},
                                     const RatioAccept& accept = {})
{
    if (!(b > 1))
        throw Error(Errc::DomainError, "solve_ratio needs b > 1");
    if (!(c > 0) || c == 1)
        throw Error(Errc::DomainError, "solve_ratio needs c in (0,1) or (1,inf)");
    if (!std::isfinite(log_target))
        throw Error(Errc::DomainError, "solve_ratio needs a positive finite target");
    if (bounds.l_min < 1)
        bounds.l_min = 1;
    const Real ln_b = std::log(b);
    const Real ln_c = std::log(c);
    for (std::int64_t l = bounds.l_min; l <= bounds.l_max; ++l) {
        Real centre = (log_target + static_cast<Real>(l) * ln_c) / ln_b;
        auto k0 = static_cast<std::int64_t>(std::nearbyint(centre));
        std::optional<RatioSolution> best;
        for (std::int64_t k = k0 - 1; k <= k0 + 1; ++k) {
            auto s = detail::make_ratio(k, l, ln_b, ln_c, log_target);
            if (s.rel_err <= tol && (!accept || accept(s)) && (!best || s.rel_err < best->rel_err))
                best = s;
        }
        if (best)
            return *best;
    }
    throw Error(Errc::NotFound, "no (k, l) with l in [" + std::to_string(bounds.l_min) + ", " +
                                    std::to_string(bounds.l_max) + "]");
}

inline RatioSolution solve_ratio(Real target, Real b, Real c, Real tol, RatioBounds bounds = {},
                                 const RatioAccept& accept = {})
{
    if (!(target > 0) || !std::isfinite(target))
        throw Error(Errc::DomainError, "solve_ratio needs a positive finite target");
    return solve_ratio_log(std::log(target), b, c, tol, bounds, accept);
}

/// n theta1 - phi1 + L and n theta2 - phi2 + m both within eps of zero.
struct SimultaneousSolution {
    std::int64_t n = 0;
    std::int64_t m = 0;
    std::int64_t L = 0;
    Real err1 = 0;
    Real err2 = 0;
};

struct SimultaneousBounds {
    std::int64_t n_min = 1;
    std::int64_t n_max = 10000000;
    /// Smallest acceptable m; scanning continues past n whose m falls short.
    std::int64_t m_min = 1;
};

inline SimultaneousSolution solve_simultaneous(Real theta1, Real theta2, Real phi1, Real phi2, Real eps,
                                               SimultaneousBounds bounds = {})
{
    if (!(eps > 0))
        throw Error(Errc::DomainError, "solve_simultaneous needs eps > 0");
    if (bounds.n_min < 1)
        bounds.n_min = 1;
    // Fractional parts advance by a fixed step; they are recomputed from
    // scratch every 4096 steps to stop rounding drift.
    auto frac = [](Real x) { return x - std::floor(x); };
    const Real d1 = frac(theta1), d2 = frac(theta2);
    Real f1 = 0, f2 = 0;
    for (std::int64_t n = bounds.n_min; n <= bounds.n_max; ++n) {
        if ((n - bounds.n_min) % 4096 == 0) {
            f1 = frac(static_cast<Real>(n) * theta1 - phi1);
            f2 = frac(static_cast<Real>(n) * theta2 - phi2);
        } else {
            f1 += d1;
            f1 -= f1 >= 1 ? 1 : 0;
            f2 += d2;
            f2 -= f2 >= 1 ? 1 : 0;
        }
        if (!(std::min(f1, 1 - f1) < 2 * eps) || !(std::min(f2, 1 - f2) < 2 * eps))
            continue;
        Real x1 = static_cast<Real>(n) * theta1 - phi1;
        Real r1 = std::nearbyint(x1);
        Real e1 = std::abs(x1 - r1);
        if (!(e1 < eps))
            continue;
        Real x2 = static_cast<Real>(n) * theta2 - phi2;
        Real r2 = std::nearbyint(x2);
        Real e2 = std::abs(x2 - r2);
        if (!(e2 < eps))
            continue;
        auto m = static_cast<std::int64_t>(-r2);
        if (m < bounds.m_min)
            continue;
        return {n, m, static_cast<std::int64_t>(-r1), e1, e2};
    }
    throw Error(Errc::NotFound, "no n in [" + std::to_string(bounds.n_min) + ", " +
                                    std::to_string(bounds.n_max) + "]");
}

/// Near-relation threshold for independence certificates.
inline constexpr Real tau_rel = 1e-9L;

struct IndependenceCertificate {
    Real theta1 = 0;
    Real theta2 = 0;
    std::int64_t height = 0;
    bool relation_found = false;
    /// Minimal-height relation A + B theta1 + C theta2 ~ 0, when found.
    std::int64_t A = 0, B = 0, C = 0;
    /// Smallest |A + B theta1 + C theta2| seen over nonzero triples.
    Real closest = std::numeric_limits<Real>::infinity();

    std::string verdict() const
    {
        return relation_found ? "RelationFound" : "NoRelationUpToHeight";
    }
};

/// Exhaustive scan over integer triples of height <= H. The first nonzero of
/// (B, C) is made positive; among relations the one of least height wins,
/// ties broken by scan order.
inline IndependenceCertificate independence_certificate(Real theta1, Real theta2, std::int64_t H)
{
    if (H < 1 || H > 10000)
        throw Error(Errc::DomainError, "certificate height must lie in [1, 10000]");
    IndependenceCertificate cert;
    cert.theta1 = theta1;
    cert.theta2 = theta2;
    cert.height = H;
    std::int64_t best_height = H + 1;
    for (std::int64_t B = 0; B <= H; ++B) {
        for (std::int64_t C = (B == 0 ? 1 : -H); C <= H; ++C) {
            Real partial = static_cast<Real>(B) * theta1 + static_cast<Real>(C) * theta2;
            Real a = -std::nearbyint(partial);
            if (std::abs(a) > static_cast<Real>(H))
                continue;
            auto A = static_cast<std::int64_t>(a);
            Real residual = std::abs(a + partial);
            if (residual < cert.closest)
                cert.closest = residual;
            if (residual < tau_rel) {
                std::int64_t h = std::max({std::abs(A), B, std::abs(C)});
                if (h < best_height) {
                    best_height = h;
                    cert.relation_found = true;
                    cert.A = A;
                    cert.B = B;
                    cert.C = C;
                }
            }
        }
    }
    return cert;
}

/// One-number variant: is there A + B theta ~ 0 with B >= 1 and height <= H?
inline IndependenceCertificate independence_certificate(Real theta, std::int64_t H)
{
    if (H < 1 || H > 10000)
        throw Error(Errc::DomainError, "certificate height must lie in [1, 10000]");
    IndependenceCertificate cert;
    cert.theta1 = theta;
    cert.height = H;
    for (std::int64_t B = 1; B <= H; ++B) {
        Real partial = static_cast<Real>(B) * theta;
        Real a = -std::nearbyint(partial);
        if (std::abs(a) > static_cast<Real>(H))
            continue;
        Real residual = std::abs(a + partial);
        cert.closest = std::min(cert.closest, residual);
        if (residual < tau_rel && !cert.relation_found) {
            cert.relation_found = true;
            cert.A = static_cast<std::int64_t>(a);
            cert.B = B;
        }
    }
    return cert;
}

} // namespace moebius
