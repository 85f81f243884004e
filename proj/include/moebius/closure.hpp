#pragma once

#include "moebius/projective.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace moebius {

/// Absolute slack on closed-region inequalities.
inline constexpr Real tau_mem = 1e-9L;
/// Width of the degenerate diagonal region.
inline constexpr Real tau_diag = 1e-9L;

struct ClosureVerdict {
    bool in_closure = false;
    std::optional<std::int64_t> witness_k;
    /// In units of log_b: max over integers k of min(k - lo, hi - k) for the
    /// admissible interval [lo, hi]. Positive inside, negative outside.
    Real margin = 0;
    /// The admissible interval [log_b det, log_b(sigma / det)].
    Real lo = 0;
    Real hi = 0;
};

/// delta-normalized coefficients of a real map in F+ (nonnegative
/// coefficients, delta != 0, det >= 0); NotInDomain otherwise.
inline std::array<Real, 3> f_plus_coefficients(const ProjectiveMap<Real>& f)
{
    auto n = delta_normalized(f.rep());
    if (!n)
        throw Error(Errc::NotInDomain, "delta = 0");
    auto [alpha, beta, gamma] = *n;
    const Real eps = 4 * std::numeric_limits<Real>::epsilon();
    if (alpha < -eps || beta < -eps || gamma < -eps)
        throw Error(Errc::NotInDomain, "coefficients must be nonnegative");
    alpha = std::max(alpha, Real(0));
    beta = std::max(beta, Real(0));
    gamma = std::max(gamma, Real(0));
    if (alpha - beta * gamma < -eps * (alpha + beta * gamma))
        throw Error(Errc::NotInDomain, "det < 0");
    return {alpha, beta, gamma};
}

/// Whether det(f) <= min(b^k, b^-k sigma(f)) holds for some integer k.
/// Candidate k come from the closed-form interval; k_window clamps them.
inline ClosureVerdict in_U(const ProjectiveMap<Real>& f, Real b, std::int64_t k_window = 4096)
{
    if (!(b > 1))
        throw Error(Errc::DomainError, "in_U needs b > 1");
    auto [alpha, beta, gamma] = f_plus_coefficients(f);
    Real det = std::max(alpha - beta * gamma, Real(0));
    Real sigma = alpha * alpha;
    ClosureVerdict v;
    if (det == 0) {
        // Only reachable with exact cancellation; every k is admissible.
        v.in_closure = true;
        v.witness_k = 0;
        v.lo = -std::numeric_limits<Real>::infinity();
        v.hi = std::numeric_limits<Real>::infinity();
        v.margin = std::numeric_limits<Real>::infinity();
        return v;
    }
    const Real ln_b = std::log(b);
    v.lo = std::log(det) / ln_b;
    v.hi = sigma > 0 ? std::log(sigma / det) / ln_b : -std::numeric_limits<Real>::infinity();
    if (!std::isfinite(v.hi)) {
        v.margin = -std::numeric_limits<Real>::infinity();
        return v;
    }
    auto admissible = [&](std::int64_t k) {
        Real bk = std::pow(b, static_cast<Real>(k));
        return det <= std::min(bk, sigma / bk) * (1 + 1e-12L) + tau_mem;
    };
    auto clamp = [&](Real k) {
        return static_cast<std::int64_t>(std::max<Real>(-k_window, std::min<Real>(k_window, k)));
    };
    Real mid = (v.lo + v.hi) / 2;
    v.margin = -std::numeric_limits<Real>::infinity();
    for (std::int64_t k : {clamp(std::floor(mid)), clamp(std::ceil(mid))}) {
        Real m = std::min(static_cast<Real>(k) - v.lo, v.hi - static_cast<Real>(k));
        if (m > v.margin || (m == v.margin && v.witness_k && k < *v.witness_k)) {
            v.margin = m;
            v.witness_k = k;
        }
    }
    // The best-margin k settles membership up to the slack; neighbours cover
    // boundary cases where rounding moved the interval by an ulp.
    std::int64_t best = *v.witness_k;
    v.witness_k.reset();
    for (std::int64_t k : {best, best - 1, best + 1}) {
        if (k < -k_window || k > k_window)
            continue;
        if (admissible(k)) {
            v.in_closure = true;
            v.witness_k = k;
            break;
        }
    }
    return v;
}

/// Base point and parameters of the orbit region Omega(x, y).
struct OrbitRegionQuery {
    Real x = 1;
    Real y = 1;
    Real a = 1;
    Real b = 2;
};

namespace detail {

inline void require_positive(Real v, const char* what)
{
    if (!(v > 0) || !std::isfinite(v))
        throw Error(Errc::DomainError, std::string(what) + " must be positive and finite");
}

/// (x, y) replaced by (a/x, a/y) when x < y.
inline std::pair<Real, Real> below_diagonal(Real x, Real y, Real a)
{
    if (x < y)
        return {a / x, a / y};
    return {x, y};
}

inline bool on_diagonal(Real u, Real v)
{
    return std::abs(u - v) <= tau_diag * std::max<Real>(1, std::max(u, v));
}

/// Inequality (u >= v >= max(u - x + y, uxy / (ux - uy + xy))) for x > y, u >= v.
inline bool omega_inequality(Real u, Real v, Real x, Real y)
{
    Real tol = tau_mem * std::max<Real>(1, std::max(u, v));
    Real line = u - x + y;
    Real hyper = u * x * y / (u * x - u * y + x * y);
    return u + tol >= v && v + tol >= std::max(line, hyper);
}

} // namespace detail

/// Membership of p = (u, v) in Omega(x, y), the region bounded by the
/// hyperbola through (0,0) and (x,y), the slope-1 half-line from (x,y), and
/// their images under (u, v) -> (a/u, a/v).
inline bool omega_contains(Real u, Real v, const OrbitRegionQuery& q)
{
    detail::require_positive(u, "u");
    detail::require_positive(v, "v");
    detail::require_positive(q.x, "x");
    detail::require_positive(q.y, "y");
    detail::require_positive(q.a, "a");
    auto [x, y] = detail::below_diagonal(q.x, q.y, q.a);
    auto [pu, pv] = detail::below_diagonal(u, v, q.a);
    if (detail::on_diagonal(x, y))
        return detail::on_diagonal(pu, pv);
    return detail::omega_inequality(pu, pv, x, y);
}

struct OrbitClosureVerdict {
    bool contained = false;
    std::optional<std::int64_t> witness_k;
    /// Analytic window [k_lo, k_hi]; empty when k_lo > k_hi.
    std::int64_t k_lo = 0;
    std::int64_t k_hi = 0;
    /// True when the analytic window was not usable and +-64 was scanned.
    bool fallback = false;
};

/// Membership in the union over k of Omega(b^k x, b^k y). For u > v and x > y
/// the line constraint gives b^k >= (u - v)/(x - y) and the hyperbola gives
/// b^k <= uv(x - y)/(xy(u - v)), so only k in that window can succeed.
inline OrbitClosureVerdict orbit_closure_contains(Real u, Real v, const OrbitRegionQuery& q)
{
    detail::require_positive(u, "u");
    detail::require_positive(v, "v");
    detail::require_positive(q.x, "x");
    detail::require_positive(q.y, "y");
    detail::require_positive(q.a, "a");
    if (!(q.b > 1))
        throw Error(Errc::DomainError, "b must exceed 1");
    OrbitClosureVerdict out;
    auto [x, y] = detail::below_diagonal(q.x, q.y, q.a);
    auto [pu, pv] = detail::below_diagonal(u, v, q.a);
    if (detail::on_diagonal(pu, pv)) {
        out.contained = true;
        return out;
    }
    if (detail::on_diagonal(x, y))
        return out;
    auto test = [&](std::int64_t k) {
        Real s = std::pow(q.b, static_cast<Real>(k));
        return detail::omega_inequality(pu, pv, s * x, s * y);
    };
    const Real ln_b = std::log(q.b);
    Real lo = std::log((pu - pv) / (x - y)) / ln_b;
    Real hi = std::log(pv * pu * (x - y) / (x * y * (pu - pv))) / ln_b;
    if (std::isfinite(lo) && std::isfinite(hi)) {
        out.k_lo = static_cast<std::int64_t>(std::ceil(lo));
        out.k_hi = static_cast<std::int64_t>(std::floor(hi));
        for (std::int64_t k = out.k_lo - 1; k <= std::max(out.k_lo, out.k_hi) + 1; ++k) {
            if (test(k)) {
                out.contained = true;
                out.witness_k = k;
                return out;
            }
        }
        return out;
    }
    out.fallback = true;
    out.k_lo = -64;
    out.k_hi = 64;
    for (std::int64_t k = -64; k <= 64; ++k) {
        if (test(k)) {
            out.contained = true;
            out.witness_k = k;
            break;
        }
    }
    return out;
}

struct Polyline {
    std::string name;
    std::vector<std::pair<Real, Real>> points;
};

/// n-point samplings of the boundary curves of Omega(x, y): the hyperbola
/// from (0,0) to (x,y), the slope-1 half-line from (x,y) (cut at u = x + extent),
/// and both images under (u, v) -> (a/u, a/v). A diagonal base yields the
/// single segment v = u on [0, extent].
inline std::vector<Polyline> omega_boundary(const OrbitRegionQuery& q, int n, Real extent = 0)
{
    if (n < 2)
        throw Error(Errc::DomainError, "need at least 2 points per curve");
    detail::require_positive(q.x, "x");
    detail::require_positive(q.y, "y");
    detail::require_positive(q.a, "a");
    auto [x, y] = detail::below_diagonal(q.x, q.y, q.a);
    if (!(extent > 0))
        extent = 2 * std::max({x, y, q.a / y});
    std::vector<Polyline> out;
    if (detail::on_diagonal(x, y)) {
        Polyline diag{"diagonal", {}};
        for (int i = 0; i < n; ++i) {
            Real t = extent * i / (n - 1);
            diag.points.emplace_back(t, t);
        }
        out.push_back(std::move(diag));
        return out;
    }
    Polyline h{"hyperbola", {}}, l{"line", {}}, ih{"hyperbola_image", {}}, il{"line_image", {}};
    for (int i = 0; i < n; ++i) {
        Real u = x * i / (n - 1);
        Real v = u == 0 ? Real(0) : u * x * y / (u * x - u * y + x * y);
        h.points.emplace_back(u, v);
        if (u > 0)
            ih.points.emplace_back(q.a / u, q.a / v);
        Real lu = x + extent * i / (n - 1);
        Real lv = lu - x + y;
        l.points.emplace_back(lu, lv);
        il.points.emplace_back(q.a / lu, q.a / lv);
    }
    out.push_back(std::move(h));
    out.push_back(std::move(l));
    out.push_back(std::move(ih));
    out.push_back(std::move(il));
    return out;
}

} // namespace moebius
