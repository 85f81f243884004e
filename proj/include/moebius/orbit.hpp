#pragma once

#include "moebius/closure.hpp"

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <unordered_set>
#include <utility>
#include <vector>

namespace moebius {

/// theta(x) = 1/(x+1) carries (0, inf) onto (0, 1).
inline Mat2<Real> theta_matrix() { return {0, 1, 1, 1}; }
inline Mat2<Real> theta_inverse_matrix() { return {-1, 1, 1, 0}; }

/// theta o f o theta^-1.
inline ProjectiveMap<Real> conjugate_by_theta(const ProjectiveMap<Real>& f)
{
    return ProjectiveMap<Real>::from(theta_matrix() * f.rep() * theta_inverse_matrix());
}

/// theta^-1 o f o theta.
inline ProjectiveMap<Real> unconjugate_by_theta(const ProjectiveMap<Real>& f)
{
    return ProjectiveMap<Real>::from(theta_inverse_matrix() * f.rep() * theta_matrix());
}

struct OrbitSampleOptions {
    Real a = 1;
    Real b = 2;
    /// Number of syllables R^e or S^e applied, e in [1, max_exponent].
    int depth = 10;
    int grid_n = 21;
    int max_exponent = 64;
    Real start_x = 0;
    Real start_y = 1;
    /// Dedup lattice spacing is 1/(dedup_factor grid_n). At 4 the pruning
    /// starves the frontier before the edge cells near (0,1) and (1,0) fill.
    int dedup_factor = 16;
    std::size_t max_points = 4000000;
};

struct OrbitCoverage {
    /// Max over grid cells of the distance from the cell centre to the orbit.
    Real coverage = 0;
    int grid_n = 0;
    int depth = 0;
    std::size_t points = 0;
    /// Row-major, cell (i, j) centred at ((i + 1/2)/n, (j + 1/2)/n).
    std::vector<Real> cell_distance;
    /// Coverage after each depth, starting with depth 0.
    std::vector<Real> coverage_by_depth;
};

namespace detail {

inline Real moebius_value(const Mat2<Real>& m, Real x)
{
    return (m.m11 * x + m.m12) / (m.m21 * x + m.m22);
}

/// Lowers each cell's distance using pts.
inline void update_cell_distances(std::vector<Real>& dist, const std::vector<std::pair<Real, Real>>& pts, int n)
{
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Real cx = (i + Real(0.5)) / n;
            Real cy = (j + Real(0.5)) / n;
            Real& best = dist[static_cast<std::size_t>(i) * n + j];
            for (const auto& [px, py] : pts)
                best = std::min(best, std::hypot(px - cx, py - cy));
        }
    }
}

} // namespace detail

/// Breadth-first orbit of a point of [0,1]^2 under the theta-conjugates of
/// R(x) = 1 + a/x and S(x) = x/b acting on both coordinates. Each level
/// applies one syllable; points are deduplicated on a lattice of spacing
/// 1/(4 grid_n), keeping the first point that lands in each lattice cell.
inline OrbitCoverage dense_orbit_sample(const OrbitSampleOptions& opt)
{
    if (!(opt.a > 0) || !(opt.b > 1))
        throw Error(Errc::DomainError, "orbit sampling needs a > 0 and b > 1");
    if (opt.depth < 0 || opt.depth > 24)
        throw Error(Errc::DomainError, "depth must lie in [0, 24]");
    if (opt.grid_n < 1 || opt.max_exponent < 1 || opt.dedup_factor < 1)
        throw Error(Errc::DomainError, "grid and exponent bound must be positive");
    Mat2<Real> R{1, opt.a, 1, 0};
    Mat2<Real> S{1, 0, 0, opt.b};
    const Mat2<Real> gens[2] = {theta_matrix() * R * theta_inverse_matrix(),
                                theta_matrix() * S * theta_inverse_matrix()};
    const Real resolution = Real(1) / (static_cast<Real>(opt.dedup_factor) * opt.grid_n);
    auto key = [&](Real x, Real y) {
        auto ix = static_cast<std::int64_t>(std::floor(x / resolution));
        auto iy = static_cast<std::int64_t>(std::floor(y / resolution));
        return (ix << 32) ^ (iy & 0xffffffff);
    };
    std::unordered_set<std::int64_t> seen;
    std::vector<std::pair<Real, Real>> all{{opt.start_x, opt.start_y}};
    std::vector<std::pair<Real, Real>> frontier = all;
    seen.insert(key(opt.start_x, opt.start_y));
    OrbitCoverage out;
    out.grid_n = opt.grid_n;
    out.depth = opt.depth;
    out.cell_distance.assign(static_cast<std::size_t>(opt.grid_n) * opt.grid_n, std::numeric_limits<Real>::infinity());
    auto coverage = [&] { return *std::max_element(out.cell_distance.begin(), out.cell_distance.end()); };
    detail::update_cell_distances(out.cell_distance, all, opt.grid_n);
    out.coverage_by_depth.push_back(coverage());
    for (int level = 1; level <= opt.depth; ++level) {
        std::vector<std::pair<Real, Real>> next;
        for (const auto& [x0, y0] : frontier) {
            for (const auto& g : gens) {
                Real x = x0, y = y0;
                for (int e = 1; e <= opt.max_exponent; ++e) {
                    x = detail::moebius_value(g, x);
                    y = detail::moebius_value(g, y);
                    if (!std::isfinite(x) || !std::isfinite(y))
                        break;
                    if (seen.insert(key(x, y)).second) {
                        next.emplace_back(x, y);
                        if (all.size() + next.size() > opt.max_points)
                            throw Error(Errc::BudgetExceeded, "orbit sample exceeds point budget");
                    }
                }
            }
        }
        detail::update_cell_distances(out.cell_distance, next, opt.grid_n);
        all.insert(all.end(), next.begin(), next.end());
        frontier = std::move(next);
        out.coverage_by_depth.push_back(coverage());
    }
    out.coverage = coverage();
    out.points = all.size();
    return out;
}

} // namespace moebius
