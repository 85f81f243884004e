#pragma once

#include "moebius/mat2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace moebius {

/// An invertible LFT: a Mat2 modulo nonzero scalars, held by its canonical
/// representative. Canonical means the largest entry modulus is 1 and the
/// first entry attaining it equals exactly 1 (positive in the real case,
/// zero phase in the complex case).
template <class T>
class ProjectiveMap {
public:
    /// Identity map.
    ProjectiveMap() = default;

    /// Canonicalize m. Throws SingularMatrix when m is (numerically) singular;
    /// pass tau_round when m is a product of invertible factors.
    static ProjectiveMap from(const Mat2<T>& m, Real singular_tol = tau_det)
    {
        if (!m.all_finite())
            throw Error(Errc::DomainError, "matrix has non-finite entries");
        if (numerically_singular(m, singular_tol))
            throw Error(Errc::SingularMatrix, "matrix is singular");
        return ProjectiveMap(normalize(m));
    }

    /// Same as from(), for a map written as (alpha x + beta) / (gamma x + delta).
    static ProjectiveMap lft(const T& alpha, const T& beta, const T& gamma, const T& delta)
    {
        return from(Mat2<T>{alpha, beta, gamma, delta});
    }

    const Mat2<T>& rep() const noexcept { return rep_; }

    Field field() const noexcept { return scalar_traits<T>::field; }

    friend bool operator==(const ProjectiveMap& x, const ProjectiveMap& y) { return x.rep_ == y.rep_; }

    /// Divide by the first entry of largest modulus. Does not check singularity.
    static Mat2<T> normalize(const Mat2<T>& m)
    {
        auto e = m.entries();
        std::size_t pivot = 0;
        auto best = modulus(e[0]);
        for (std::size_t i = 1; i < 4; ++i) {
            auto mod = modulus(e[i]);
            if (mod > best) {
                best = mod;
                pivot = i;
            }
        }
        if (best == 0)
            throw Error(Errc::SingularMatrix, "zero matrix");
        const T& p = e[pivot];
        Mat2<T> out{m.m11 / p, m.m12 / p, m.m21 / p, m.m22 / p};
        // Pin the pivot exactly, rounding could leave it at 1 - ulp.
        switch (pivot) {
        case 0: out.m11 = T(1); break;
        case 1: out.m12 = T(1); break;
        case 2: out.m21 = T(1); break;
        default: out.m22 = T(1); break;
        }
        return out;
    }

private:
    explicit ProjectiveMap(const Mat2<T>& rep) : rep_(rep) {}

    Mat2<T> rep_ = Mat2<T>::identity();
};

template <class T>
ProjectiveMap<T> canonicalize(const Mat2<T>& m)
{
    return ProjectiveMap<T>::from(m);
}

/// det_norm = (alpha delta - beta gamma) / delta^2 and sigma = alpha^2 / delta^2.
/// For real fields both are signed values of the field; for complex fields
/// they are the moduli of those quotients.
template <class T>
struct SpectralData {
    magnitude_t<T> det_norm{0};
    magnitude_t<T> sigma{0};
    bool defined = false;
};

/// (alpha, beta, gamma) of the form (alpha x + beta)/(gamma x + 1), or nullopt
/// when delta vanishes.
template <class T>
std::optional<std::array<T, 3>> delta_normalized(const Mat2<T>& m)
{
    if constexpr (is_exact_v<T>) {
        if (m.m22 == 0)
            return std::nullopt;
    } else {
        if (!(std::abs(m.m22) > tau_den * frobenius(m)))
            return std::nullopt;
    }
    return std::array<T, 3>{m.m11 / m.m22, m.m12 / m.m22, m.m21 / m.m22};
}

template <class T>
SpectralData<T> spectral_data(const ProjectiveMap<T>& f)
{
    auto n = delta_normalized(f.rep());
    if (!n)
        return {};
    auto [alpha, beta, gamma] = *n;
    T det = alpha - beta * gamma;
    T sigma = alpha * alpha;
    if constexpr (is_complex_v<T>)
        return {std::abs(det), std::abs(sigma), true};
    else
        return {det, sigma, true};
}

template <class T>
ProjectiveMap<T> compose(const ProjectiveMap<T>& f, const ProjectiveMap<T>& g)
{
    return ProjectiveMap<T>::from(f.rep() * g.rep(), tau_round);
}

/// A point of the projective line: a scalar or infinity.
template <class T>
struct ProjectivePoint {
    T value{0};
    bool infinite = false;

    static ProjectivePoint infinity() { return {T(0), true}; }
    static ProjectivePoint finite(const T& v) { return {v, false}; }
};

namespace detail {

template <class T>
bool vanishes(const T& den, const T& part1, const T& part2)
{
    if constexpr (is_exact_v<T>) {
        (void)part1;
        (void)part2;
        return den == 0;
    } else {
        Real scale = std::abs(part1) + std::abs(part2);
        return std::abs(den) <= 4 * std::numeric_limits<Real>::epsilon() * scale;
    }
}

} // namespace detail

/// Moebius action with the projective conventions: the pole goes to infinity
/// and infinity goes to m11/m21 (or stays at infinity when m21 = 0).
template <class T>
ProjectivePoint<T> apply(const ProjectiveMap<T>& f, const ProjectivePoint<T>& x)
{
    const Mat2<T>& m = f.rep();
    if (x.infinite) {
        if (m.m21 == T(0))
            return ProjectivePoint<T>::infinity();
        return ProjectivePoint<T>::finite(m.m11 / m.m21);
    }
    T a = m.m21 * x.value;
    T den = a + m.m22;
    if (detail::vanishes(den, a, m.m22))
        return ProjectivePoint<T>::infinity();
    return ProjectivePoint<T>::finite((m.m11 * x.value + m.m12) / den);
}

template <class T>
ProjectivePoint<T> apply(const ProjectiveMap<T>& f, const T& x)
{
    return apply(f, ProjectivePoint<T>::finite(x));
}

/// Distance between coefficient vectors modulo scalars. Both are scaled to
/// unit Frobenius norm; the real case takes min(|u - v|, |u + v|), the complex
/// case aligns v to u by the phase of <v, u>. Works for singular matrices too.
template <class T>
Real coefficient_distance(const Mat2<T>& x, const Mat2<T>& y)
{
    if constexpr (is_exact_v<T>) {
        return coefficient_distance(x.template cast<Real>(), y.template cast<Real>());
    } else {
        Real nx = frobenius(x);
        Real ny = frobenius(y);
        if (nx == 0 || ny == 0)
            return nx == ny ? 0 : std::sqrt(Real(2));
        auto ex = x.entries();
        auto ey = y.entries();
        if constexpr (is_complex_v<T>) {
            Complex ip = 0;
            for (int i = 0; i < 4; ++i)
                ip += std::conj(ey[i]) * ex[i];
            Complex phase = std::abs(ip) > 0 ? ip / std::abs(ip) : Complex(1);
            Real s = 0;
            for (int i = 0; i < 4; ++i)
                s += std::norm(ex[i] / nx - phase * ey[i] / ny);
            return std::sqrt(s);
        } else {
            Real sm = 0, sp = 0;
            for (int i = 0; i < 4; ++i) {
                Real u = to_real(ex[i]) / nx;
                Real v = to_real(ey[i]) / ny;
                sm += (u - v) * (u - v);
                sp += (u + v) * (u + v);
            }
            return std::sqrt(std::min(sm, sp));
        }
    }
}

template <class T>
Real proj_distance(const ProjectiveMap<T>& f, const ProjectiveMap<T>& g)
{
    return coefficient_distance(f.rep(), g.rep());
}

} // namespace moebius
