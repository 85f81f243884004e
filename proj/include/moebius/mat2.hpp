#pragma once

#include "moebius/error.hpp"
#include "moebius/scalar.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

namespace moebius {

/// A 2x2 matrix over T, stored row-major as
///   [ m11 m12 ]
///   [ m21 m22 ]
/// The LFT x -> (m11 x + m12) / (m21 x + m22) is its projective class.
template <class T>
struct Mat2 {
    T m11{1}, m12{0}, m21{0}, m22{1};

    static Mat2 identity() { return {T(1), T(0), T(0), T(1)}; }
    static Mat2 diagonal(const T& d1, const T& d2) { return {d1, T(0), T(0), d2}; }

    std::array<T, 4> entries() const { return {m11, m12, m21, m22}; }

    T det() const { return m11 * m22 - m12 * m21; }

    friend Mat2 operator*(const Mat2& x, const Mat2& y)
    {
        return {x.m11 * y.m11 + x.m12 * y.m21, x.m11 * y.m12 + x.m12 * y.m22,
                x.m21 * y.m11 + x.m22 * y.m21, x.m21 * y.m12 + x.m22 * y.m22};
    }

    friend Mat2 operator+(const Mat2& x, const Mat2& y)
    {
        return {x.m11 + y.m11, x.m12 + y.m12, x.m21 + y.m21, x.m22 + y.m22};
    }

    friend Mat2 operator-(const Mat2& x, const Mat2& y)
    {
        return {x.m11 - y.m11, x.m12 - y.m12, x.m21 - y.m21, x.m22 - y.m22};
    }

    friend Mat2 operator*(const T& s, const Mat2& x) { return {s * x.m11, s * x.m12, s * x.m21, s * x.m22}; }

    friend bool operator==(const Mat2& x, const Mat2& y)
    {
        return x.m11 == y.m11 && x.m12 == y.m12 && x.m21 == y.m21 && x.m22 == y.m22;
    }

    /// Adjugate; equals det * inverse.
    Mat2 adjugate() const { return {m22, -m12, -m21, m11}; }

    Mat2 inverse() const
    {
        T d = det();
        if (d == T(0))
            throw Error(Errc::SingularMatrix, "inverse of a singular matrix");
        T inv = T(1) / d;
        return inv * adjugate();
    }

    bool all_finite() const
    {
        return is_finite(m11) && is_finite(m12) && is_finite(m21) && is_finite(m22);
    }

    template <class U>
    Mat2<U> cast() const
    {
        auto conv = [](const T& v) -> U {
            if constexpr (is_complex_v<U>)
                return to_complex(v);
            else if constexpr (is_exact_v<U>)
                return rational_from(to_real(v));
            else
                return static_cast<U>(to_real(v));
        };
        return {conv(m11), conv(m12), conv(m21), conv(m22)};
    }

    friend std::ostream& operator<<(std::ostream& os, const Mat2& m)
    {
        return os << "[[" << m.m11 << ", " << m.m12 << "], [" << m.m21 << ", " << m.m22 << "]]";
    }
};

/// Frobenius norm, in the working real type.
template <class T>
Real frobenius(const Mat2<T>& m)
{
    Real s = 0;
    for (const T& e : m.entries()) {
        if constexpr (is_complex_v<T>)
            s += std::norm(e);
        else {
            Real r = to_real(e);
            s += r * r;
        }
    }
    return std::sqrt(s);
}

/// True when det is lost to cancellation: |det| <= tol * (|m11 m22| + |m12 m21|).
/// Scale-free, so legitimately anisotropic products such as diag(2^-5000, 1)
/// stay invertible.
template <class T>
bool numerically_singular(const Mat2<T>& m, Real tol = tau_det)
{
    if constexpr (is_exact_v<T>) {
        return m.det() == 0;
    } else {
        Real d = std::abs(m.det());
        Real ref = std::abs(m.m11 * m.m22) + std::abs(m.m12 * m.m21);
        return !(d > tol * ref) || !std::isfinite(d);
    }
}

/// Result of mat_distance.
struct MatDistance {
    Real abs = 0;
    Real rel = 0;
};

/// Absolute and relative Frobenius distance between two matrices.
template <class T>
MatDistance mat_distance(const Mat2<T>& x, const Mat2<T>& y)
{
    if constexpr (is_exact_v<T>) {
        Real a = frobenius((x - y).template cast<Real>());
        Real den = std::max({frobenius(x.template cast<Real>()), frobenius(y.template cast<Real>()), tau_den});
        return {a, a / den};
    } else {
        Real a = frobenius(x - y);
        Real den = std::max({frobenius(x), frobenius(y), tau_den});
        return {a, a / den};
    }
}

} // namespace moebius
