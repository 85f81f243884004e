#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <string_view>
#include <type_traits>

namespace moebius {

/// Working real type. 64-bit mantissa on x86 and a 15-bit exponent.
using Real = long double;
using Complex = std::complex<Real>;
/// Exact entry type used for identity checks.
using Rational = boost::multiprecision::cpp_rational;

enum class Field { real, complex };

constexpr std::string_view field_name(Field f) noexcept
{
    return f == Field::real ? "real" : "complex";
}

/// Relative singularity threshold.
inline constexpr Real tau_det = 1e-12L;
/// Cancellation floor for products of invertible factors (word products,
/// compositions). Long contracting words such as R^30 have a relative det
/// near 1e-13 and are still exactly invertible.
inline constexpr Real tau_round = 64 * std::numeric_limits<Real>::epsilon();
/// Denominator floor for relative quantities and the delta-normalized form.
inline constexpr Real tau_den = 1e-300L;

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<Real> {
    using magnitude = Real;
    static constexpr bool is_complex = false;
    static constexpr bool is_exact = false;
    static constexpr Field field = Field::real;
};

template <>
struct scalar_traits<double> {
    using magnitude = double;
    static constexpr bool is_complex = false;
    static constexpr bool is_exact = false;
    static constexpr Field field = Field::real;
};

template <>
struct scalar_traits<Complex> {
    using magnitude = Real;
    static constexpr bool is_complex = true;
    static constexpr bool is_exact = false;
    static constexpr Field field = Field::complex;
};

template <>
struct scalar_traits<Rational> {
    using magnitude = Rational;
    static constexpr bool is_complex = false;
    static constexpr bool is_exact = true;
    static constexpr Field field = Field::real;
};

template <class T>
using magnitude_t = typename scalar_traits<T>::magnitude;

template <class T>
inline constexpr bool is_complex_v = scalar_traits<T>::is_complex;

template <class T>
inline constexpr bool is_exact_v = scalar_traits<T>::is_exact;

template <class T>
magnitude_t<T> modulus(const T& x)
{
    if constexpr (is_exact_v<T>)
        return x < 0 ? T(-x) : x;
    else
        return std::abs(x);
}

/// x / |x| for nonzero x: the sign (real) or the phase (complex).
template <class T>
T unit_of(const T& x)
{
    if constexpr (is_complex_v<T>)
        return x / std::abs(x);
    else
        return x < 0 ? T(-1) : T(1);
}

template <class T>
T conj_of(const T& x)
{
    if constexpr (is_complex_v<T>)
        return std::conj(x);
    else
        return x;
}

template <class T>
Real to_real(const T& x)
{
    if constexpr (is_exact_v<T>)
        return static_cast<Real>(x);
    else if constexpr (is_complex_v<T>)
        return x.real();
    else
        return static_cast<Real>(x);
}

template <class T>
Complex to_complex(const T& x)
{
    if constexpr (is_complex_v<T>)
        return x;
    else
        return Complex(to_real(x), 0);
}

template <class T>
bool is_finite(const T& x)
{
    if constexpr (is_exact_v<T>)
        return true;
    else if constexpr (is_complex_v<T>)
        return std::isfinite(x.real()) && std::isfinite(x.imag());
    else
        return std::isfinite(x);
}

/// Exact conversion of a binary floating value to a rational.
inline Rational rational_from(Real x)
{
    if (x == 0)
        return Rational(0);
    int exp = 0;
    Real mant = std::frexp(x, &exp);
    // 64 mantissa bits fit in a signed 65-bit integer after scaling.
    const int bits = 64;
    Real scaled = std::ldexp(mant, bits);
    boost::multiprecision::cpp_int num(static_cast<long long>(std::trunc(scaled / 2)));
    num *= 2;
    num += static_cast<long long>(scaled - 2 * std::trunc(scaled / 2));
    Rational r(num);
    int shift = exp - bits;
    boost::multiprecision::cpp_int p2 = 1;
    p2 <<= (shift < 0 ? -shift : shift);
    if (shift < 0)
        r /= Rational(p2);
    else
        r *= Rational(p2);
    return r;
}

} // namespace moebius
