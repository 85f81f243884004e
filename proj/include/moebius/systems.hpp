#pragma once

#include "moebius/generators.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <optional>

namespace moebius {

/// Height used for the independence checks run at construction.
inline constexpr std::int64_t default_certificate_height = 100;

namespace detail {

inline void require(bool ok, const std::string& what)
{
    if (!ok)
        throw Error(Errc::DomainError, what);
}

/// ln c / ln b must not satisfy a small integer relation.
inline void require_irrational_log_ratio(Real b, Real c, std::int64_t height, const std::string& sys)
{
    if (height == 0)
        return;
    auto cert = independence_certificate(std::log(c) / std::log(b), height);
    if (cert.relation_found)
        throw Error(Errc::IndependenceSuspect,
                    sys + ": ln c / ln b = " + std::to_string(-cert.A) + "/" + std::to_string(cert.B));
}

/// The pair (ln|c|/ln|b|, arg(c)/2pi) checked by complex systems.
inline IndependenceCertificate complex_certificate(Complex b, Complex c, std::int64_t height)
{
    return independence_certificate(std::log(std::abs(c)) / std::log(std::abs(b)),
                                    std::arg(c) / (2 * std::numbers::pi_v<Real>), height);
}

/// height 0 skips the check.
inline void require_complex_independence(Complex b, Complex c, std::int64_t height, const std::string& sys)
{
    if (height == 0)
        return;
    auto cert = complex_certificate(b, c, height);
    if (cert.relation_found)
        throw Error(Errc::IndependenceSuspect, sys + ": " + std::to_string(cert.A) + " + " + std::to_string(cert.B) +
                                                   " ln|c|/ln|b| + " + std::to_string(cert.C) + " arg(c)/2pi ~ 0");
}

} // namespace detail

/// R(x) = 1 + a/x and S(x) = x/b, with a > 0 and b > 1.
template <class T>
GeneratorSystem<T> lft2(const T& a, const T& b)
{
    detail::require(to_real(a) > 0 && to_real(b) > 1, "LFT2 needs a > 0 and b > 1");
    GeneratorSystem<T> sys("LFT2", {{"a", a}, {"b", b}});
    sys.add("R", {T(1), a, T(1), T(0)});
    sys.add("S", {T(1), T(0), T(0), b});
    return sys;
}

/// LFT2 plus C(x) = x/c; needs c > 0, c != 1 and ln c / ln b irrational.
template <class T>
GeneratorSystem<T> lft3(const T& a, const T& b, const T& c, std::int64_t height = default_certificate_height)
{
    detail::require(to_real(a) > 0 && to_real(b) > 1, "LFT3 needs a > 0 and b > 1");
    detail::require(to_real(c) > 0 && to_real(c) != 1, "LFT3 needs c > 0 and c != 1");
    detail::require_irrational_log_ratio(to_real(b), to_real(c), height, "LFT3");
    GeneratorSystem<T> sys("LFT3", {{"a", a}, {"b", b}, {"c", c}});
    sys.add("R", {T(1), a, T(1), T(0)});
    sys.add("S", {T(1), T(0), T(0), b});
    sys.add("C", {T(1), T(0), T(0), c});
    return sys;
}

/// A = [[1,a],[1,0]], B = diag(1,b), C = diag(c,1) with a > 0, b > 1 > c > 0.
template <class T>
GeneratorSystem<T> mat3_nonneg(const T& a, const T& b, const T& c,
                               std::int64_t height = default_certificate_height)
{
    detail::require(to_real(a) > 0, "MAT3+ needs a > 0");
    detail::require(to_real(b) > 1 && to_real(c) > 0 && to_real(c) < 1, "MAT3+ needs b > 1 > c > 0");
    detail::require_irrational_log_ratio(to_real(b), to_real(c), height, "MAT3+");
    GeneratorSystem<T> sys("MAT3+", {{"a", a}, {"b", b}, {"c", c}});
    sys.add("A", {T(1), a, T(1), T(0)});
    sys.add("B", {T(1), T(0), T(0), b});
    sys.add("C", {c, T(0), T(0), T(1)});
    return sys;
}

/// The signed triple: A = [[1,a],[1,0]], B = diag(1,-b), C = diag(-c,1).
template <class T>
GeneratorSystem<T> mat3_signed(const T& a, const T& b, const T& c,
                               std::int64_t height = default_certificate_height)
{
    detail::require(to_real(a) > 0, "MAT3PM needs a > 0");
    detail::require(to_real(b) > 1 && to_real(c) > 0 && to_real(c) < 1, "MAT3PM needs b > 1 > c > 0");
    detail::require_irrational_log_ratio(to_real(b), to_real(c), height, "MAT3PM");
    GeneratorSystem<T> sys("MAT3PM", {{"a", a}, {"b", b}, {"c", c}});
    sys.add("A", {T(1), a, T(1), T(0)});
    sys.add("B", {T(1), T(0), T(0), -b});
    sys.add("C", {-c, T(0), T(0), T(1)});
    return sys;
}

inline Word exr_c_definition()
{
    return parse_word("A B A^3 B A");
}

/// Two real generators A = [[1,a],[1,0]], B = diag(1,-8/3). With a = 1/2 the
/// word A B A^3 B A is diag(-2/9, 1), registered as the derived symbol C.
/// Other values of a are accepted so that the identity can be seen to fail.
template <class T>
GeneratorSystem<T> exr(const T& a)
{
    const T b = T(8) / T(3);
    const T c = T(2) / T(9);
    GeneratorSystem<T> sys("EXR", {{"a", a}, {"b", b}, {"c", c}});
    sys.add("A", {T(1), a, T(1), T(0)});
    sys.add("B", {T(1), T(0), T(0), -b});
    if (a == T(1) / T(2))
        sys.add_derived("C", exr_c_definition(), Mat2<T>::diagonal(-c, T(1)));
    else
        sys.add_derived("C", exr_c_definition());
    return sys;
}

template <class T>
GeneratorSystem<T> exr()
{
    return exr<T>(T(1) / T(2));
}

/// C = diag(c,1), B = diag(1,b), A = [[u,a],[1,0]] over the complex numbers,
/// with a, u != 0, b = r i, r > 1 > |c| > 0 and 1, ln|c|/ln|b|, arg(c)/2pi
/// free of small integer relations (height 0 skips that check).
inline GeneratorSystem<Complex> cplx3(Complex a, Complex b, Complex c, Complex u,
                                      std::int64_t height = default_certificate_height)
{
    detail::require(a != Complex(0) && u != Complex(0), "CPLX3 needs a, u != 0");
    detail::require(b.real() == 0 && b.imag() > 1, "CPLX3 needs b = r i with r > 1");
    detail::require(std::abs(c) < 1 && std::abs(c) > 0, "CPLX3 needs 0 < |c| < 1");
    detail::require_complex_independence(b, c, height, "CPLX3");
    GeneratorSystem<Complex> sys("CPLX3", {{"a", a}, {"b", b}, {"c", c}, {"u", u}});
    sys.add("A", {u, a, Complex(1), Complex(0)});
    sys.add("B", {Complex(1), Complex(0), Complex(0), b});
    sys.add("C", {c, Complex(0), Complex(0), Complex(1)});
    return sys;
}

/// Parameters of the two-generator complex family, indexed by r > 3.
struct Exc2Params {
    Real r = 0;
    Complex a, b, c, u;
    /// |c|^2 computed from c and from its closed form in r.
    Real c_abs2 = 0;
    Real c_abs2_closed = 0;
    /// Frobenius norm of A B A^3 B A - diag(c, 1).
    Real identity_error = 0;
    /// Branch used: fifth-root index in [0,5) and sign of the square root.
    int root_branch = 0;
    int sqrt_sign = 1;
};

namespace detail {

inline Real exc2_identity_error(Complex a, Complex b, Complex c, Complex u)
{
    Mat2<Complex> A{u, a, Complex(1), Complex(0)};
    Mat2<Complex> B{Complex(1), Complex(0), Complex(0), b};
    Mat2<Complex> P = A * B * A * A * A * B * A;
    return frobenius(P - Mat2<Complex>::diagonal(c, Complex(1)));
}

} // namespace detail

inline constexpr Real exc2_identity_tol = 1e-10L;

/// Evaluates the parameter formulas with principal roots first; if the
/// defining identity A B A^3 B A = C fails at 1e-10 the other fifth-root and
/// square-root branches are tried in order.
inline Exc2Params exc2_params(Real r)
{
    if (!(r > 3) || !std::isfinite(r))
        throw Error(Errc::DomainError, "EXC2 needs r > 3");
    const Complex b(0, r);
    const Real pi = std::numbers::pi_v<Real>;
    std::optional<Exc2Params> best;
    for (int sqrt_sign : {1, -1}) {
        for (int branch = 0; branch < 5; ++branch) {
            if (best && best->identity_error < exc2_identity_tol)
                break;
            Complex s = Real(sqrt_sign) * std::sqrt(Complex(4) + b * b);
            Complex root = std::pow(Complex(1) / (Real(2) * b), Real(1) / 5) *
                           std::pow(Complex(8) + Real(2) * b + b * b + Real(4) * s + b * s, Real(1) / 5);
            root *= std::polar(Real(1), 2 * pi * branch / 5);
            Exc2Params p;
            p.r = r;
            p.b = b;
            p.u = -root;
            p.a = p.u * p.u * (Complex(-2) - b + s) / (Real(2) * b);
            p.c = (Complex(2) + b * b + s - b - b * s) / Real(2);
            p.identity_error = detail::exc2_identity_error(p.a, p.b, p.c, p.u);
            p.root_branch = branch;
            p.sqrt_sign = sqrt_sign;
            if (!best || p.identity_error < best->identity_error)
                best = p;
        }
    }
    if (!(best->identity_error < exc2_identity_tol))
        throw Error(Errc::BranchInconsistency,
                    "no root branch satisfies A B A^3 B A = C (best error " + std::to_string(static_cast<double>(best->identity_error)) + ")");
    Exc2Params p = *best;
    p.c_abs2 = std::norm(p.c);
    Real q = std::sqrt(r * r - 4);
    p.c_abs2_closed = (r * r * r * r - 3 * r * r + r * q - r * r * r * q) / 2;
    return p;
}

/// The two generators A = [[u,a],[1,0]] and B = diag(1, r i), with C kept as
/// the derived symbol A B A^3 B A. Some r fail the independence check: at
/// r = 4, arg(c)/2pi = -7/24 exactly. Pass height 0 to build those anyway.
inline GeneratorSystem<Complex> exc2(Real r, std::int64_t height = default_certificate_height)
{
    Exc2Params p = exc2_params(r);
    detail::require_complex_independence(p.b, p.c, height, "EXC2");
    GeneratorSystem<Complex> sys("EXC2", {{"a", p.a}, {"b", p.b}, {"c", p.c}, {"u", p.u}, {"r", Complex(r)}});
    sys.add("A", {p.u, p.a, Complex(1), Complex(0)});
    sys.add("B", {Complex(1), Complex(0), Complex(0), p.b});
    sys.add_derived("C", exr_c_definition(), Mat2<Complex>::diagonal(p.c, Complex(1)), exc2_identity_tol);
    return sys;
}

} // namespace moebius
