#pragma once

#include "moebius/systems.hpp"

#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace moebius {

struct IdentityCheck {
    std::string name;
    bool passed = false;
    /// Distance or residual behind the verdict (0 for exact checks that pass).
    Real value = 0;
    std::string detail;
};

struct IdentityOptions {
    /// The a of the two-generator real system; 1/2 makes A B A^3 B A diagonal.
    Rational exr_a = Rational(1, 2);
    std::uint64_t seed = 7;
    int samples = 100;
    std::vector<Real> exc2_r{3.5L, 4, 10};
};

/// Random positive rational p/q with p in [1, 60], q in [1, 24].
inline Rational random_rational(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> num(1, 60), den(1, 24);
    return Rational(num(rng), den(rng));
}

namespace detail {

inline ProjectiveMap<Rational> exact_F(const Rational& alpha, const Rational& beta, const Rational& gamma)
{
    return ProjectiveMap<Rational>::lft(alpha, beta, gamma, Rational(1));
}

inline ProjectiveMap<Rational> exact_T(const Rational& s)
{
    return ProjectiveMap<Rational>::lft(Rational(1), Rational(0), s, Rational(1));
}

inline ProjectiveMap<Rational> exact_I(const Rational& a)
{
    return ProjectiveMap<Rational>::lft(Rational(0), a, Rational(1), Rational(0));
}

/// T_u I T_(v/a) I T_w as one matrix product.
inline ProjectiveMap<Rational> exact_composite(const Rational& u, const Rational& v, const Rational& w,
                                               const Rational& a)
{
    Mat2<Rational> m = exact_T(u).rep() * exact_I(a).rep() * exact_T(v / a).rep() * exact_I(a).rep() *
                       exact_T(w).rep();
    return ProjectiveMap<Rational>::from(m);
}

inline std::string describe(const Rational& x)
{
    return x.str();
}

} // namespace detail

/// A B A^3 B A against diag(-2/9, 1) in exact arithmetic.
inline IdentityCheck check_exr_identity(const Rational& a)
{
    auto sys = exr<Rational>(a);
    Mat2<Rational> P = multiply_out(exr_c_definition(), sys);
    Mat2<Rational> C = Mat2<Rational>::diagonal(Rational(-2, 9), Rational(1));
    IdentityCheck c{"ABA^3BA = diag(-2/9, 1)", P == C, mat_distance(P, C).abs, ""};
    if (!c.passed) {
        std::ostringstream os;
        os << "a = " << a.str() << " gives " << P;
        c.detail = os.str();
    }
    return c;
}

/// T_u I T_(v/a) I T_w = ((1+vw)x + v)/((u+w+uvw)x + 1+uv) for random rationals.
inline IdentityCheck check_composite_identity(std::mt19937_64& rng, int samples)
{
    IdentityCheck c{"T_u I T_(v/a) I T_w composite", true, 0, ""};
    for (int i = 0; i < samples && c.passed; ++i) {
        Rational u = random_rational(rng), v = random_rational(rng), w = random_rational(rng),
                 a = random_rational(rng);
        auto lhs = detail::exact_composite(u, v, w, a);
        auto rhs = ProjectiveMap<Rational>::lft(1 + v * w, v, u + w + u * v * w, 1 + u * v);
        if (!(lhs == rhs)) {
            c.passed = false;
            c.detail = "u=" + detail::describe(u) + " v=" + detail::describe(v) + " w=" + detail::describe(w) +
                       " a=" + detail::describe(a);
        }
    }
    return c;
}

/// u = (1 - sqrt d)/beta, v = beta/sqrt d, w = (alpha - sqrt d)/beta reproduce
/// (alpha x + beta)/(gamma x + 1) when d = alpha - beta gamma is a rational square.
inline IdentityCheck check_F_parameters(std::mt19937_64& rng, int samples)
{
    IdentityCheck c{"F(alpha, beta, gamma) from (u, v, w)", true, 0, ""};
    for (int i = 0; i < samples && c.passed; ++i) {
        Rational sd = random_rational(rng), beta = random_rational(rng), gamma = random_rational(rng),
                 a = random_rational(rng);
        Rational alpha = sd * sd + beta * gamma;
        Rational u = (1 - sd) / beta, v = beta / sd, w = (alpha - sd) / beta;
        if (!(detail::exact_composite(u, v, w, a) == detail::exact_F(alpha, beta, gamma))) {
            c.passed = false;
            c.detail = "alpha=" + detail::describe(alpha) + " beta=" + detail::describe(beta) +
                       " gamma=" + detail::describe(gamma);
        }
    }
    return c;
}

/// fg coefficients and det(fg) = (alpha - beta gamma)(u - v w)/(gamma v + 1)^2.
inline IdentityCheck check_product_formula(std::mt19937_64& rng, int samples)
{
    IdentityCheck c{"composition and det of F maps", true, 0, ""};
    for (int i = 0; i < samples && c.passed; ++i) {
        Rational al = random_rational(rng), be = random_rational(rng), ga = random_rational(rng);
        Rational u = random_rational(rng), v = random_rational(rng), w = random_rational(rng);
        auto fg = compose(detail::exact_F(al, be, ga), detail::exact_F(u, v, w));
        auto expected = ProjectiveMap<Rational>::lft(al * u + be * w, al * v + be, ga * u + w, ga * v + 1);
        Rational det = (al - be * ga) * (u - v * w) / ((ga * v + 1) * (ga * v + 1));
        auto sd = spectral_data(fg);
        if (!(fg == expected) || sd.det_norm != det) {
            c.passed = false;
            c.detail = "alpha=" + detail::describe(al) + " u=" + detail::describe(u);
        }
    }
    return c;
}

/// S^k = F(b^-k, 0, 0) and R S^k R = F(b^k + 1/a, 1, 1/a) over LFT2.
inline IdentityCheck check_generator_forms(std::mt19937_64& rng)
{
    IdentityCheck c{"S^k and R S^k R as F maps", true, 0, ""};
    for (int trial = 0; trial < 5 && c.passed; ++trial) {
        Rational a = random_rational(rng), b = random_rational(rng) + 1;
        auto sys = lft2<Rational>(a, b);
        Rational bk = 1;
        for (int k = 0; k <= 6 && c.passed; ++k, bk *= b) {
            auto s = evaluate(Word::single("S", k), sys).projective;
            auto rsr = evaluate(Word{{"R", 1}, {"S", k}, {"R", 1}}, sys).projective;
            if (k > 0 && !(s == detail::exact_F(1 / bk, 0, 0)))
                c.passed = false;
            if (!(rsr == detail::exact_F(bk + 1 / a, 1, 1 / a)))
                c.passed = false;
            if (!c.passed)
                c.detail = "a=" + detail::describe(a) + " b=" + detail::describe(b) + " k=" + std::to_string(k);
        }
    }
    return c;
}

/// exc2_params(r): identity at exc2_identity_tol, |c|^2 against its closed form
/// at 1e-12 and |c| < 1.
inline std::vector<IdentityCheck> check_exc2(Real r)
{
    std::vector<IdentityCheck> out;
    std::string tag = "r=" + std::to_string(static_cast<double>(r));
    try {
        Exc2Params p = exc2_params(r);
        out.push_back({"EXC2 ABA^3BA = C, " + tag, p.identity_error <= exc2_identity_tol, p.identity_error, ""});
        Real gap = std::abs(p.c_abs2 - p.c_abs2_closed);
        out.push_back({"EXC2 |c|^2 closed form, " + tag, gap <= 1e-12L, gap, ""});
        out.push_back({"EXC2 |c| < 1, " + tag, p.c_abs2 < 1, p.c_abs2, ""});
    } catch (const Error& e) {
        out.push_back({"EXC2 parameters, " + tag, false, 0, e.what()});
    }
    return out;
}

inline std::vector<IdentityCheck> verify_identities(const IdentityOptions& opt = {})
{
    std::mt19937_64 rng(opt.seed);
    std::vector<IdentityCheck> out;
    out.push_back(check_exr_identity(opt.exr_a));
    out.push_back(check_composite_identity(rng, opt.samples));
    out.push_back(check_F_parameters(rng, opt.samples));
    out.push_back(check_product_formula(rng, opt.samples));
    out.push_back(check_generator_forms(rng));
    for (Real r : opt.exc2_r)
        for (auto& c : check_exc2(r))
            out.push_back(std::move(c));
    return out;
}

} // namespace moebius
