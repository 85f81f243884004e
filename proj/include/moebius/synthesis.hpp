#pragma once

#include "moebius/ladder.hpp"
#include "moebius/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace moebius {

/// Result of approximating a target by a generator word.
template <class T>
struct ApproxReport {
    std::string system;
    /// "lft" (projective) or "matrix".
    std::string kind;
    /// Word over the system's symbols. Derived symbols are expanded unless
    /// that would exceed the syllable cap, in which case `expanded` is false.
    Word word;
    bool expanded = true;
    EvaluatedWord<T> achieved;
    Mat2<T> target;
    /// proj_distance for "lft", relative Frobenius distance for "matrix".
    Real error = 0;
    Real eps = 0;
    Depths depths;
    /// The target lies outside the closure and the word approximates the
    /// nearest admissible map instead; error may then exceed eps.
    bool projected = false;
    std::optional<double> elapsed_seconds;
};

/// Expands derived symbols in place of their definitions when the result has
/// at most `cap` syllables.
template <class T>
std::pair<Word, bool> expand_derived(const Word& w, const GeneratorSystem<T>& sys, std::size_t cap)
{
    SubstitutionTable table = sys.expansion_table();
    if (table.empty())
        return {w, true};
    long double estimate = 0;
    for (const auto& l : w.letters()) {
        auto it = table.find(l.symbol);
        estimate += it == table.end() ? 1.0L
                                      : static_cast<long double>(it->second.syllables()) * static_cast<long double>(l.exponent);
    }
    if (estimate > static_cast<long double>(cap))
        return {w, false};
    for (const auto& g : sys.generators())
        if (!g.derived())
            table.emplace(g.symbol, Word::single(g.symbol));
    return {substitute(w, table), true};
}

namespace detail {

template <class T>
std::optional<Word> exact_matrix_letter(const Mat2<T>& X, const GeneratorSystem<T>& sys)
{
    const Real tol = 16 * std::numeric_limits<Real>::epsilon();
    if (mat_distance(X, Mat2<T>::identity()).rel <= tol)
        return Word{};
    for (const auto& g : sys.generators())
        if (mat_distance(X, g.matrix).rel <= tol)
            return Word::single(g.symbol);
    return std::nullopt;
}

template <class T>
T conj_dot(const Mat2<T>& x, const Mat2<T>& y)
{
    if constexpr (is_complex_v<T>)
        return std::conj(x.m11) * y.m11 + std::conj(x.m12) * y.m12 + std::conj(x.m21) * y.m21 +
               std::conj(x.m22) * y.m22;
    else
        return x.m11 * y.m11 + x.m12 * y.m12 + x.m21 * y.m21 + x.m22 * y.m22;
}

template <class T>
Real matrix_error(const Word& w, const GeneratorSystem<T>& sys, const Mat2<T>& X)
{
    return mat_distance(evaluate(w, sys).matrix(), X).rel;
}

} // namespace detail

/// Projective approximation of `target` over any built-in system.
template <class T>
ApproxReport<T> approximate_lft(const ProjectiveMap<T>& target, const GeneratorSystem<T>& sys,
                                const SynthesisOptions& opt)
{
    if (!(opt.eps > 0))
        throw Error(Errc::DomainError, "eps must be positive");
    const LftAlphabet<T> al = alphabet_of(sys);
    Ladder<T> ladder(al, opt);
    ApproxReport<T> rep;
    rep.system = sys.name();
    rep.kind = "lft";
    rep.target = target.rep();
    rep.eps = opt.eps;
    Real tol = opt.eps;
    for (int attempt = 0; attempt <= opt.max_retries; ++attempt, tol /= 2) {
        Stage st = ladder.lft(target, tol);
        Word host = substitute(st.word, al.table, sys);
        auto ev = evaluate(host, sys);
        Real err = proj_distance(ev.projective, target);
        bool projected = st.depths.count("projected") > 0;
        if (err <= opt.eps || ladder.fixed() || projected) {
            st.depths.erase("projected");
            std::tie(rep.word, rep.expanded) = expand_derived(host, sys, opt.max_expanded_syllables);
            rep.achieved = ev;
            rep.error = err;
            rep.depths = std::move(st.depths);
            rep.projected = projected;
            return rep;
        }
    }
    throw Error(Errc::BudgetExceeded, "projective synthesis did not reach eps");
}

/// The letters that build scalar matrices: A = [[u,a],[1,0]], B and C words
/// with matrices diag(1, b) and diag(c, 1).
template <class T>
struct ScalarAlphabet {
    Word A, B, C;
    T a{1}, b{2}, c{0.5}, u{1};
};

template <class T>
ScalarAlphabet<T> scalar_alphabet_of(const GeneratorSystem<T>& sys)
{
    ScalarAlphabet<T> s;
    const std::string& n = sys.name();
    s.A = Word::single("A");
    s.a = sys.param("a");
    if (n == "MAT3+" || n == "CPLX3" || n == "EXC2") {
        s.B = Word::single("B");
        s.C = Word::single("C");
        s.b = sys.param("b");
        s.c = sys.param("c");
        if (n != "MAT3+")
            s.u = sys.param("u");
    } else if (n == "MAT3PM" || n == "EXR") {
        s.B = Word::single("B", 2);
        s.C = Word::single("C", 2);
        s.b = sys.param("b") * sys.param("b");
        s.c = sys.param("c") * sys.param("c");
    } else {
        throw Error(Errc::DomainError, "no scalar matrices over system " + n);
    }
    return s;
}

/// (C^l A B^k)^2 = [[p^2 u^2 + q, p u q], [p u, q]] with p = c^l, q = p a b^k.
template <class T>
Word scalar_factor(const ScalarAlphabet<T>& s, std::int64_t l, std::int64_t k)
{
    Word f = s.C.pow(l) * s.A * s.B.pow(k);
    return f * f;
}

namespace detail {

/// Relative distance of w from z I with z = exp(log_mod) unit, measured as
/// w / z against I so that neither needs to be representable.
template <class T>
Real scalar_error(const Word& w, const GeneratorSystem<T>& sys, Real log_mod, const T& unit)
{
    auto ev = evaluate(w, sys);
    T factor = ev.phase / unit * T(std::exp(ev.log_scale - log_mod));
    return mat_distance(factor * ev.projective.rep(), Mat2<T>::identity()).rel;
}

/// Relative distance of [[p^2+q, pq],[p, q]] from d I, computed from logs.
inline Real real_scalar_error(Real log_p, Real log_q, Real log_d)
{
    Real p = std::exp(log_p);
    Real pd = std::exp(log_p - log_d);
    Real qd = std::exp(log_q - log_d);
    Real e11 = p * pd + qd - 1;
    Real e12 = p * qd;
    Real e22 = qd - 1;
    return std::sqrt(e11 * e11 + e12 * e12 + pd * pd + e22 * e22) / std::numbers::sqrt2_v<Real>;
}

} // namespace detail

/// d I (d = exp(log_d) > 0) to relative error eps, or the zero matrix to
/// absolute error eps when log_d = -inf.
inline Stage word_scalar_matrix_real(Real log_d, Real eps, const GeneratorSystem<Real>& sys,
                                     const SynthesisOptions& opt)
{
    const auto s = scalar_alphabet_of(sys);
    if (!(s.a > 0) || !(s.b > 1) || !(s.c > 0 && s.c < 1))
        throw Error(Errc::DomainError, "real scalar words need a > 0 and b > 1 > c > 0");
    const Real ln_a = std::log(s.a), ln_b = std::log(s.b), ln_c = std::log(s.c);
    Stage st;
    if (log_d == -std::numeric_limits<Real>::infinity()) {
        // [[p^2+q, pq],[p, q]] with k = 1 shrinks with p.
        Real scale = 1 + s.a * s.b;
        auto l = static_cast<std::int64_t>(std::ceil(std::log(eps / (4 * scale)) / ln_c));
        for (l = std::max<std::int64_t>(l, 1);; ++l) {
            st.word = scalar_factor(s, l, 1);
            st.error = frobenius(evaluate(st.word, sys).matrix());
            if (st.error <= eps || opt.fixed_depth > 0) {
                st.depths = {{"l", l}, {"k", 1}};
                return st;
            }
            if (l > opt.ratio_bounds.l_max)
                throw Error(Errc::BudgetExceeded, "zero scalar needs too many C letters");
        }
    }
    if (!std::isfinite(log_d))
        throw Error(Errc::DomainError, "scalar must be finite");
    // Off-diagonal p and p/d must both be small: p <= eps min(1, d) / 4.
    Real log_pmax = std::log(eps / 4) + std::min<Real>(0, log_d);
    RatioBounds bounds = opt.ratio_bounds;
    bounds.l_min = std::max<std::int64_t>(bounds.l_min, static_cast<std::int64_t>(std::ceil(log_pmax / ln_c)));
    Real tol = eps / 4;
    for (int attempt = 0; attempt <= opt.max_retries; ++attempt, tol /= 2) {
        auto accept = [&](const RatioSolution& r) {
            if (r.k < 1)
                return false;
            Real log_p = static_cast<Real>(r.l) * ln_c;
            Real log_q = log_p + ln_a + static_cast<Real>(r.k) * ln_b;
            return detail::real_scalar_error(log_p, log_q, log_d) <= tol;
        };
        auto sol = solve_ratio_log(log_d - ln_a, s.b, 1 / s.c, tol, bounds, accept);
        st.word = scalar_factor(s, sol.l, sol.k);
        st.error = detail::scalar_error(st.word, sys, log_d, Real(1));
        st.depths = {{"l", sol.l}, {"k", sol.k}};
        if (st.error <= eps)
            return st;
    }
    throw Error(Errc::BudgetExceeded, "scalar word did not reach eps");
}

/// z I for complex z != 0 as a product of j squares (C^(n_i) A B^(k_i))^2.
/// The phases and moduli of z, a^j, c^N and b^K = r^K i^K must match, which
/// is a simultaneous approximation in (arg c / 2pi, ln|c| / ln r^4) for each
/// multiplicity j and residue K mod 4.
/// z is given as exp(ln_z + i arg_z).
inline Stage word_scalar_matrix_complex(Real ln_z, Real arg_z, Real eps, const GeneratorSystem<Complex>& sys,
                                        const SynthesisOptions& opt)
{
    if (!std::isfinite(ln_z) || !std::isfinite(arg_z))
        throw Error(Errc::DomainError, "complex scalar must be nonzero and finite");
    const Complex unit = std::polar(Real(1), arg_z);
    const auto s = scalar_alphabet_of(sys);
    const Real two_pi = 2 * std::numbers::pi_v<Real>;
    const Real r = std::abs(s.b);
    const Real ln_r = std::log(r);
    const Real ln_c = std::log(std::abs(s.c));
    if (!(r > 1) || !(std::abs(s.b.real()) <= 1e-15L * r) || !(ln_c < 0))
        throw Error(Errc::DomainError, "complex scalar words need b = r i with r > 1 and 0 < |c| < 1");
    const Real theta1 = std::arg(s.c) / two_pi;
    const Real theta2 = ln_c / (4 * ln_r);
    const Real arg_a = std::arg(s.a), ln_a = std::log(std::abs(s.a));
    for (int j = 1; j <= opt.max_scalar_factors; ++j) {
        for (int rho = 0; rho < 4; ++rho) {
            // Per-factor off-diagonal size |u| |c|^n_i relative to |q_i| ~ |z|^(1/j).
            Real qi = std::exp(ln_z / j);
            Real kron = eps / (3 * two_pi);
            Real p_budget = eps / (8 * j * (1 + std::abs(s.u)) * (1 + 1 / std::min<Real>(qi, 1)));
            auto n0 = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(std::log(p_budget) / ln_c)));
            for (int attempt = 0; attempt < 4; ++attempt, n0 *= 2, kron /= 2) {
                SimultaneousBounds bounds = opt.simul_bounds;
                bounds.n_min = std::max<std::int64_t>(bounds.n_min, j * n0);
                bounds.m_min = std::max<std::int64_t>(0, (j - rho + 3) / 4);
                Real phi1 = (arg_z - j * arg_a - rho * std::numbers::pi_v<Real> / 2) / two_pi;
                Real phi2 = (ln_z - j * ln_a - rho * ln_r) / (4 * ln_r);
                SimultaneousSolution sol;
                try {
                    sol = solve_simultaneous(theta1, theta2, phi1, phi2, kron, bounds);
                } catch (const Error& e) {
                    if (e.code() != Errc::NotFound)
                        throw;
                    break;
                }
                std::int64_t N = sol.n, K = 4 * sol.m + rho;
                Word w;
                for (int i = 0; i < j; ++i) {
                    std::int64_t ni = N / j + (i < N % j ? 1 : 0);
                    std::int64_t ki = K / j + (i < K % j ? 1 : 0);
                    w = w * scalar_factor(s, ni, ki);
                }
                Real err = detail::scalar_error(w, sys, ln_z, unit);
                if (err <= eps) {
                    Stage st;
                    st.word = std::move(w);
                    st.error = err;
                    st.depths = {{"factors", j}, {"n", N}, {"k", K}};
                    return st;
                }
            }
        }
    }
    if (sys.name() == "EXC2" || sys.name() == "CPLX3") {
        auto cert = detail::complex_certificate(s.b, s.c, default_certificate_height);
        if (cert.relation_found)
            throw Error(Errc::IndependenceSuspect, "scalar unreachable: phases of c satisfy an integer relation");
    }
    throw Error(Errc::NotFound, "no scalar word within the search bounds");
}

inline Stage word_scalar_matrix_complex(Complex z, Real eps, const GeneratorSystem<Complex>& sys,
                                        const SynthesisOptions& opt)
{
    if (z == Complex(0))
        throw Error(Errc::DomainError, "complex scalar must be nonzero");
    return word_scalar_matrix_complex(std::log(std::abs(z)), std::arg(z), eps, sys, opt);
}

namespace detail {

/// Matrix target as (projective word) times (scalar word).
template <class T, class ScalarFn>
Stage projective_times_scalar(const Mat2<T>& X, const GeneratorSystem<T>& sys, Real eps,
                              const SynthesisOptions& opt, ScalarFn scalar)
{
    const LftAlphabet<T> al = alphabet_of(sys);
    Ladder<T> ladder(al, opt);
    const auto target = ProjectiveMap<T>::from(X);
    Real tol = eps / 4;
    for (int attempt = 0; attempt <= opt.max_retries; ++attempt, tol /= 2) {
        Stage proj = ladder.lft(target, tol);
        Word W = substitute(proj.word, al.table, sys);
        auto ev = evaluate(W, sys);
        const Mat2<T>& rep = ev.projective.rep();
        T inner = conj_dot(rep, X);
        Real norm2 = frobenius(rep) * frobenius(rep);
        Stage sc = scalar(inner / norm2, ev, tol);
        Stage st;
        st.word = sc.word * W;
        st.error = matrix_error(st.word, sys, X);
        merge_depths(st.depths, "projective.", proj.depths);
        merge_depths(st.depths, "scalar.", sc.depths);
        if (st.error <= eps || opt.fixed_depth > 0)
            return st;
    }
    throw Error(Errc::BudgetExceeded, "matrix synthesis did not reach eps");
}


inline Stage nonneg_matrix(const Mat2<Real>& X, const GeneratorSystem<Real>& sys, Real eps,
                           const SynthesisOptions& opt)
{
    if (auto w = exact_matrix_letter(X, sys))
        return Stage{*w, 0, {}};
    return projective_times_scalar(X, sys, eps, opt, [&](Real s, const EvaluatedWord<Real>& ev, Real tol) {
        Real signed_s = s * ev.phase;
        if (!(signed_s > 0))
            throw Error(Errc::DomainError, "projective word has the wrong sign for a nonnegative target");
        return word_scalar_matrix_real(std::log(signed_s) - ev.log_scale, tol, sys, opt);
    });
}

} // namespace detail

template <class T>
ApproxReport<T> make_matrix_report(const Mat2<T>& X, const GeneratorSystem<T>& sys, const SynthesisOptions& opt,
                                   Stage st)
{
    ApproxReport<T> rep;
    rep.system = sys.name();
    rep.kind = "matrix";
    rep.target = X;
    rep.eps = opt.eps;
    rep.depths = std::move(st.depths);
    // Derived symbols are evaluated through their verified closed forms: the
    // expanded word is the same product but loses tiny entries to rounding.
    rep.achieved = evaluate(st.word, sys);
    rep.error = mat_distance(rep.achieved.matrix(), X).rel;
    std::tie(rep.word, rep.expanded) = expand_derived(st.word, sys, opt.max_expanded_syllables);
    return rep;
}

namespace detail {

inline void require_matrix_target(const auto& X)
{
    if (!X.all_finite() || numerically_singular(X))
        throw Error(Errc::SingularMatrix, "matrix target must be invertible");
}

} // namespace detail

/// X with nonnegative entries and det != 0 over MAT3+.
inline ApproxReport<Real> word_matrix_nonneg(const Mat2<Real>& X, const GeneratorSystem<Real>& sys,
                                             const SynthesisOptions& opt)
{
    detail::require_matrix_target(X);
    if (X.m11 < 0 || X.m12 < 0 || X.m21 < 0 || X.m22 < 0)
        throw Error(Errc::DomainError, "nonnegative matrix synthesis needs nonnegative entries");
    return make_matrix_report(X, sys, opt, detail::nonneg_matrix(X, sys, opt.eps, opt));
}

/// A factorization X = N1 G N2 with N1, N2 entrywise nonnegative and G one of
/// the sign-carrying words B, C or C B.
struct SignFactorization {
    Mat2<Real> N1, N2;
    Word G;
    /// Product of the condition numbers ||N||^2 / |det N| of both factors.
    Real conditioning = 0;
};

namespace detail {

inline Real conditioning(const Mat2<Real>& m)
{
    Real f = frobenius(m);
    return f * f / std::abs(m.det());
}

inline bool nonneg_clamped(Mat2<Real>& m)
{
    Real tol = 1e-12L * frobenius(m);
    for (Real* e : {&m.m11, &m.m12, &m.m21, &m.m22}) {
        if (*e < -tol)
            return false;
        *e = std::max<Real>(*e, 0);
    }
    return !numerically_singular(m);
}

} // namespace detail

/// Searches N2 = [[1,t],[s,1]] over s, t in {0} and 2^(j/2), j in [-12, 12],
/// then seeded random N2, for the best-conditioned factorization.
inline SignFactorization factor_signs(const Mat2<Real>& X, const GeneratorSystem<Real>& sys, std::uint64_t seed,
                                      int random_trials = 10000)
{
    std::vector<Word> Gs{Word::single("B"), Word::single("C"), Word{{"C", 1}, {"B", 1}}};
    std::optional<SignFactorization> best;
    auto consider = [&](Real s, Real t) {
        Mat2<Real> N2{1, t, s, 1};
        if (std::abs(N2.det()) < 1e-3L)
            return;
        Mat2<Real> N2inv = N2.inverse();
        for (const auto& G : Gs) {
            Mat2<Real> Gm = multiply_out(G, sys);
            Mat2<Real> N1 = X * N2inv * Gm.inverse();
            if (!detail::nonneg_clamped(N1))
                continue;
            Real cond = detail::conditioning(N1) * detail::conditioning(N2);
            if (!best || cond < best->conditioning)
                best = SignFactorization{N1, N2, G, cond};
        }
    };
    std::vector<Real> grid{0};
    for (int j = -12; j <= 12; ++j)
        grid.push_back(std::exp2(j / Real(2)));
    for (Real s : grid)
        for (Real t : grid)
            consider(s, t);
    if (best)
        return *best;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> expo(-8, 8);
    std::bernoulli_distribution zero(0.1);
    for (int i = 0; i < random_trials && !best; ++i) {
        Real s = zero(rng) ? 0 : std::exp2(static_cast<Real>(expo(rng)));
        Real t = zero(rng) ? 0 : std::exp2(static_cast<Real>(expo(rng)));
        consider(s, t);
    }
    if (!best)
        throw Error(Errc::FactorizationFailed, "no nonnegative factorization X = N1 G N2 found");
    return *best;
}

/// Any invertible real X over MAT3PM or EXR. Nonnegative targets use the
/// squares B^2, C^2; others are factored as N1 G N2 first.
inline ApproxReport<Real> word_matrix_real(const Mat2<Real>& X, const GeneratorSystem<Real>& sys,
                                           const SynthesisOptions& opt)
{
    detail::require_matrix_target(X);
    if (auto w = detail::exact_matrix_letter(X, sys))
        return make_matrix_report(X, sys, opt, Stage{*w, 0, {}});
    if (X.m11 >= 0 && X.m12 >= 0 && X.m21 >= 0 && X.m22 >= 0)
        return make_matrix_report(X, sys, opt, detail::nonneg_matrix(X, sys, opt.eps, opt));
    SignFactorization f = factor_signs(X, sys, opt.seed);
    Real gain = frobenius(f.N1) * frobenius(multiply_out(f.G, sys)) * frobenius(f.N2) / frobenius(X);
    Real tol = opt.eps / (4 * std::max<Real>(1, gain));
    for (int attempt = 0; attempt <= opt.max_retries; ++attempt, tol /= 2) {
        Stage s1 = detail::nonneg_matrix(f.N1, sys, tol, opt);
        Stage s2 = detail::nonneg_matrix(f.N2, sys, tol, opt);
        Stage st;
        st.word = s1.word * f.G * s2.word;
        st.error = detail::matrix_error(st.word, sys, X);
        merge_depths(st.depths, "N1.", s1.depths);
        merge_depths(st.depths, "N2.", s2.depths);
        if (st.error <= opt.eps || opt.fixed_depth > 0) {
            st.depths["sign." + format_word(f.G)] = 1;
            return make_matrix_report(X, sys, opt, std::move(st));
        }
    }
    throw Error(Errc::BudgetExceeded, "signed matrix synthesis did not reach eps");
}

/// Any invertible complex X over CPLX3 or EXC2.
inline ApproxReport<Complex> word_matrix_complex(const Mat2<Complex>& X, const GeneratorSystem<Complex>& sys,
                                                 const SynthesisOptions& opt)
{
    detail::require_matrix_target(X);
    if (auto w = detail::exact_matrix_letter(X, sys))
        return make_matrix_report(X, sys, opt, Stage{*w, 0, {}});
    Stage st = detail::projective_times_scalar(
        X, sys, opt.eps, opt, [&](Complex s, const EvaluatedWord<Complex>& ev, Real tol) {
            return word_scalar_matrix_complex(std::log(std::abs(s)) - ev.log_scale, std::arg(s) - std::arg(ev.phase),
                                              tol, sys, opt);
        });
    return make_matrix_report(X, sys, opt, std::move(st));
}

/// Dispatch on the system: MAT3+ nonnegative, MAT3PM/EXR signed.
inline ApproxReport<Real> approximate_matrix(const Mat2<Real>& X, const GeneratorSystem<Real>& sys,
                                             const SynthesisOptions& opt)
{
    if (sys.name() == "MAT3+")
        return word_matrix_nonneg(X, sys, opt);
    if (sys.name() == "MAT3PM" || sys.name() == "EXR")
        return word_matrix_real(X, sys, opt);
    throw Error(Errc::DomainError, "matrix synthesis needs MAT3+, MAT3PM or EXR");
}

inline ApproxReport<Complex> approximate_matrix(const Mat2<Complex>& X, const GeneratorSystem<Complex>& sys,
                                                const SynthesisOptions& opt)
{
    if (sys.name() == "CPLX3" || sys.name() == "EXC2")
        return word_matrix_complex(X, sys, opt);
    throw Error(Errc::DomainError, "complex matrix synthesis needs CPLX3 or EXC2");
}

} // namespace moebius
