#pragma once

#include "moebius/closure.hpp"
#include "moebius/diophantine.hpp"
#include "moebius/expansion.hpp"
#include "moebius/generators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>

namespace moebius {

/// Knobs shared by every synthesis routine.
struct SynthesisOptions {
    Real eps = 1e-6L;
    /// First stage depth tried by the doubling loops.
    std::int64_t start_depth = 8;
    /// Cap on any single limit-stage depth.
    std::int64_t max_depth = 1 << 14;
    /// When positive, every limit stage uses exactly this depth and no error
    /// measurement or retry takes place.
    std::int64_t fixed_depth = 0;
    /// Number of budget halvings before BudgetExceeded.
    int max_retries = 10;
    RatioBounds ratio_bounds{1, 10000000};
    SimultaneousBounds simul_bounds{1, 10000000, 1};
    /// Largest multiplicity tried by the complex scalar solver.
    int max_scalar_factors = 12;
    std::uint64_t seed = 1;
    /// Derived symbols stay unexpanded when expansion would exceed this.
    std::size_t max_expanded_syllables = 1000000;
};

using Depths = std::map<std::string, std::int64_t>;

/// A synthesized word over the ladder symbols R, S, C with its measured error.
struct Stage {
    Word word;
    Real error = 0;
    Depths depths;
};

inline void merge_depths(Depths& into, const std::string& prefix, const Depths& from)
{
    for (const auto& [k, v] : from)
        into[prefix + k] = v;
}

/// The projective roles used by the ladder: R(x) = u + a/x, S(x) = x/b and,
/// when present, C(x) = x/c. `table` maps R, S, C to words of a host system.
template <class T>
struct LftAlphabet {
    T a{1};
    T b{2};
    T u{1};
    std::optional<T> c;
    SubstitutionTable table;
};

/// How a built-in system plays the ladder roles. Signed systems use the
/// nonnegative squares B^2 and C^2.
template <class T>
LftAlphabet<T> alphabet_of(const GeneratorSystem<T>& sys)
{
    LftAlphabet<T> al;
    const std::string& n = sys.name();
    al.a = sys.param("a");
    if (n == "LFT2" || n == "LFT3") {
        al.b = sys.param("b");
        if (n == "LFT3")
            al.c = sys.param("c");
        al.table = {{"R", Word::single("R")}, {"S", Word::single("S")}};
        if (al.c)
            al.table["C"] = Word::single("C");
    } else if (n == "MAT3+") {
        al.b = sys.param("b");
        al.c = T(1) / sys.param("c");
        al.table = {{"R", Word::single("A")}, {"S", Word::single("B")}, {"C", Word::single("C")}};
    } else if (n == "MAT3PM" || n == "EXR") {
        const T& b = sys.param("b");
        const T& c = sys.param("c");
        al.b = b * b;
        al.c = T(1) / (c * c);
        al.table = {{"R", Word::single("A")}, {"S", Word::single("B", 2)}, {"C", Word::single("C", 2)}};
    } else if (n == "CPLX3" || n == "EXC2") {
        al.b = sys.param("b");
        al.u = sys.param("u");
        al.table = {{"R", Word::single("A")}, {"S", Word::single("B")}};
    } else {
        throw Error(Errc::DomainError, "no ladder roles for system " + n);
    }
    return al;
}

template <class T>
ProjectiveMap<T> map_T(const T& s)
{
    return ProjectiveMap<T>::from({T(1), T(0), s, T(1)});
}

template <class T>
ProjectiveMap<T> map_inversion(const T& a)
{
    return ProjectiveMap<T>::from({T(0), a, T(1), T(0)});
}

/// (alpha x + beta) / (gamma x + 1).
template <class T>
ProjectiveMap<T> map_F(const std::array<T, 3>& t)
{
    return ProjectiveMap<T>::from({t[0], t[1], t[2], T(1)});
}

/// x -> exp(log_lambda) x, written with the smaller entry so huge factors stay finite.
inline ProjectiveMap<Real> map_scaling_log(Real log_lambda)
{
    if (log_lambda >= 0)
        return ProjectiveMap<Real>::from({1, 0, 0, std::exp(-log_lambda)});
    return ProjectiveMap<Real>::from({std::exp(log_lambda), 0, 0, 1});
}

/// The constructive limit ladder over an LftAlphabet. Words are built over
/// the ladder symbols and measured against their limit maps in the ladder's
/// own generator system.
template <class T>
class Ladder {
public:
    Ladder(LftAlphabet<T> alphabet, SynthesisOptions opt)
        : al_(std::move(alphabet)), opt_(opt), sys_("ladder", {{"a", al_.a}, {"b", al_.b}, {"u", al_.u}})
    {
        if (!(modulus(al_.b) > 1))
            throw Error(Errc::DomainError, "ladder needs |b| > 1");
        if (al_.a == T(0) || al_.u == T(0))
            throw Error(Errc::DomainError, "ladder needs a, u != 0");
        sys_.add("R", {al_.u, al_.a, T(1), T(0)});
        sys_.add("S", {T(1), T(0), T(0), al_.b});
        if (al_.c)
            sys_.add("C", {T(1), T(0), T(0), *al_.c});
        ln_b_ = std::log(modulus(al_.b));
    }

    const LftAlphabet<T>& alphabet() const noexcept { return al_; }
    const GeneratorSystem<T>& system() const noexcept { return sys_; }
    const SynthesisOptions& options() const noexcept { return opt_; }
    bool fixed() const noexcept { return opt_.fixed_depth > 0; }

    EvaluatedWord<T> eval(const Word& w) const { return evaluate(w, sys_); }

    Real distance(const Word& w, const ProjectiveMap<T>& target) const
    {
        return proj_distance(eval(w).projective, target);
    }

    /// Distance from x to lambda^-1 w(x): the error of a scaling word w
    /// relative to lambda = exp(log_lambda). Plain projective distance hides
    /// the denominator term of w when lambda is large.
    Real scaling_error(const Word& w, Real log_lambda) const
    {
        Mat2<T> r = eval(w).projective.rep();
        T shrink(std::exp(-log_lambda));
        r.m11 *= shrink;
        r.m12 *= shrink;
        return proj_distance(ProjectiveMap<T>::from(r), ProjectiveMap<T>());
    }

    /// S^m R S^m = u/b^m + a/x.
    Word inversion(std::int64_t m) const
    {
        if (m < 1)
            throw Error(Errc::DomainError, "inversion depth must be >= 1");
        return Word{{"S", m}, {"R", 1}, {"S", m}};
    }

    /// S^m R S^(l+m) R = b^l x / (1 + u x / a) + u / b^m.
    Word scale_stage(std::int64_t l, std::int64_t m) const
    {
        if (m < 1)
            throw Error(Errc::DomainError, "scale stage needs m >= 1");
        if (l + m < 0)
            throw Error(Errc::DomainError, "scale stage needs l + m >= 0");
        return Word{{"S", m}, {"R", 1}, {"S", l + m}, {"R", 1}};
    }

    /// scale_stage(l, m) S^(l - alpha), approximately b^alpha x.
    Word power(std::int64_t alpha, std::int64_t l, std::int64_t m) const
    {
        if (l < alpha)
            throw Error(Errc::DomainError, "power word needs l >= alpha");
        return scale_stage(l, m) * Word::single("S", l - alpha);
    }

    /// Ladder for f(x) = x / ((u/a) sum b^alpha_j x + 1) from exponents sorted
    /// ascending, every stage at depth at least M.
    Word ladder(std::vector<std::int64_t> exps, std::int64_t M) const
    {
        if (exps.empty())
            return {};
        std::sort(exps.begin(), exps.end());
        Word g = exps[0] <= 0 ? Word::single("S", -exps[0]) : power(exps[0], exps[0] + M, M);
        for (std::size_t j = 0; j < exps.size(); ++j) {
            std::int64_t next = j + 1 < exps.size() ? exps[j + 1] : 0;
            std::int64_t l = next - exps[j];
            std::int64_t m = M + std::max<std::int64_t>(0, -next) + std::max<std::int64_t>(0, -l);
            g = scale_stage(l, m) * g;
        }
        return g;
    }

    /// Expansion exponents of t = s a / u.
    std::vector<std::int64_t> series(const T& s, Real tol) const
    {
        T t = s * al_.a / al_.u;
        if constexpr (is_complex_v<T>) {
            return greedy_expand_complex(t, al_.b, tol).exponents;
        } else {
            if (t < 0)
                throw Error(Errc::DomainError, "real T_s needs s a / u >= 0");
            return greedy_expand_real(t, al_.b, tol).exponents;
        }
    }

    /// T_s(x) = x / (s x + 1) to projective distance tol; s = 0 gives the empty word.
    Stage T_word(const T& s, Real tol) const
    {
        if (!is_finite(s))
            throw Error(Errc::DomainError, "T_s needs finite s");
        if constexpr (!is_complex_v<T>) {
            if (s < 0)
                throw Error(Errc::DomainError, "real T_s needs s >= 0");
        }
        Stage st;
        if (s == T(0))
            return st;
        const auto target = map_T(s);
        const Real ratio = modulus(al_.a / al_.u);
        if (fixed()) {
            std::int64_t M = opt_.fixed_depth;
            Real series_tol = ratio * std::exp(-static_cast<Real>(M) * ln_b_) * (1 + modulus(s));
            auto exps = series(s, series_tol);
            st.word = ladder(exps, M);
            st.error = distance(st.word, target);
            st.depths = {{"M", M}, {"terms", static_cast<std::int64_t>(exps.size())}};
            return st;
        }
        Real norm = std::sqrt(2 + modulus(s) * modulus(s));
        Real series_tol = tol * ratio * norm / 4;
        for (Real shrink = 1; shrink > 1e-6; shrink /= 16) {
            auto exps = series(s, series_tol * shrink);
            for (std::int64_t M = opt_.start_depth; M <= opt_.max_depth; M *= 2) {
                Word w = ladder(exps, M);
                Real err = distance(w, target);
                if (err <= tol) {
                    st.word = std::move(w);
                    st.error = err;
                    st.depths = {{"M", M}, {"terms", static_cast<std::int64_t>(exps.size())}};
                    return st;
                }
                // Deeper stages stop helping once the series residual dominates.
                if (M >= 4 * opt_.start_depth && err > tol && w.syllables() > 0) {
                    Word deeper = ladder(exps, 2 * M);
                    if (distance(deeper, target) > 0.9L * err)
                        break;
                }
            }
        }
        throw Error(Errc::BudgetExceeded, "T_s ladder did not reach tolerance");
    }

    /// I(x) = a/x to projective distance tol.
    Stage inversion_word(Real tol) const
    {
        const auto target = map_inversion(al_.a);
        Stage st;
        if (fixed()) {
            st.word = inversion(opt_.fixed_depth);
            st.error = distance(st.word, target);
            st.depths = {{"m", opt_.fixed_depth}};
            return st;
        }
        Real scale = std::sqrt(1 + modulus(al_.a) * modulus(al_.a));
        Real guess = std::log(modulus(al_.u) / (tol * scale)) / ln_b_;
        std::int64_t m = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(guess)));
        for (; m <= opt_.max_depth; ++m) {
            Word w = inversion(m);
            Real err = distance(w, target);
            if (err <= tol) {
                st.word = std::move(w);
                st.error = err;
                st.depths = {{"m", m}};
                return st;
            }
        }
        throw Error(Errc::BudgetExceeded, "inversion depth cap reached");
    }

    /// x -> b^alpha x: exact S^(-alpha) for alpha <= 0, the power ladder
    /// otherwise. A scaling prefix x -> exp(prefix_log) x is measured
    /// together with the ladder: for large alpha the ladder alone has no
    /// long double matrix, while the product does.
    Stage power_word(std::int64_t alpha, Real tol, const Word& prefix = {}, Real prefix_log = 0) const
    {
        Stage st;
        if (alpha <= 0) {
            st.word = prefix * Word::single("S", -alpha);
            st.error = prefix.empty() ? 0 : scaling_error(st.word, prefix_log + static_cast<Real>(alpha) * ln_b_);
            return st;
        }
        const Real log_lambda = prefix_log + static_cast<Real>(alpha) * ln_b_;
        if (fixed()) {
            std::int64_t M = opt_.fixed_depth;
            st.word = prefix * power(alpha, alpha + M, M);
            st.error = scaling_error(st.word, log_lambda);
            st.depths = {{"M", M}};
            return st;
        }
        for (std::int64_t M = opt_.start_depth; M <= opt_.max_depth; M *= 2) {
            Word w = prefix * power(alpha, alpha + M, M);
            Real err = scaling_error(w, log_lambda);
            if (err <= tol) {
                st.word = std::move(w);
                st.error = err;
                st.depths = {{"M", M}};
                return st;
            }
        }
        throw Error(Errc::BudgetExceeded, "power ladder depth cap reached");
    }

    /// (alpha x + beta) / (gamma x + 1) through T_u I T_(v/a) I T_w with
    /// u = (1 - sqrt d)/beta, v = beta / sqrt d, w = (alpha - sqrt d)/beta and
    /// d = alpha - beta gamma. Real triples must satisfy 0 <= d <= min(1, alpha^2);
    /// boundary triples (beta = 0 or d = 0) are nudged within tol/2.
    Stage F_word(std::array<T, 3> t, Real tol) const
    {
        auto [alpha, beta, gamma] = t;
        const auto target = map_F(t);
        if constexpr (!is_complex_v<T>) {
            const Real slack = 1e-12L;
            if (alpha < -slack || beta < -slack || gamma < -slack)
                throw Error(Errc::DomainError, "F triple needs nonnegative entries");
            alpha = std::max<Real>(alpha, 0);
            beta = std::max<Real>(beta, 0);
            gamma = std::max<Real>(gamma, 0);
            Real d = alpha - beta * gamma;
            Real bound = std::min<Real>(1, alpha * alpha);
            if (d < -slack * (1 + alpha) || d > bound * (1 + 1e-9L) + slack)
                throw Error(Errc::DomainError, "F triple violates 0 <= alpha - beta gamma <= min(1, alpha^2)");
            if (beta == 0) {
                // Then d = alpha and the constraint forces alpha = 1: F = T_gamma.
                Stage st = T_word(gamma, tol / 2);
                st.error = distance(st.word, target);
                return st;
            }
        }
        T d = alpha - beta * gamma;
        bool nudge = beta == T(0) || modulus(d) <= 1e-12L * (modulus(alpha) + modulus(beta * gamma));
        if (nudge) {
            std::array<T, 3> moved{alpha, beta, gamma};
            Real step = tol / 4 * std::sqrt(modulus(alpha) * modulus(alpha) + modulus(beta) * modulus(beta) +
                                            modulus(gamma) * modulus(gamma) + 1);
            for (int i = 0; i < 60; ++i, step /= 2) {
                moved = {alpha + T(step), beta == T(0) ? T(step) : beta, gamma};
                if (proj_distance(map_F(moved), target) <= tol / 2)
                    break;
            }
            Stage st = F_word_regular(moved, tol / 2);
            st.error = distance(st.word, target);
            st.depths["nudged"] = 1;
            return st;
        }
        Stage st = F_word_regular({alpha, beta, gamma}, tol);
        st.error = distance(st.word, target);
        return st;
    }

    /// Any projective target. Real ladders need nonnegative coefficients and
    /// dispatch to the 3-generator construction when C is present, to the
    /// closure construction otherwise; complex ladders solve Eq. F directly.
    Stage lft(const ProjectiveMap<T>& target, Real tol) const
    {
        if (auto exact = exact_letter(target))
            return *exact;
        if constexpr (is_complex_v<T>)
            return lft_complex(target, tol);
        else if (al_.c)
            return lft3(target, tol);
        else
            return closure(target, tol);
    }

    /// A single ladder letter (or the empty word) when the target is one.
    std::optional<Stage> exact_letter(const ProjectiveMap<T>& target) const
    {
        const Real exact_tol = 16 * std::numeric_limits<Real>::epsilon();
        if (proj_distance(target, ProjectiveMap<T>()) <= exact_tol)
            return Stage{};
        for (const auto& g : sys_.generators()) {
            if (proj_distance(target, ProjectiveMap<T>::from(g.matrix)) <= exact_tol)
                return Stage{Word::single(g.symbol), 0, {}};
        }
        return std::nullopt;
    }

    /// Closure construction over {R, S} for f in U_k: f = (b^k x) o h with
    /// h = (alpha b^-k, beta b^-k, gamma) in U_0. Targets outside U are first
    /// moved into U (see project_into_U); the returned error is against the
    /// original target.
    Stage closure(const ProjectiveMap<Real>& target, Real tol) const
        requires(!is_complex_v<T>)
    {
        auto projected = project_into_U(target);
        auto [alpha, beta, gamma] = f_plus_coefficients(projected);
        std::int64_t k = preferred_witness(projected);
        Real bk = std::pow(al_.b, static_cast<Real>(-k));
        std::array<Real, 3> h{alpha * bk, beta * bk, gamma};
        Real stage_tol = tol / 2;
        for (int attempt = 0; attempt <= opt_.max_retries; ++attempt, stage_tol /= 2) {
            Stage f = F_word(h, stage_tol);
            Stage p = power_word(k, stage_tol);
            Stage st;
            st.word = p.word * f.word;
            st.error = distance(st.word, target);
            st.depths = {{"k", k}};
            merge_depths(st.depths, "scale.", p.depths);
            merge_depths(st.depths, "F.", f.depths);
            if (!(projected == target))
                st.depths["projected"] = 1;
            if (fixed() || st.error <= tol || !(projected == target))
                return st;
        }
        throw Error(Errc::BudgetExceeded, "closure synthesis did not reach tolerance");
    }

    /// Replaces a target outside U by the map with the same alpha, beta and the
    /// largest admissible det (gamma raised), or alpha rounded to a power of b
    /// when beta = 0. Targets inside U are returned unchanged.
    ProjectiveMap<Real> project_into_U(const ProjectiveMap<Real>& f) const
        requires(!is_complex_v<T>)
    {
        auto v = in_U(f, al_.b);
        if (v.in_closure)
            return f;
        auto [alpha, beta, gamma] = f_plus_coefficients(f);
        Real mid = (v.lo + v.hi) / 2;
        Real best = 0;
        for (Real k : {std::floor(mid), std::ceil(mid)}) {
            Real bk = std::pow(al_.b, k);
            best = std::max(best, std::min(bk, alpha * alpha / bk));
        }
        if (beta > 0)
            return ProjectiveMap<Real>::from({alpha, beta, (alpha - best) / beta, 1});
        Real k = std::nearbyint(std::log(alpha) / ln_b_);
        return ProjectiveMap<Real>::from({std::pow(al_.b, k), 0, gamma, 1});
    }

private:
    /// An admissible k for f in U, preferring k <= 0 (exact S powers).
    std::int64_t preferred_witness(const ProjectiveMap<Real>& f) const
        requires(!is_complex_v<T>)
    {
        auto v = in_U(f, al_.b);
        if (!v.in_closure)
            throw Error(Errc::NotInDomain, "target is not in the closure");
        if (!std::isfinite(v.lo))
            return 0;
        auto [alpha, beta, gamma] = f_plus_coefficients(f);
        Real det = alpha - beta * gamma;
        auto ok = [&](std::int64_t k) {
            Real bk = std::pow(al_.b, static_cast<Real>(k));
            return det <= std::min(bk, alpha * alpha / bk) * (1 + 1e-12L);
        };
        auto lo = static_cast<std::int64_t>(std::ceil(v.lo - 1e-9L));
        auto hi = static_cast<std::int64_t>(std::floor(v.hi + 1e-9L));
        if (lo <= 0 && ok(std::min<std::int64_t>(hi, 0)))
            return std::min<std::int64_t>(hi, 0);
        for (std::int64_t k = lo; k <= hi; ++k)
            if (ok(k))
                return k;
        return *v.witness_k;
    }

    Stage F_word_regular(const std::array<T, 3>& t, Real tol) const
    {
        const auto [alpha, beta, gamma] = t;
        const auto target = map_F(t);
        T sd = std::sqrt(alpha - beta * gamma);
        T tu = (T(1) - sd) / beta;
        T tv = beta / sd;
        T tw = (alpha - sd) / beta;
        if constexpr (!is_complex_v<T>) {
            auto clamp = [&](Real& x) {
                if (x < 0 && x > -1e-9L * (1 + 1 / beta))
                    x = 0;
            };
            clamp(tu);
            clamp(tw);
            if (tu < 0 || tw < 0)
                throw Error(Errc::DomainError, "F triple outside the admissible region");
        }
        Real stage_tol = tol / 8;
        for (int attempt = 0; attempt <= opt_.max_retries; ++attempt, stage_tol /= 2) {
            Stage s1 = T_word(tu, stage_tol);
            Stage i1 = inversion_word(stage_tol);
            Stage s2 = T_word(tv / al_.a, stage_tol);
            Stage s3 = T_word(tw, stage_tol);
            Stage st;
            st.word = s1.word * i1.word * s2.word * i1.word * s3.word;
            st.error = distance(st.word, target);
            merge_depths(st.depths, "T1.", s1.depths);
            merge_depths(st.depths, "I.", i1.depths);
            merge_depths(st.depths, "T2.", s2.depths);
            merge_depths(st.depths, "T3.", s3.depths);
            if (fixed() || st.error <= tol)
                return st;
        }
        throw Error(Errc::BudgetExceeded, "F synthesis did not reach tolerance");
    }

    /// x -> exp(log_lambda) x over {S, C}: lambda ~ b^k c^-l realized as
    /// C^l followed by the b^k power word.
    Stage scaling(Real log_lambda, Real tol) const
        requires(!is_complex_v<T>)
    {
        Real kb = log_lambda / ln_b_;
        if (std::abs(kb - std::nearbyint(kb)) <= 1e-12L * std::max<Real>(1, std::abs(kb)))
            return power_word(static_cast<std::int64_t>(std::nearbyint(kb)), tol);
        Real ratio_tol = tol / 2;
        for (int attempt = 0; attempt <= opt_.max_retries; ++attempt, ratio_tol /= 4) {
            auto sol = solve_ratio_log(log_lambda, al_.b, *al_.c, ratio_tol, opt_.ratio_bounds);
            Real prefix_log = -static_cast<Real>(sol.l) * std::log(*al_.c);
            Stage p = power_word(sol.k, tol / 2, Word::single("C", sol.l), prefix_log);
            Stage st;
            st.word = p.word;
            st.error = p.error;
            st.depths = {{"k", sol.k}, {"l", sol.l}};
            merge_depths(st.depths, "power.", p.depths);
            if (fixed() || st.error <= tol)
                return st;
        }
        throw Error(Errc::BudgetExceeded, "scaling word did not reach tolerance");
    }

    /// Composite of two stages, retried with halved budgets until the
    /// measured error meets tol.
    template <class Build>
    Stage retry(const ProjectiveMap<T>& target, Real tol, const char* what, Build build) const
    {
        Real stage_tol = tol / 4;
        for (int attempt = 0; attempt <= opt_.max_retries; ++attempt, stage_tol /= 2) {
            Stage st = build(stage_tol);
            st.error = distance(st.word, target);
            if (fixed() || st.error <= tol)
                return st;
        }
        throw Error(Errc::BudgetExceeded, std::string(what) + " did not reach tolerance");
    }

    /// f with delta = 0 or det < 0 is h o I with h = f o I.
    Stage through_inversion(const ProjectiveMap<T>& target, Real tol) const
    {
        Mat2<T> I{T(0), al_.a, T(1), T(0)};
        auto h = ProjectiveMap<T>::from(target.rep() * I);
        return retry(target, tol, "inversion route", [&](Real t) {
            Stage sh = lft(h, t);
            Stage si = inversion_word(t);
            Stage st;
            st.word = sh.word * si.word;
            merge_depths(st.depths, "h.", sh.depths);
            merge_depths(st.depths, "I.", si.depths);
            return st;
        });
    }

    Stage lft3(const ProjectiveMap<Real>& target, Real tol) const
        requires(!is_complex_v<T>)
    {
        const Mat2<Real>& m = target.rep();
        const Real neg = 1e-15L;
        if (m.m11 < -neg || m.m12 < -neg || m.m21 < -neg || m.m22 < -neg)
            throw Error(Errc::DomainError, "3-generator synthesis needs nonnegative coefficients");
        auto sd = spectral_data(target);
        if (!sd.defined || sd.det_norm < 0)
            return through_inversion(target, tol);
        auto [alpha, beta, gamma] = *delta_normalized(m);
        alpha = std::max<Real>(alpha, 0);
        beta = std::max<Real>(beta, 0);
        gamma = std::max<Real>(gamma, 0);
        const Real ln_alpha = std::log(alpha);
        if (beta == 0 && gamma == 0)
            return scaling(ln_alpha, tol);
        if (beta == 0) {
            return retry(target, tol, "scaled T", [&](Real t) {
                Stage s1 = T_word(gamma / alpha, t);
                Stage s2 = scaling(ln_alpha, t);
                Stage st;
                st.word = s1.word * s2.word;
                merge_depths(st.depths, "T.", s1.depths);
                merge_depths(st.depths, "scale.", s2.depths);
                return st;
            });
        }
        if (gamma == 0) {
            return retry(target, tol, "translation", [&](Real t) {
                Stage sc = scaling(ln_alpha, t);
                Stage si = inversion_word(t);
                Stage st_ = T_word(beta / (alpha * al_.a), t);
                Stage st;
                st.word = sc.word * si.word * st_.word * si.word;
                merge_depths(st.depths, "scale.", sc.depths);
                merge_depths(st.depths, "I.", si.depths);
                merge_depths(st.depths, "T.", st_.depths);
                return st;
            });
        }
        // lambda = b^k c^-l must lie in [d, alpha^2/d], i.e. within ln(alpha/d)
        // of alpha in log scale; keep 10% headroom.
        Real d = alpha - beta * gamma;
        Real slack = d > 0 ? 0.9L * std::log(alpha / d) : Real(1);
        slack = std::min<Real>(slack, 1);
        auto accept = [&](const RatioSolution& s) { return std::abs(s.log_achieved - ln_alpha) <= slack; };
        auto sol = solve_ratio_log(ln_alpha, al_.b, *al_.c, std::expm1(slack), opt_.ratio_bounds, accept);
        Real shrink = std::exp(ln_alpha - sol.log_achieved);
        std::array<Real, 3> h{shrink, beta * shrink / alpha, gamma};
        return retry(target, tol, "3-generator synthesis", [&](Real t) {
            Real prefix_log = -static_cast<Real>(sol.l) * std::log(*al_.c);
            Stage sp = power_word(sol.k, t, Word::single("C", sol.l), prefix_log);
            Stage sf = F_word(h, t);
            Stage st;
            st.word = sp.word * sf.word;
            st.depths = {{"kronecker.k", sol.k}, {"kronecker.l", sol.l}};
            merge_depths(st.depths, "power.", sp.depths);
            merge_depths(st.depths, "F.", sf.depths);
            return st;
        });
    }

    Stage lft_complex(const ProjectiveMap<T>& target, Real tol) const
    {
        auto n = delta_normalized(target.rep());
        if (!n)
            return through_inversion(target, tol);
        return F_word(*n, tol);
    }

    LftAlphabet<T> al_;
    SynthesisOptions opt_;
    GeneratorSystem<T> sys_;
    Real ln_b_ = 0;
};

} // namespace moebius
