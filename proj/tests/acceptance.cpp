// Acceptance run: one PASS/FAIL line per criterion, with wall time.
// Exit status is 0 when every criterion passes apart from the known
// certificate failure at r = 4 (see README).

#include "moebius/moebius.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace moebius;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
    /// Sub-check that fails for a documented reason and does not affect the
    /// exit status.
    bool known_failure = false;
    bool other_parts_pass = false;
};

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<Outcome()> run;
};

std::string fmt(long double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3Lg", x);
    return buf;
}

ProjectiveMap<Real> random_accepted_target(std::mt19937_64& rng)
{
    std::uniform_real_distribution<Real> u(0.05L, 1), ua(0.5L, 3);
    for (;;) {
        Real alpha = ua(rng);
        Real cap = std::min({Real(2), alpha * alpha / 2, alpha});
        Real det = cap * u(rng), beta = ua(rng), gamma = (alpha - det) / beta;
        auto f = ProjectiveMap<Real>::lft(alpha, beta, gamma, 1);
        if (gamma >= 0 && in_U(f, 2).in_closure)
            return f;
    }
}

Rational random_rational(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> p(1, 60), q(1, 24);
    return Rational(p(rng), q(rng));
}

ProjectiveMap<Rational> composite(const Rational& u, const Rational& v, const Rational& w, const Rational& a)
{
    auto I = map_inversion(a);
    return compose(compose(compose(compose(map_T(u), I), map_T(Rational(v / a))), I), map_T(w));
}

Outcome exact_identity()
{
    auto e = evaluate(parse_word("A B A^3 B A"), exr<Rational>(Rational(1, 2)));
    Mat2<Rational> expected = Mat2<Rational>::diagonal(Rational(-2, 9), Rational(1));
    Mat2<Rational> m = e.matrix();
    Rational dist = 0;
    for (int i = 0; i < 4; ++i)
        dist += abs(m.entries()[i] - expected.entries()[i]);
    return {dist == 0, "distance " + dist.str()};
}

Outcome composite_identity()
{
    std::mt19937_64 rng(2);
    for (int i = 0; i < 100; ++i) {
        Rational u = random_rational(rng), v = random_rational(rng), w = random_rational(rng),
                 a = random_rational(rng);
        auto expected = ProjectiveMap<Rational>::lft(1 + v * w, v, u + w + u * v * w, 1 + u * v);
        if (!(composite(u, v, w, a) == expected))
            return {false, "mismatch at u=" + u.str() + " v=" + v.str() + " w=" + w.str() + " a=" + a.str()};
    }
    return {true, "100 exact matches"};
}

Outcome parameter_round_trip()
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        Rational sd = random_rational(rng), beta = random_rational(rng), gamma = random_rational(rng),
                 a = random_rational(rng);
        Rational alpha = sd * sd + beta * gamma;
        Rational u = (1 - sd) / beta, v = beta / sd, w = (alpha - sd) / beta;
        if (!(composite(u, v, w, a) == ProjectiveMap<Rational>::lft(alpha, beta, gamma, 1)))
            return {false, "mismatch at alpha=" + alpha.str() + " beta=" + beta.str() + " gamma=" + gamma.str()};
    }
    return {true, "100 exact round trips"};
}

Outcome closure_oracle()
{
    auto sys = lft2<Real>(1, 2);
    WordEnumerator e({"R", "S"}, 12);
    std::size_t checked = 0, bad = 0;
    std::string first_bad;
    while (auto w = e.next()) {
        std::int64_t r = 0;
        for (const auto& l : w->letters())
            if (l.symbol == "R")
                r += l.exponent;
        if (r % 2 != 0)
            continue;
        auto f = evaluate(*w, sys).projective;
        if (!spectral_data(f).defined)
            continue;
        ++checked;
        if (!in_U(f, 2).in_closure && bad++ == 0)
            first_bad = format_word(*w);
    }
    std::string d = std::to_string(checked) + " words, " + std::to_string(bad) + " counterexamples";
    if (bad)
        d += " (first: " + first_bad + ")";
    return {bad == 0 && checked > 0, d};
}

Outcome negative_control()
{
    Real r2 = std::sqrt(Real(2));
    auto f = ProjectiveMap<Real>::lft(r2, 1, r2 - 1.2L, 1);
    auto v = in_U(f, 2);
    // margin is negative outside; its magnitude is the distance from the
    // nearest integer k to the admissible interval, in units of log_b.
    bool rejected = !v.in_closure && -v.margin > 0.05L;
    auto sys = lft2<Real>(1, 2);
    SynthesisOptions base;
    Real smallest = std::numeric_limits<Real>::infinity();
    for (std::int64_t d = base.start_depth; d <= base.max_depth; d *= 2) {
        SynthesisOptions opt;
        opt.fixed_depth = d;
        smallest = std::min(smallest, approximate_lft(f, sys, opt).error);
    }
    return {rejected && smallest > 0.05L,
            "margin " + fmt(v.margin) + ", smallest error over depths " + std::to_string(base.start_depth) + ".." +
                std::to_string(base.max_depth) + " is " + fmt(smallest)};
}

Outcome synthesis_convergence()
{
    std::mt19937_64 rng(6);
    auto sys = lft2<Real>(1, 2);
    std::vector<ProjectiveMap<Real>> targets;
    for (int i = 0; i < 50; ++i)
        targets.push_back(random_accepted_target(rng));
    Real worst = 0;
    for (const auto& f : targets)
        worst = std::max(worst, approximate_lft(f, sys, SynthesisOptions{}).error);

    bool monotone = true;
    Real prev = std::numeric_limits<Real>::infinity();
    std::ostringstream medians;
    for (std::int64_t d = 8; d <= 256; d *= 2) {
        SynthesisOptions opt;
        opt.fixed_depth = d;
        std::vector<Real> errs;
        for (const auto& f : targets)
            errs.push_back(approximate_lft(f, sys, opt).error);
        std::sort(errs.begin(), errs.end());
        Real med = errs[errs.size() / 2];
        monotone = monotone && med <= prev;
        prev = med;
        medians << (d == 8 ? "" : " ") << fmt(med);
    }
    return {worst <= 1e-6L && monotone, "worst " + fmt(worst) + ", medians at depth 8..256: " + medians.str()};
}

Outcome lft_density()
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<Real> u(0, 5);
    auto sys = lft3<Real>(1, 2, 3);
    SynthesisOptions opt;
    opt.eps = 1e-4L;
    Real worst = 0;
    for (int i = 0; i < 25;) {
        Mat2<Real> m{u(rng), u(rng), u(rng), u(rng)};
        if (std::abs(m.det()) < 0.05L)
            continue;
        ++i;
        worst = std::max(worst, approximate_lft(ProjectiveMap<Real>::from(m), sys, opt).error);
    }
    return {worst <= 1e-4L, "worst error " + fmt(worst)};
}

Outcome matrix_density()
{
    SynthesisOptions opt;
    opt.eps = 1e-2L;
    auto x = word_matrix_nonneg({1, 2, 3, 4}, mat3_nonneg<Real>(1, 8.0L / 3, 2.0L / 9), opt);
    opt.eps = 5e-2L;
    auto y = word_matrix_real({1, 1, 1, -1}, exr<Real>(), opt);
    return {x.error <= 1e-2L && y.error <= 5e-2L,
            "MAT3+ [[1,2],[3,4]] " + fmt(x.error) + ", EXR [[1,1],[1,-1]] " + fmt(y.error)};
}

Outcome complex_case()
{
    auto p = exc2_params(4);
    bool identity = p.identity_error <= 1e-10L;
    bool closed = std::abs(p.c_abs2 - p.c_abs2_closed) <= 1e-12L && p.c_abs2 < 1;
    auto cert = detail::complex_certificate(p.b, p.c, 100);
    bool certified = !cert.relation_found;

    SynthesisOptions opt;
    opt.eps = 1e-2L;
    auto rep = word_matrix_complex(Mat2<Complex>::diagonal(Complex(0, 1), Complex(0, 1)), exc2(4, 0), opt);
    bool scalar = rep.error <= 1e-2L;

    std::string d = "identity " + fmt(p.identity_error) + ", |c|^2 gap " + fmt(std::abs(p.c_abs2 - p.c_abs2_closed)) +
                    ", certificate " + cert.verdict();
    if (cert.relation_found)
        d += " (" + std::to_string(cert.A) + ", " + std::to_string(cert.B) + ", " + std::to_string(cert.C) +
             "; known, arg(c)/2pi = -7/24)";
    d += ", i*I error " + fmt(rep.error);
    Outcome o{identity && closed && certified && scalar, d};
    o.known_failure = !certified;
    o.other_parts_pass = identity && closed && scalar;
    return o;
}

Outcome orbit_closure()
{
    std::mt19937_64 rng(10);
    std::uniform_int_distribution<int> len(0, 15), coin(0, 1);
    OrbitRegionQuery q{2, 1, 1, 2};
    int outside = 0;
    for (int i = 0; i < 10000; ++i) {
        Real x = 2, y = 1;
        int n = len(rng);
        for (int j = 0; j < n; ++j) {
            if (coin(rng)) {
                Real nx = 1 + q.a / x, ny = 1 + q.a / y;
                x = nx;
                y = ny;
            } else {
                x /= q.b;
                y /= q.b;
            }
        }
        outside += orbit_closure_contains(x, y, q).contained ? 0 : 1;
    }
    bool far = orbit_closure_contains(10, 1, q).contained;
    return {outside == 0 && !far,
            std::to_string(outside) + " of 10000 images outside, (10,1) " + (far ? "accepted" : "rejected")};
}

Outcome dense_orbit()
{
    OrbitSampleOptions opt;
    auto from_edge = dense_orbit_sample(opt);
    opt.start_x = 0;
    opt.start_y = 0;
    auto from_origin = dense_orbit_sample(opt);
    return {from_edge.coverage <= 0.05L && from_origin.coverage >= 0.2L,
            "coverage from (0,1) " + fmt(from_edge.coverage) + " at depth " + std::to_string(opt.depth) +
                ", from (0,0) " + fmt(from_origin.coverage)};
}

Outcome diophantine()
{
    auto ratio_ok = [](const RatioSolution& s, Big target, Big b, Big c, Big tol) {
        Big achieved = pow(b, s.k) / pow(c, s.l);
        return abs(achieved / target - 1) <= tol;
    };
    auto s = solve_ratio(5, 2, 3, 0.05L);
    bool ok = ratio_ok(s, 5, 2, 3, Big(0.05L));
    int verified = ok ? 1 : 0, total = 1;

    std::mt19937_64 rng(12);
    std::uniform_real_distribution<Real> ut(0.01L, 100), ub(1.1L, 5), utol(1e-4L, 1e-1L);
    for (int i = 0; i < 200; ++i) {
        Real t = ut(rng), b = ub(rng), c = ub(rng), tol = utol(rng);
        if (std::abs(std::log(b) / std::log(c) - std::round(std::log(b) / std::log(c))) < 1e-3L)
            continue;
        try {
            auto r = solve_ratio(t, b, c, tol);
            ++total;
            verified += ratio_ok(r, Big(t), Big(b), Big(c), Big(tol) * (1 + Big(1e-15L))) ? 1 : 0;
        } catch (const Error&) {
        }
    }
    std::uniform_real_distribution<Real> uth(0.1L, 3), uphi(0, 1);
    for (int i = 0; i < 20; ++i) {
        Real t1 = uth(rng), t2 = uth(rng), p1 = uphi(rng), p2 = uphi(rng), eps = 0.01L;
        try {
            auto r = solve_simultaneous(t1, t2, p1, p2, eps, {1, 1000000, INT64_MIN});
            ++total;
            Big e1 = abs(Big(r.n) * Big(t1) - Big(p1) + Big(r.L));
            Big e2 = abs(Big(r.n) * Big(t2) - Big(p2) + Big(r.m));
            verified += (e1 < Big(eps) && e2 < Big(eps)) ? 1 : 0;
        } catch (const Error&) {
        }
    }
    return {ok && verified == total, "5 ~ 2^" + std::to_string(s.k) + " 3^-" + std::to_string(s.l) + " (rel " +
                                         fmt(s.rel_err) + "), " + std::to_string(verified) + "/" +
                                         std::to_string(total) + " solutions re-verified at 50 digits"};
}

} // namespace

int main()
{
    std::vector<Criterion> criteria{
        {1, "exact A B A^3 B A identity", 1, exact_identity},
        {2, "composite T I T I T identity", 5, composite_identity},
        {3, "F parameter round trip", 5, parameter_round_trip},
        {4, "closure oracle on short even words", 30, closure_oracle},
        {5, "negative control", 30, negative_control},
        {6, "synthesis convergence over LFT2(1,2)", 120, synthesis_convergence},
        {7, "LFT density over LFT3(1,2,3)", 120, lft_density},
        {8, "matrix density over MAT3+ and EXR", 180, matrix_density},
        {9, "complex case at r = 4", 180, complex_case},
        {10, "orbit closure of (2,1)", 60, orbit_closure},
        {11, "dense-orbit sampler coverage", 120, dense_orbit},
        {12, "ratio and simultaneous solvers", 30, diophantine},
    };
    int hard_failures = 0, known = 0;
    for (const auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = secs < c.budget_seconds;
        bool passed = o.passed && in_time;
        std::printf("%s [%2d] %s: %s; %.2f s (limit %.0f s)%s\n", passed ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : " TIMEOUT");
        std::fflush(stdout);
        if (passed)
            continue;
        if (o.known_failure && o.other_parts_pass && in_time)
            ++known;
        else
            ++hard_failures;
    }
    std::printf("%d criteria, %d failed, %d known failure(s) tolerated\n", static_cast<int>(criteria.size()),
                hard_failures + known, known);
    return hard_failures == 0 ? 0 : 1;
}
