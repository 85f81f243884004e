#pragma once

#include "moebius/moebius.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace moebius::cli {

/// Bad input that is not a domain error: unreadable files, malformed JSON,
/// unparsable numbers. Exits 2 like other usage errors.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Decimal or p/q.
inline Real parse_real(const std::string& s)
{
    if (auto slash = s.find('/'); slash != std::string::npos && slash > 0)
        return parse_real(s.substr(0, slash)) / parse_real(s.substr(slash + 1));
    std::size_t used = 0;
    Real v = 0;
    try {
        v = std::stold(s, &used);
    } catch (const std::exception&) {
        throw UsageError("not a number: " + s);
    }
    if (used != s.size())
        throw UsageError("not a number: " + s);
    return v;
}

/// "2", "-0.5i", "1+2i", "1.5-0.25i", "i", "(1,2)".
inline Complex parse_complex(std::string s)
{
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    if (s.empty())
        throw UsageError("empty complex number");
    if (s.front() == '(' && s.back() == ')') {
        auto comma = s.find(',');
        if (comma == std::string::npos)
            throw UsageError("bad complex number: " + s);
        return {parse_real(s.substr(1, comma - 1)), parse_real(s.substr(comma + 1, s.size() - comma - 2))};
    }
    if (s.back() != 'i')
        return {parse_real(s), 0};
    std::string body = s.substr(0, s.size() - 1);
    // The imaginary part starts at the last sign that is not an exponent sign.
    std::size_t split = std::string::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    auto imag = [](const std::string& t) {
        if (t.empty() || t == "+")
            return Real(1);
        if (t == "-")
            return Real(-1);
        return parse_real(t);
    };
    if (split == std::string::npos)
        return {0, imag(body)};
    return {parse_real(body.substr(0, split)), imag(body.substr(split))};
}

/// "1/2", "0.6", "-3" as an exact rational (decimals are read exactly).
inline Rational parse_rational(const std::string& s)
{
    try {
        auto slash = s.find('/');
        if (slash != std::string::npos)
            return Rational(boost::multiprecision::cpp_int(s.substr(0, slash)),
                            boost::multiprecision::cpp_int(s.substr(slash + 1)));
        auto dot = s.find('.');
        if (dot == std::string::npos)
            return Rational(boost::multiprecision::cpp_int(s));
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        boost::multiprecision::cpp_int den = boost::multiprecision::pow(boost::multiprecision::cpp_int(10),
                                                                        static_cast<unsigned>(s.size() - dot - 1));
        return Rational(boost::multiprecision::cpp_int(digits), den);
    } catch (const std::exception&) {
        throw UsageError("not a rational: " + s);
    }
}

inline std::pair<Real, Real> parse_pair(const std::string& s)
{
    auto comma = s.find(',');
    if (comma == std::string::npos)
        throw UsageError("expected x,y: " + s);
    return {parse_real(s.substr(0, comma)), parse_real(s.substr(comma + 1))};
}

/// "a=1,b=2,c=3".
inline std::map<std::string, std::string> parse_params(const std::string& s)
{
    std::map<std::string, std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw UsageError("expected key=value: " + item);
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

/// Inline JSON when the text starts with [ or {, a file path otherwise.
inline json read_json(const std::string& arg)
{
    std::string text = arg;
    auto first = arg.find_first_not_of(" \t\n");
    if (first == std::string::npos || (arg[first] != '[' && arg[first] != '{')) {
        std::ifstream in(arg);
        if (!in)
            throw UsageError("cannot read " + arg);
        std::stringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("malformed JSON: ") + e.what());
    }
}

struct SystemSpec {
    std::string name;
    std::map<std::string, std::string> params;
    std::int64_t height = default_certificate_height;

    bool complex() const { return name == "CPLX3" || name == "EXC2"; }

    Real real(const std::string& key, std::optional<Real> fallback = {}) const
    {
        auto it = params.find(key);
        if (it == params.end()) {
            if (fallback)
                return *fallback;
            throw UsageError(name + " needs parameter " + key);
        }
        return parse_real(it->second);
    }

    Complex cplx(const std::string& key) const
    {
        auto it = params.find(key);
        if (it == params.end())
            throw UsageError(name + " needs parameter " + key);
        return parse_complex(it->second);
    }

    template <class T>
    GeneratorSystem<T> build_real() const
    {
        auto v = [&](const std::string& k, std::optional<Real> d = {}) {
            if constexpr (is_exact_v<T>) {
                auto it = params.find(k);
                return it == params.end() ? rational_from(real(k, d)) : parse_rational(it->second);
            }
            else
                return real(k, d);
        };
        if (name == "LFT2")
            return lft2<T>(v("a"), v("b"));
        if (name == "LFT3")
            return lft3<T>(v("a"), v("b"), v("c"), height);
        if (name == "MAT3+")
            return mat3_nonneg<T>(v("a"), v("b"), v("c"), height);
        if (name == "MAT3PM")
            return mat3_signed<T>(v("a"), v("b"), v("c"), height);
        if (name == "EXR") {
            if (params.count("a"))
                return exr<T>(v("a"));
            return exr<T>();
        }
        throw UsageError("unknown real system " + name);
    }

    GeneratorSystem<Complex> build_complex() const
    {
        if (name == "EXC2")
            return exc2(real("r"), height);
        if (name == "CPLX3") {
            Complex b = params.count("r") ? Complex(0, real("r")) : cplx("b");
            Complex u = params.count("u") ? cplx("u") : Complex(1);
            return cplx3(cplx("a"), b, cplx("c"), u, height);
        }
        throw UsageError("unknown complex system " + name);
    }
};

inline const std::vector<std::string>& system_names()
{
    static const std::vector<std::string> names{"LFT2", "LFT3", "MAT3+", "MAT3PM", "EXR", "CPLX3", "EXC2"};
    return names;
}

struct ApproximateArgs {
    std::string kind;
    std::string system;
    std::string params;
    std::string target;
    Real eps = 0;
    std::int64_t max_depth = 1 << 14;
    std::int64_t l_max = 10000000;
    std::int64_t n_max = 10000000;
    std::int64_t height = default_certificate_height;
    bool exact_check = false;
    std::string csv;
    std::uint64_t seed = 1;
    int jobs = 1;
    bool timing = false;
};

namespace detail {

inline SynthesisOptions options_of(const ApproximateArgs& a)
{
    SynthesisOptions o;
    o.eps = a.eps;
    o.max_depth = a.max_depth;
    o.ratio_bounds.l_max = a.l_max;
    o.simul_bounds.n_max = a.n_max;
    o.seed = a.seed;
    return o;
}

template <class T>
ApproxReport<T> run_one(const std::string& kind, const Mat2<T>& X, const GeneratorSystem<T>& sys,
                        const SynthesisOptions& o)
{
    if (kind == "lft")
        return approximate_lft(ProjectiveMap<T>::from(X), sys, o);
    return approximate_matrix(X, sys, o);
}

inline Mat2<Complex> promote(const AnyMatrix& m)
{
    if (auto r = std::get_if<Mat2<Real>>(&m))
        return r->cast<Complex>();
    return std::get<Mat2<Complex>>(m);
}

inline Mat2<Real> require_real(const AnyMatrix& m)
{
    if (auto r = std::get_if<Mat2<Real>>(&m))
        return *r;
    throw Error(Errc::DomainError, "complex target for a real system");
}

/// Re-parses the printed word, re-evaluates it, and for real systems with a
/// short enough word repeats the evaluation in exact rational arithmetic.
template <class T>
json exact_check(const ApproxReport<T>& rep, const GeneratorSystem<T>& sys, const SystemSpec& spec)
{
    json out;
    Word again = parse_word(format_word(rep.word));
    out["round_trip"] = again == rep.word;
    if (!rep.expanded || rep.word.syllables() > 4096) {
        // Expanded words with long derived runs lose tiny entries in floating
        // point; the compact form was already evaluated for the report.
        out["reevaluated"] = false;
    } else {
        try {
            auto ev = evaluate(again, sys);
            Real err = rep.kind == "lft" ? proj_distance(ev.projective, ProjectiveMap<T>::from(rep.target))
                                         : mat_distance(ev.matrix(), rep.target).rel;
            out["reevaluated"] = true;
            out["reevaluated_error"] = number(err);
        } catch (const Error& e) {
            out["reevaluated"] = false;
            out["reevaluation_error"] = std::string(e.name());
        }
    }
    out["rational_distance"] = nullptr;
    if constexpr (!is_complex_v<T>) {
        std::int64_t total = 0;
        for (const auto& l : again.letters())
            total += l.exponent;
        if (total <= 2048) {
            auto rsys = spec.build_real<Rational>();
            auto exact = evaluate(again, rsys);
            Mat2<Real> projected = exact.projective.rep().template cast<Real>();
            out["rational_distance"] =
                number(proj_distance(ProjectiveMap<Real>::from(projected), rep.achieved.projective));
        }
    }
    return out;
}

template <class T>
void write_convergence_csv(const std::string& path, const std::string& kind, const Mat2<T>& X,
                           const GeneratorSystem<T>& sys, SynthesisOptions o, std::int64_t max_depth)
{
    std::ofstream csv(path);
    if (!csv)
        throw UsageError("cannot write " + path);
    csv << "depth,error\n";
    for (std::int64_t d = 2; d <= std::min<std::int64_t>(max_depth, 1024); d *= 2) {
        o.fixed_depth = d;
        try {
            auto rep = run_one(kind, X, sys, o);
            csv << d << ',' << static_cast<double>(rep.error) << '\n';
        } catch (const Error&) {
            // A depth too shallow for some stage has no row.
        }
    }
}

template <class T>
json approximate_all(const ApproximateArgs& a, const SystemSpec& spec, const GeneratorSystem<T>& sys,
                     const std::vector<Mat2<T>>& targets)
{
    const SynthesisOptions o = options_of(a);
    auto work = [&](const Mat2<T>& X) {
        auto t0 = std::chrono::steady_clock::now();
        try {
            auto rep = run_one(a.kind, X, sys, o);
            if (a.timing)
                rep.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            json j = report_to_json(rep);
            if (a.exact_check)
                j["exact_check"] = exact_check(rep, sys, spec);
            return j;
        } catch (const Error& e) {
            return error_to_json(e);
        }
    };
    std::vector<json> results(targets.size());
    const std::size_t jobs = static_cast<std::size_t>(std::max(1, a.jobs));
    for (std::size_t start = 0; start < targets.size(); start += jobs) {
        std::vector<std::future<json>> batch;
        for (std::size_t i = start; i < std::min(targets.size(), start + jobs); ++i)
            batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, work,
                                       std::cref(targets[i])));
        for (std::size_t i = 0; i < batch.size(); ++i)
            results[start + i] = batch[i].get();
    }
    if (!a.csv.empty() && !targets.empty())
        write_convergence_csv(a.csv, a.kind, targets.front(), sys, o, a.max_depth);
    return json(results);
}

} // namespace detail

/// Builds and runs the command line. Returns the process exit code: 0 ok,
/// 1 domain error (JSON on `out` carries the error name), 2 usage.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Generator words for dense semigroups of Moebius maps and 2x2 matrices", "moebius"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "moebius 1.0");

    json result;
    int status = 0;
    std::function<void()> action;

    // approximate lft|matrix
    ApproximateArgs ap;
    auto* approx = app.add_subcommand("approximate", "Approximate a target by a generator word");
    approx->require_subcommand(1);
    for (const char* kind : {"lft", "matrix"}) {
        auto* sub = approx->add_subcommand(kind, std::string("Target taken as ") +
                                                     (std::string(kind) == "lft" ? "a projective map" : "a matrix"));
        sub->add_option("--system", ap.system, "Generator system")->required()->check(CLI::IsMember(system_names()));
        sub->add_option("--params", ap.params, "Parameters, e.g. a=1,b=2,c=3 (complex as 1+2i)");
        sub->add_option("--target", ap.target, "Target matrix JSON: file or inline; {\"targets\": [..]} for a batch")
            ->required();
        sub->add_option("--eps", ap.eps, "Requested accuracy")->required()->check(CLI::PositiveNumber);
        sub->add_option("--max-depth", ap.max_depth, "Cap on limit-stage depth")->envname("MOEBIUS_MAX_DEPTH");
        sub->add_option("--l-max", ap.l_max, "Bound on l in b^k c^-l searches")->envname("MOEBIUS_L_MAX");
        sub->add_option("--n-max", ap.n_max, "Bound on n in simultaneous searches")->envname("MOEBIUS_N_MAX");
        sub->add_option("--height", ap.height, "Independence certificate height at construction (0 skips)")
            ->envname("MOEBIUS_HEIGHT");
        sub->add_flag("--exact-check", ap.exact_check, "Re-parse and re-evaluate the word, exactly when feasible");
        sub->add_option("--csv", ap.csv, "Write depth,error rows for fixed depths 2, 4, .. max-depth");
        sub->add_option("--seed", ap.seed, "Seed for randomized searches")->envname("MOEBIUS_SEED");
        sub->add_option("--jobs", ap.jobs, "Parallel targets in a batch")->check(CLI::PositiveNumber);
        sub->add_flag("--timing", ap.timing, "Include elapsed_seconds (output is then not reproducible)");
        sub->callback([&, kind] {
            ap.kind = kind;
            action = [&] {
                SystemSpec spec{ap.system, parse_params(ap.params), ap.height};
                json t = read_json(ap.target);
                bool batch = t.is_object() && t.contains("targets");
                std::vector<AnyMatrix> targets;
                if (batch)
                    for (const auto& e : t.at("targets"))
                        targets.push_back(matrix_from_json(e));
                else
                    targets.push_back(matrix_from_json(t));
                json reports;
                if (spec.complex()) {
                    auto sys = spec.build_complex();
                    std::vector<Mat2<Complex>> xs;
                    for (const auto& m : targets)
                        xs.push_back(detail::promote(m));
                    reports = detail::approximate_all(ap, spec, sys, xs);
                } else {
                    auto sys = spec.build_real<Real>();
                    std::vector<Mat2<Real>> xs;
                    for (const auto& m : targets)
                        xs.push_back(detail::require_real(m));
                    reports = detail::approximate_all(ap, spec, sys, xs);
                }
                for (const auto& r : reports)
                    if (r.contains("error") && r["error"].is_string())
                        status = 1;
                result = batch ? json{{"reports", reports}} : reports.at(0);
            };
        });
    }

    // membership
    std::string map_arg, member_system = "LFT2";
    Real member_a = 1, member_b = 2;
    auto* member = app.add_subcommand("membership", "Closure membership of a map over LFT2");
    member->add_option("--system", member_system, "Only LFT2 is characterized")->check(CLI::IsMember({"LFT2"}));
    member->add_option("--map", map_arg, "Map as matrix JSON: file or inline")->required();
    member->add_option("-a", member_a, "R(x) = 1 + a/x");
    member->add_option("-b", member_b, "S(x) = x/b")->required();
    member->callback([&] {
        action = [&] {
            auto X = detail::require_real(matrix_from_json(read_json(map_arg)));
            auto f = ProjectiveMap<Real>::from(X);
            auto v = in_U(f, member_b);
            result = verdict_to_json(v);
            auto [alpha, beta, gamma] = f_plus_coefficients(f);
            result["coefficients"] = {number(alpha), number(beta), number(gamma)};
            result["det"] = number(alpha - beta * gamma);
        };
    });

    // orbit closure|sample|region
    auto* orbit = app.add_subcommand("orbit", "Orbits of the induced action on pairs");
    orbit->require_subcommand(1);
    std::string base = "1,1", point, start = "0,1", csv_path;
    Real orbit_a = 1, orbit_b = 2, extent = 0;
    OrbitSampleOptions so;
    int region_n = 64;
    auto* closure = orbit->add_subcommand("closure", "Is a point in the orbit closure of a base point");
    closure->add_option("--base", base, "x,y")->required();
    closure->add_option("--point", point, "u,v")->required();
    closure->add_option("-a", orbit_a, "R(x) = 1 + a/x");
    closure->add_option("-b", orbit_b, "S(x) = x/b");
    closure->callback([&] {
        action = [&] {
            auto [x, y] = parse_pair(base);
            auto [u, v] = parse_pair(point);
            OrbitRegionQuery q{x, y, orbit_a, orbit_b};
            result = verdict_to_json(orbit_closure_contains(u, v, q));
            result["in_omega"] = omega_contains(u, v, q);
        };
    });
    auto* sample = orbit->add_subcommand("sample", "Grid coverage of a breadth-first orbit in [0,1]^2");
    sample->add_option("--depth", so.depth, "Number of syllables")->envname("MOEBIUS_ORBIT_DEPTH");
    sample->add_option("--grid", so.grid_n, "Grid cells per side");
    sample->add_option("-a", so.a, "R(x) = 1 + a/x");
    sample->add_option("-b", so.b, "S(x) = x/b");
    sample->add_option("--start", start, "Starting point x,y");
    sample->add_option("--max-exponent", so.max_exponent, "Largest power per syllable");
    sample->add_option("--dedup", so.dedup_factor, "Dedup lattice spacing is 1/(dedup grid)");
    sample->add_option("--csv", csv_path, "Write i,j,cx,cy,distance per cell");
    sample->callback([&] {
        action = [&] {
            std::tie(so.start_x, so.start_y) = parse_pair(start);
            auto cov = dense_orbit_sample(so);
            result = coverage_to_json(cov);
            if (!csv_path.empty()) {
                std::ofstream csv(csv_path);
                if (!csv)
                    throw UsageError("cannot write " + csv_path);
                csv << "i,j,cx,cy,distance\n";
                for (int i = 0; i < cov.grid_n; ++i)
                    for (int j = 0; j < cov.grid_n; ++j)
                        csv << i << ',' << j << ',' << (i + 0.5) / cov.grid_n << ',' << (j + 0.5) / cov.grid_n << ','
                            << static_cast<double>(cov.cell_distance[static_cast<std::size_t>(i) * cov.grid_n + j])
                            << '\n';
            }
        };
    });
    auto* region = orbit->add_subcommand("region", "Boundary curves of the region Omega(x, y)");
    region->add_option("--base", base, "x,y")->required();
    region->add_option("-a", orbit_a, "R(x) = 1 + a/x");
    region->add_option("-n", region_n, "Points per curve");
    region->add_option("--extent", extent, "Length of the half-line (default from the base point)");
    region->add_option("--csv", csv_path, "Write curve,u,v rows");
    region->callback([&] {
        action = [&] {
            auto [x, y] = parse_pair(base);
            auto curves = omega_boundary(OrbitRegionQuery{x, y, orbit_a, 2}, region_n, extent);
            result = {{"curves", polylines_to_json(curves)}};
            if (!csv_path.empty()) {
                std::ofstream csv(csv_path);
                if (!csv)
                    throw UsageError("cannot write " + csv_path);
                csv << "curve,u,v\n";
                for (const auto& c : curves)
                    for (const auto& [u, v] : c.points)
                        csv << c.name << ',' << static_cast<double>(u) << ',' << static_cast<double>(v) << '\n';
            }
        };
    });

    // expand
    std::string value;
    Real exp_base = 2, exp_r = 0, exp_eps = 1e-9L;
    int max_terms = 4096;
    auto* expand = app.add_subcommand("expand", "Greedy expansion in a real base b or the imaginary base r i");
    expand->add_option("--value", value, "Real value, or complex as 1+2i")->required();
    expand->add_option("-b,--base", exp_base, "Real base b > 1");
    expand->add_option("--r", exp_r, "Expand in base r i instead");
    expand->add_option("--eps", exp_eps, "Residual bound")->check(CLI::PositiveNumber);
    expand->add_option("--max-terms", max_terms, "Term budget")->envname("MOEBIUS_MAX_TERMS");
    expand->callback([&] {
        action = [&] {
            Complex t = parse_complex(value);
            if (exp_r > 0 || t.imag() != 0) {
                if (!(exp_r > 1))
                    throw UsageError("complex values need --r > 1");
                auto e = greedy_expand_complex(t, Complex(0, exp_r), exp_eps, max_terms);
                result = expansion_to_json(e);
            } else {
                result = expansion_to_json(greedy_expand_real(t.real(), exp_base, exp_eps, max_terms));
            }
        };
    });

    // kronecker ratio|simul|independence
    auto* kron = app.add_subcommand("kronecker", "Diophantine approximation helpers");
    kron->require_subcommand(1);
    Real k_target = 0, k_b = 0, k_c = 0, k_tol = 0;
    std::int64_t k_lmax = 10000000, k_nmax = 10000000, k_height = 100;
    std::int64_t k_mmin = std::numeric_limits<std::int64_t>::min();
    Real th1 = 0, ph1 = 0, ph2 = 0, k_eps = 0;
    std::optional<Real> th2;
    auto* ratio = kron->add_subcommand("ratio", "b^k c^-l close to a target");
    ratio->add_option("--target", k_target, "Positive target")->required();
    ratio->add_option("-b", k_b, "b > 1")->required();
    ratio->add_option("-c", k_c, "c > 0, c != 1")->required();
    ratio->add_option("--tol", k_tol, "Relative tolerance")->required()->check(CLI::PositiveNumber);
    ratio->add_option("--l-max", k_lmax, "Largest l scanned")->envname("MOEBIUS_L_MAX");
    ratio->callback([&] {
        action = [&] { result = ratio_to_json(solve_ratio(k_target, k_b, k_c, k_tol, RatioBounds{1, k_lmax})); };
    });
    auto* simul = kron->add_subcommand("simul", "n with n theta_i - phi_i near integers");
    simul->add_option("--theta1", th1)->required();
    simul->add_option("--theta2", th2)->required();
    simul->add_option("--phi1", ph1)->required();
    simul->add_option("--phi2", ph2)->required();
    simul->add_option("--eps", k_eps)->required()->check(CLI::PositiveNumber);
    simul->add_option("--n-max", k_nmax, "Largest n scanned")->envname("MOEBIUS_N_MAX");
    simul->add_option("--m-min", k_mmin, "Smallest acceptable m = -round(n theta2 - phi2)");
    simul->callback([&] {
        action = [&] {
            result = simultaneous_to_json(solve_simultaneous(th1, *th2, ph1, ph2, k_eps, SimultaneousBounds{1, k_nmax, k_mmin}));
        };
    });
    auto* indep = kron->add_subcommand("independence", "Integer relations A + B theta1 + C theta2 up to a height");
    indep->add_option("--theta1", th1)->required();
    indep->add_option("--theta2", th2, "Omit for the one-number check");
    indep->add_option("--height", k_height, "Coefficient bound")->envname("MOEBIUS_HEIGHT");
    indep->callback([&] {
        action = [&] {
            result = certificate_to_json(th2 ? independence_certificate(th1, *th2, k_height)
                                             : independence_certificate(th1, k_height));
        };
    });

    // verify-identities
    bool exact_mode = false;
    std::string exr_a = "1/2";
    IdentityOptions io;
    auto* verify = app.add_subcommand("verify-identities", "Exact algebraic identities and the EXC2 parameter checks");
    verify->add_flag("--exact", exact_mode, "Exact rational mode (the algebraic checks always are)");
    verify->add_option("--exr-a", exr_a, "a of the two-generator real system, e.g. 1/2 or 0.6");
    verify->add_option("--seed", io.seed, "Seed for the random rational samples")->envname("MOEBIUS_SEED");
    verify->add_option("--samples", io.samples, "Random samples per identity");
    verify->callback([&] {
        action = [&] {
            io.exr_a = parse_rational(exr_a);
            auto checks = verify_identities(io);
            result = identities_to_json(checks);
            result["mode"] = "exact";
            if (!result["passed"].get<bool>()) {
                json failed = json::array();
                for (const auto& c : checks)
                    if (!c.passed)
                        failed.push_back(c.name);
                result["error"] = std::string(error_name(Errc::IdentityFailure));
                result["failed"] = failed;
                status = 1;
            }
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        if (code == 0)
            return 0;
        const CLI::App* failed = &app;
        while (!failed->get_subcommands().empty())
            failed = failed->get_subcommands().front();
        err << failed->help();
        return 2;
    }
    try {
        action();
    } catch (const Error& e) {
        out << error_to_json(e).dump(2) << '\n';
        return 1;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return 2;
    } catch (const json::exception& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }
    out << result.dump(2) << '\n';
    return status;
}

} // namespace moebius::cli
