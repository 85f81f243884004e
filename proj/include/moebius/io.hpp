#pragma once

#include "moebius/closure.hpp"
#include "moebius/identities.hpp"
#include "moebius/orbit.hpp"
#include "moebius/synthesis.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <string>
#include <variant>

namespace moebius {

using json = nlohmann::json;

/// JSON numbers are doubles; non-finite values become null.
inline json number(Real x)
{
    double d = static_cast<double>(x);
    return std::isfinite(d) ? json(d) : json(nullptr);
}

inline json number(const Complex& z)
{
    return json::array({number(z.real()), number(z.imag())});
}

inline json number(const Rational& q)
{
    return q.str();
}

template <class T>
json matrix_to_json(const Mat2<T>& m)
{
    return {{"field", is_complex_v<T> ? "complex" : "real"},
            {"m", json::array({json::array({number(m.m11), number(m.m12)}),
                               json::array({number(m.m21), number(m.m22)})})}};
}

using AnyMatrix = std::variant<Mat2<Real>, Mat2<Complex>>;

namespace detail {

inline Complex complex_entry(const json& e)
{
    if (e.is_number())
        return {e.get<Real>(), 0};
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
        return {e[0].get<Real>(), e[1].get<Real>()};
    throw Error(Errc::DomainError, "matrix entry must be a number or [re, im]");
}

} // namespace detail

/// Reads {"field": .., "m": [[..],[..]]} or a bare [[..],[..]]. Without a
/// field, any [re, im] entry makes the matrix complex.
inline AnyMatrix matrix_from_json(const json& j)
{
    const json& m = j.is_object() ? j.at("m") : j;
    if (!m.is_array() || m.size() != 2 || !m[0].is_array() || !m[1].is_array() || m[0].size() != 2 ||
        m[1].size() != 2)
        throw Error(Errc::DomainError, "matrix must be [[m11, m12], [m21, m22]]");
    bool complex = false;
    if (j.is_object() && j.contains("field")) {
        auto f = j.at("field").get<std::string>();
        if (f != "real" && f != "complex")
            throw Error(Errc::DomainError, "field must be real or complex");
        complex = f == "complex";
    } else {
        for (const auto& row : m)
            for (const auto& e : row)
                complex = complex || e.is_array();
    }
    Mat2<Complex> z{detail::complex_entry(m[0][0]), detail::complex_entry(m[0][1]), detail::complex_entry(m[1][0]),
                    detail::complex_entry(m[1][1])};
    if (complex)
        return z;
    for (const Complex& e : {z.m11, z.m12, z.m21, z.m22})
        if (e.imag() != 0)
            throw Error(Errc::DomainError, "real matrix has a complex entry");
    return Mat2<Real>{z.m11.real(), z.m12.real(), z.m21.real(), z.m22.real()};
}

template <class T>
json system_to_json(const GeneratorSystem<T>& sys)
{
    json params = json::object();
    for (const auto& [k, v] : sys.params())
        params[k] = number(v);
    json symbols = json::array();
    for (const auto& g : sys.generators()) {
        json s{{"sym", g.symbol}, {"m", matrix_to_json(g.matrix)}};
        if (g.derived())
            s["definition"] = format_word(g.definition);
        symbols.push_back(std::move(s));
    }
    return {{"name", sys.name()}, {"field", is_complex_v<T> ? "complex" : "real"}, {"params", params},
            {"symbols", symbols}};
}

template <class T>
json evaluated_to_json(const EvaluatedWord<T>& e)
{
    return {{"projective", matrix_to_json(e.projective.rep())}, {"log_scale", number(e.log_scale)},
            {"phase", number(e.phase)}};
}

template <class T>
json report_to_json(const ApproxReport<T>& r)
{
    json depths = json::object();
    for (const auto& [k, v] : r.depths)
        depths[k] = v;
    json j{{"system", r.system},
           {"kind", r.kind},
           {"word", format_word(r.word)},
           {"syllables", r.word.syllables()},
           {"expanded", r.expanded},
           {"target", matrix_to_json(r.target)},
           {"achieved", evaluated_to_json(r.achieved)},
           {"error", number(r.error)},
           {"eps", number(r.eps)},
           {"within_eps", r.error <= r.eps},
           {"projected", r.projected},
           {"depths", depths}};
    if (r.elapsed_seconds)
        j["elapsed_seconds"] = *r.elapsed_seconds;
    return j;
}

template <class T>
json expansion_to_json(const Expansion<T>& e)
{
    return {{"exponents", e.exponents}, {"residual", number(e.residual)}};
}

inline json verdict_to_json(const ClosureVerdict& v)
{
    json j{{"in_U", v.in_closure}, {"margin", number(v.margin)}, {"lo", number(v.lo)}, {"hi", number(v.hi)}};
    j["k"] = v.witness_k ? json(*v.witness_k) : json(nullptr);
    return j;
}

inline json verdict_to_json(const OrbitClosureVerdict& v)
{
    json j{{"contained", v.contained}, {"k_lo", v.k_lo}, {"k_hi", v.k_hi}, {"fallback", v.fallback}};
    j["k"] = v.witness_k ? json(*v.witness_k) : json(nullptr);
    return j;
}

inline json coverage_to_json(const OrbitCoverage& c)
{
    json by_depth = json::array();
    for (Real v : c.coverage_by_depth)
        by_depth.push_back(number(v));
    return {{"coverage", number(c.coverage)}, {"grid_n", c.grid_n}, {"depth", c.depth}, {"points", c.points},
            {"coverage_by_depth", by_depth}};
}

inline json polylines_to_json(const std::vector<Polyline>& curves)
{
    json out = json::array();
    for (const auto& c : curves) {
        json pts = json::array();
        for (const auto& [u, v] : c.points)
            pts.push_back(json::array({number(u), number(v)}));
        out.push_back({{"name", c.name}, {"points", pts}});
    }
    return out;
}

inline json ratio_to_json(const RatioSolution& s)
{
    return {{"k", s.k}, {"l", s.l}, {"achieved", number(s.achieved)}, {"rel_err", number(s.rel_err)}};
}

inline json simultaneous_to_json(const SimultaneousSolution& s)
{
    return {{"n", s.n}, {"m", s.m}, {"L", s.L}, {"err1", number(s.err1)}, {"err2", number(s.err2)}};
}

inline json certificate_to_json(const IndependenceCertificate& c)
{
    json j{{"theta1", number(c.theta1)},
           {"theta2", number(c.theta2)},
           {"height", c.height},
           {"verdict", c.verdict()},
           {"closest", number(c.closest)}};
    if (c.relation_found)
        j["relation"] = {{"A", c.A}, {"B", c.B}, {"C", c.C}};
    return j;
}

inline json identities_to_json(const std::vector<IdentityCheck>& checks)
{
    json arr = json::array();
    bool all = true;
    for (const auto& c : checks) {
        json e{{"name", c.name}, {"passed", c.passed}, {"value", number(c.value)}};
        if (!c.detail.empty())
            e["detail"] = c.detail;
        arr.push_back(std::move(e));
        all = all && c.passed;
    }
    return {{"checks", arr}, {"passed", all}};
}

inline json error_to_json(const Error& e)
{
    return {{"error", std::string(e.name())}, {"message", e.what()}};
}

} // namespace moebius
