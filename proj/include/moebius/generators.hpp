#pragma once

#include "moebius/diophantine.hpp"
#include "moebius/projective.hpp"
#include "moebius/wide_float.hpp"
#include "moebius/word.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace moebius {

template <class T>
struct Generator {
    std::string symbol;
    Mat2<T> matrix;
    /// Nonempty for derived symbols: the word over earlier symbols that
    /// defines this one. `matrix` is then that word's product.
    Word definition;

    bool derived() const noexcept { return !definition.empty(); }
};

/// Named generators bound to matrices, plus the scalar parameters that
/// define them. Symbols keep their insertion order.
template <class T>
class GeneratorSystem {
public:
    using Params = std::map<std::string, T, std::less<>>;

    GeneratorSystem(std::string name, Params params) : name_(std::move(name)), params_(std::move(params)) {}

    const std::string& name() const noexcept { return name_; }
    Field field() const noexcept { return scalar_traits<T>::field; }
    const Params& params() const noexcept { return params_; }

    const T& param(std::string_view key) const
    {
        auto it = params_.find(key);
        if (it == params_.end())
            throw Error(Errc::DomainError, name_ + " has no parameter " + std::string(key));
        return it->second;
    }

    void add(std::string symbol, const Mat2<T>& m)
    {
        if (contains(symbol))
            throw Error(Errc::DomainError, "duplicate symbol " + symbol);
        if (!m.all_finite() || numerically_singular(m))
            throw Error(Errc::SingularMatrix, "generator " + symbol + " is not invertible");
        gens_.push_back({std::move(symbol), m, {}});
    }

    /// A symbol standing for a word over symbols already present.
    /// Registers symbol as an abbreviation of definition. A closed form, when
    /// given, must agree with the product to relative tol (exactly for
    /// exact types) and is stored in place of the rounded product.
    void add_derived(std::string symbol, const Word& definition, const std::optional<Mat2<T>>& closed_form = {},
                     Real tol = 1e-10L);

    bool contains(std::string_view symbol) const
    {
        for (const auto& g : gens_)
            if (g.symbol == symbol)
                return true;
        return false;
    }

    const Generator<T>& at(std::string_view symbol) const
    {
        for (const auto& g : gens_)
            if (g.symbol == symbol)
                return g;
        throw Error(Errc::UnknownSymbol, "'" + std::string(symbol) + "' is not a symbol of " + name_);
    }

    const std::vector<Generator<T>>& generators() const noexcept { return gens_; }

    std::vector<std::string> primitive_symbols() const
    {
        std::vector<std::string> out;
        for (const auto& g : gens_)
            if (!g.derived())
                out.push_back(g.symbol);
        return out;
    }

    /// Table rewriting each derived symbol into primitives.
    SubstitutionTable expansion_table() const
    {
        SubstitutionTable t;
        for (const auto& g : gens_)
            if (g.derived())
                t[g.symbol] = substitute(g.definition, t);
        return t;
    }

private:
    std::string name_;
    Params params_;
    std::vector<Generator<T>> gens_;
};

/// Raw product of the word's matrices in T, without renormalization.
template <class T>
Mat2<T> multiply_out(const Word& w, const GeneratorSystem<T>& sys)
{
    Mat2<T> out = Mat2<T>::identity();
    for (const auto& letter : w.letters()) {
        Mat2<T> base = sys.at(letter.symbol).matrix;
        Mat2<T> acc = Mat2<T>::identity();
        for (std::int64_t e = letter.exponent; e > 0; e >>= 1) {
            if (e & 1)
                acc = acc * base;
            if (e > 1)
                base = base * base;
        }
        out = out * acc;
    }
    return out;
}

template <class T>
void GeneratorSystem<T>::add_derived(std::string symbol, const Word& definition,
                                     const std::optional<Mat2<T>>& closed_form, Real tol)
{
    if (definition.empty())
        throw Error(Errc::DomainError, "derived symbol " + symbol + " needs a nonempty definition");
    if (contains(symbol))
        throw Error(Errc::DomainError, "duplicate symbol " + symbol);
    Mat2<T> m = multiply_out(definition, *this);
    if (numerically_singular(m))
        throw Error(Errc::SingularMatrix, "derived symbol " + symbol + " is not invertible");
    if (closed_form) {
        bool agrees = is_exact_v<T> ? m == *closed_form : mat_distance(m, *closed_form).rel <= tol;
        if (!agrees)
            throw Error(Errc::IdentityFailure, "derived symbol " + symbol + " differs from its closed form");
        m = *closed_form;
    }
    gens_.push_back({std::move(symbol), m, definition});
}

/// Checks that all symbols exist, then applies the table.
template <class T>
Word substitute(const Word& w, const SubstitutionTable& table, const GeneratorSystem<T>& sys)
{
    for (const auto& [sym, image] : table)
        for (const auto& l : image.letters())
            (void)sys.at(l.symbol);
    Word out = substitute(w, table);
    for (const auto& l : out.letters())
        (void)sys.at(l.symbol);
    return out;
}

/// Product of a word as (phase * exp(log_scale)) * projective.rep().
template <class T>
struct EvaluatedWord {
    ProjectiveMap<T> projective;
    Real log_scale = 0;
    /// Sign (real) or unit phase (complex). Exact types store the whole
    /// signed pivot here and log_scale is informational.
    T phase{1};

    /// The raw product. Only meaningful when exp(log_scale) is representable.
    Mat2<T> matrix() const
    {
        if constexpr (is_exact_v<T>)
            return phase * projective.rep();
        else
            return (phase * T(std::exp(log_scale))) * projective.rep();
    }

    friend bool operator==(const EvaluatedWord& x, const EvaluatedWord& y)
    {
        return x.projective == y.projective && x.log_scale == y.log_scale && x.phase == y.phase;
    }
};

namespace detail {

template <class T>
using WideMat = Mat2<WideFloat<T>>;

template <class T>
WideMat<T> widen(const Mat2<T>& m)
{
    return {WideFloat<T>(m.m11), WideFloat<T>(m.m12), WideFloat<T>(m.m21), WideFloat<T>(m.m22)};
}

/// Rescales by a power of two so the largest entry exponent is 0; returns
/// the shift taken out.
template <class T>
std::int64_t renormalize(WideMat<T>& m)
{
    std::int64_t top = std::numeric_limits<std::int64_t>::min();
    for (const auto& e : {m.m11, m.m12, m.m21, m.m22})
        top = std::max(top, e.magnitude_exponent());
    if (top == std::numeric_limits<std::int64_t>::min())
        throw Error(Errc::SingularProduct, "product vanished");
    m = {m.m11.shifted(top), m.m12.shifted(top), m.m21.shifted(top), m.m22.shifted(top)};
    return top;
}

template <class T>
std::size_t pivot_index(const Mat2<T>& m)
{
    auto e = m.entries();
    std::size_t pivot = 0;
    for (std::size_t i = 1; i < 4; ++i)
        if (modulus(e[i]) > modulus(e[pivot]))
            pivot = i;
    return pivot;
}

template <class T>
EvaluatedWord<T> finish(const Mat2<T>& m, Real extra_log)
{
    if (!m.all_finite() || numerically_singular(m, tau_round))
        throw Error(Errc::SingularProduct, "word product is numerically singular");
    T p = m.entries()[pivot_index(m)];
    EvaluatedWord<T> out;
    out.projective = ProjectiveMap<T>::from(m, tau_round);
    if constexpr (is_exact_v<T>) {
        // Exact products keep the whole pivot, so matrix() is exact.
        out.phase = p;
        out.log_scale = std::log(std::abs(to_real(p)));
    } else {
        out.phase = unit_of(p);
        out.log_scale = extra_log + std::log(std::abs(p));
    }
    return out;
}

} // namespace detail

/// Evaluates a word, leftmost letter applied last. Floating types run the
/// product with a 64-bit binary exponent and renormalize after every
/// multiplication, so products like S^5000 neither overflow nor underflow.
template <class T>
EvaluatedWord<T> evaluate(const Word& w, const GeneratorSystem<T>& sys)
{
    if constexpr (is_exact_v<T>) {
        return detail::finish(multiply_out(w, sys), 0);
    } else {
        using detail::renormalize;
        detail::WideMat<T> out = detail::widen(Mat2<T>::identity());
        std::int64_t shift = 0;
        for (const auto& letter : w.letters()) {
            detail::WideMat<T> base = detail::widen(sys.at(letter.symbol).matrix);
            std::int64_t base_shift = renormalize(base);
            for (std::int64_t e = letter.exponent; e > 0; e >>= 1) {
                if (e & 1) {
                    out = out * base;
                    shift += base_shift + renormalize(out);
                }
                if (e > 1) {
                    base = base * base;
                    base_shift = 2 * base_shift + renormalize(base);
                }
            }
        }
        Mat2<T> m{out.m11.value(), out.m12.value(), out.m21.value(), out.m22.value()};
        return detail::finish(m, static_cast<Real>(shift) * std::log(Real(2)));
    }
}

} // namespace moebius
