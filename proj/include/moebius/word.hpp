#pragma once

#include "moebius/error.hpp"

#include <cctype>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace moebius {

struct Letter {
    std::string symbol;
    std::int64_t exponent = 1;

    friend bool operator==(const Letter&, const Letter&) = default;
};

/// A word in run-length canonical form: exponents are >= 1 and adjacent
/// letters carry distinct symbols. The empty word is the identity. A word
/// [f, g] denotes f o g, i.e. the matrix product M_f M_g.
class Word {
public:
    Word() = default;

    Word(std::initializer_list<Letter> letters)
    {
        for (const auto& l : letters)
            push_back(l);
    }

    static Word single(std::string symbol, std::int64_t exponent = 1)
    {
        Word w;
        w.push_back({std::move(symbol), exponent});
        return w;
    }

    /// Appends, merging with the last letter when the symbols agree.
    /// Exponent 0 is a no-op.
    void push_back(const Letter& letter)
    {
        if (letter.exponent < 0)
            throw Error(Errc::DomainError, "negative exponent for " + letter.symbol);
        if (letter.exponent == 0)
            return;
        if (!letters_.empty() && letters_.back().symbol == letter.symbol)
            letters_.back().exponent += letter.exponent;
        else
            letters_.push_back(letter);
    }

    void append(const Word& w)
    {
        for (const auto& l : w.letters_)
            push_back(l);
    }

    friend Word operator*(Word x, const Word& y)
    {
        x.append(y);
        return x;
    }

    Word pow(std::int64_t n) const
    {
        if (n < 0)
            throw Error(Errc::DomainError, "negative word power");
        Word out;
        for (std::int64_t i = 0; i < n; ++i)
            out.append(*this);
        return out;
    }

    std::span<const Letter> letters() const noexcept { return letters_; }
    bool empty() const noexcept { return letters_.empty(); }
    /// Number of run-length syllables.
    std::size_t syllables() const noexcept { return letters_.size(); }

    /// Total letter count (sum of exponents), saturating.
    std::int64_t length() const noexcept
    {
        std::int64_t n = 0;
        for (const auto& l : letters_) {
            if (n > std::numeric_limits<std::int64_t>::max() - l.exponent)
                return std::numeric_limits<std::int64_t>::max();
            n += l.exponent;
        }
        return n;
    }

    friend bool operator==(const Word&, const Word&) = default;

private:
    std::vector<Letter> letters_;
};

/// "SYM SYM^k ..." with single spaces; the empty word formats as "".
inline std::string format_word(const Word& w)
{
    std::string out;
    for (const auto& l : w.letters()) {
        if (!out.empty())
            out += ' ';
        out += l.symbol;
        if (l.exponent != 1) {
            out += '^';
            out += std::to_string(l.exponent);
        }
    }
    return out;
}

/// Parses whitespace-separated tokens `SYM` or `SYM^k` with k >= 1.
/// Symbols start with a letter or '_' and continue with letters, digits or '_'.
inline Word parse_word(std::string_view s)
{
    Word w;
    std::size_t i = 0;
    auto is_sym_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
    auto is_sym_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    while (i < s.size()) {
        if (std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
            continue;
        }
        if (!is_sym_start(s[i]))
            throw SyntaxError(i, std::string("unexpected character '") + s[i] + "'");
        std::size_t start = i;
        while (i < s.size() && is_sym_char(s[i]))
            ++i;
        std::string symbol(s.substr(start, i - start));
        std::int64_t exponent = 1;
        if (i < s.size() && s[i] == '^') {
            ++i;
            std::size_t digits = i;
            std::int64_t value = 0;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
                int d = s[i] - '0';
                if (value > (std::numeric_limits<std::int64_t>::max() - d) / 10)
                    throw SyntaxError(digits, "exponent overflow");
                value = value * 10 + d;
                ++i;
            }
            if (i == digits)
                throw SyntaxError(digits, "missing exponent");
            if (value < 1)
                throw SyntaxError(digits, "exponent must be >= 1");
            exponent = value;
        }
        if (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])))
            throw SyntaxError(i, std::string("unexpected character '") + s[i] + "'");
        w.push_back({std::move(symbol), exponent});
    }
    return w;
}

using SubstitutionTable = std::map<std::string, Word, std::less<>>;

/// Homomorphic replacement: every letter SYM^k with SYM in the table becomes
/// table[SYM]^k; other letters pass through. Result is re-canonicalized.
inline Word substitute(const Word& w, const SubstitutionTable& table)
{
    Word out;
    for (const auto& l : w.letters()) {
        auto it = table.find(l.symbol);
        if (it == table.end()) {
            out.push_back(l);
            continue;
        }
        if (it->second.empty())
            throw Error(Errc::DomainError, "empty substitution for " + l.symbol);
        if (it->second.syllables() == 1) {
            const Letter& only = it->second.letters()[0];
            out.push_back({only.symbol, only.exponent * l.exponent});
        } else {
            for (std::int64_t k = 0; k < l.exponent; ++k)
                out.append(it->second);
        }
    }
    return out;
}

/// Streams every letter sequence of length 1..max_len over `symbols` exactly
/// once, shortest first and lexicographic (by symbol index) within a length.
/// Each sequence is returned in run-length form.
class WordEnumerator {
public:
    static constexpr int max_len_guard = 24;

    WordEnumerator(std::vector<std::string> symbols, int max_len,
                   std::uint64_t cap = std::uint64_t(1) << 26)
        : symbols_(std::move(symbols)), max_len_(max_len)
    {
        if (symbols_.empty())
            throw Error(Errc::DomainError, "no symbols to enumerate");
        if (max_len < 0 || max_len > max_len_guard)
            throw Error(Errc::DomainError, "max_len must lie in [0, 24]");
        total_ = 0;
        std::uint64_t layer = 1;
        for (int len = 1; len <= max_len; ++len) {
            if (layer > cap / symbols_.size())
                throw Error(Errc::BudgetExceeded, "enumeration exceeds cap");
            layer *= symbols_.size();
            total_ += layer;
            if (total_ > cap)
                throw Error(Errc::BudgetExceeded, "enumeration exceeds cap");
        }
    }

    /// Number of words the stream will yield.
    std::uint64_t count() const noexcept { return total_; }

    std::optional<Word> next()
    {
        if (!advance())
            return std::nullopt;
        Word w;
        for (std::size_t idx : digits_)
            w.push_back({symbols_[idx], 1});
        return w;
    }

    /// Current letter sequence as symbol indices (valid after next()).
    std::span<const std::size_t> indices() const noexcept { return digits_; }

private:
    bool advance()
    {
        if (digits_.empty()) {
            if (max_len_ < 1)
                return false;
            digits_.assign(1, 0);
            return true;
        }
        for (std::size_t pos = digits_.size(); pos-- > 0;) {
            if (++digits_[pos] < symbols_.size())
                return true;
            digits_[pos] = 0;
        }
        if (static_cast<int>(digits_.size()) >= max_len_)
            return false;
        digits_.assign(digits_.size() + 1, 0);
        return true;
    }

    std::vector<std::string> symbols_;
    int max_len_;
    std::uint64_t total_ = 0;
    std::vector<std::size_t> digits_;
};

} // namespace moebius
