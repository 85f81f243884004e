#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace moebius {

enum class Errc {
    SingularMatrix,
    SingularProduct,
    UnknownSymbol,
    SyntaxError,
    BudgetExceeded,
    DomainError,
    NotFound,
    NegativeDet,
    FactorizationFailed,
    BranchInconsistency,
    IndependenceSuspect,
    NotInDomain,
    IdentityFailure,
};

constexpr std::string_view error_name(Errc code) noexcept
{
    switch (code) {
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::SingularProduct: return "SingularProduct";
    case Errc::UnknownSymbol: return "UnknownSymbol";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::DomainError: return "DomainError";
    case Errc::NotFound: return "NotFound";
    case Errc::NegativeDet: return "NegativeDet";
    case Errc::FactorizationFailed: return "FactorizationFailed";
    case Errc::BranchInconsistency: return "BranchInconsistency";
    case Errc::IndependenceSuspect: return "IndependenceSuspect";
    case Errc::NotInDomain: return "NotInDomain";
    case Errc::IdentityFailure: return "IdentityFailure";
    }
    return "Unknown";
}

/// Every failure raised by the library. `code()` names the failure class;
/// the message carries the details.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code)
    {
    }

    Errc code() const noexcept { return code_; }
    std::string_view name() const noexcept { return error_name(code_); }

private:
    Errc code_;
};

/// Parse failure in the word grammar; `position` is the 0-based column.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t position, const std::string& what)
        : Error(Errc::SyntaxError, what + " at position " + std::to_string(position)),
          position_(position)
    {
    }

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

} // namespace moebius
