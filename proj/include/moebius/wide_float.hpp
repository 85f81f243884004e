#pragma once

#include "moebius/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace moebius {

/// A real or complex value stored as mantissa * 2^exponent with a 64-bit
/// exponent. Long words such as C^n A B^k pass through matrices whose entries
/// span far more than the native exponent range while the final product is
/// moderate; this type carries such intermediates without underflow.
template <class T>
class WideFloat {
public:
    WideFloat() = default;
    explicit WideFloat(const T& value) : mant_(value), exp_(0) { normalize(); }
    WideFloat(const T& mant, std::int64_t exp) : mant_(mant), exp_(exp) { normalize(); }

    const T& mantissa() const noexcept { return mant_; }
    std::int64_t exponent() const noexcept { return exp_; }
    bool is_zero() const noexcept { return mant_ == T(0); }

    /// Value as T after dividing by 2^shift. Tiny results flush to zero.
    T scaled_down(std::int64_t shift) const
    {
        if (is_zero())
            return T(0);
        std::int64_t e = exp_ - shift;
        if (e < std::numeric_limits<Real>::min_exponent - 80)
            return T(0);
        if (e > std::numeric_limits<Real>::max_exponent)
            return mant_ * std::numeric_limits<Real>::infinity();
        return ldexp_value(mant_, static_cast<int>(e));
    }

    T value() const { return scaled_down(0); }

    /// log |x|; -inf for zero.
    Real log_modulus() const
    {
        if (is_zero())
            return -std::numeric_limits<Real>::infinity();
        return std::log(std::abs(mant_)) + static_cast<Real>(exp_) * std::log(Real(2));
    }

    /// Binary exponent of the largest component, comparable across values.
    std::int64_t magnitude_exponent() const noexcept
    {
        return is_zero() ? std::numeric_limits<std::int64_t>::min() : exp_;
    }

    friend WideFloat operator*(const WideFloat& x, const WideFloat& y)
    {
        if (x.is_zero() || y.is_zero())
            return {};
        return WideFloat(x.mant_ * y.mant_, x.exp_ + y.exp_);
    }

    friend WideFloat operator+(const WideFloat& x, const WideFloat& y)
    {
        if (x.is_zero())
            return y;
        if (y.is_zero())
            return x;
        const WideFloat& big = x.exp_ >= y.exp_ ? x : y;
        const WideFloat& small = x.exp_ >= y.exp_ ? y : x;
        std::int64_t gap = big.exp_ - small.exp_;
        if (gap > std::numeric_limits<Real>::digits + 4)
            return big;
        return WideFloat(big.mant_ + ldexp_value(small.mant_, static_cast<int>(-gap)), big.exp_);
    }

    friend WideFloat operator-(const WideFloat& x) { return WideFloat(-x.mant_, x.exp_); }
    friend WideFloat operator-(const WideFloat& x, const WideFloat& y) { return x + (-y); }

    /// Divide by the positive power of two 2^shift (exact).
    WideFloat shifted(std::int64_t shift) const
    {
        if (is_zero())
            return {};
        return WideFloat(mant_, exp_ - shift);
    }

private:
    static T ldexp_value(const T& v, int e)
    {
        if constexpr (is_complex_v<T>)
            return T(std::ldexp(v.real(), e), std::ldexp(v.imag(), e));
        else
            return std::ldexp(v, e);
    }

    static Real largest_component(const T& v)
    {
        if constexpr (is_complex_v<T>)
            return std::max(std::abs(v.real()), std::abs(v.imag()));
        else
            return std::abs(v);
    }

    void normalize()
    {
        Real big = largest_component(mant_);
        if (big == 0) {
            mant_ = T(0);
            exp_ = 0;
            return;
        }
        int e = 0;
        std::frexp(big, &e);
        mant_ = ldexp_value(mant_, -e);
        exp_ += e;
    }

    T mant_{0};
    std::int64_t exp_{0};
};

} // namespace moebius
