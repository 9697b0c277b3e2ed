#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fractlab/errors.hpp"

namespace fractlab {

/// A nonnegative length stored as its base-2 logarithm.
///
/// Zero is represented by -infinity. Gap sequences of interest decay like
/// 2^-(k^3), far below the smallest normal double, so every magnitude in the
/// library flows through this type; conversion to a plain number happens only
/// for positions on the line and for printing. Base 2 keeps dyadic lengths
/// (2^-5, 2^-17, ...) exact.
class LogLength {
public:
    constexpr LogLength() noexcept = default;  // zero

    static constexpr LogLength zero() noexcept { return LogLength(); }
    static constexpr LogLength one() noexcept { return from_log2(0.0); }

    static constexpr LogLength from_log2(double lg) noexcept {
        LogLength out;
        out.lg_ = lg;
        return out;
    }

    static LogLength from_ln(double ln) noexcept { return from_log2(ln / std::numbers::ln2); }

    static LogLength from_value(long double v) {
        if (!(v >= 0.0L) || std::isinf(v))
            throw DomainError("length must be finite and nonnegative, got " +
                              std::to_string(static_cast<double>(v)));
        if (v == 0.0L)
            return zero();
        return from_log2(static_cast<double>(std::log2(v)));
    }

    double log2() const noexcept { return lg_; }
    double ln() const noexcept { return lg_ * std::numbers::ln2; }
    bool is_zero() const noexcept { return lg_ == kNegInf; }

    /// Plain value; underflows to 0 below the long double range.
    long double value() const noexcept {
        if (is_zero())
            return 0.0L;
        return std::exp2(static_cast<long double>(lg_));
    }
    double to_double() const noexcept { return static_cast<double>(value()); }

    friend LogLength operator*(LogLength a, LogLength b) noexcept {
        if (a.is_zero() || b.is_zero())
            return zero();
        return from_log2(a.lg_ + b.lg_);
    }

    friend LogLength operator/(LogLength a, LogLength b) {
        if (b.is_zero())
            throw RangeError("division by a zero length");
        if (a.is_zero())
            return zero();
        return from_log2(a.lg_ - b.lg_);
    }

    friend LogLength operator+(LogLength a, LogLength b) noexcept {
        if (a.lg_ < b.lg_)
            std::swap(a, b);
        if (b.is_zero())
            return a;
        return from_log2(a.lg_ + std::log1p(std::exp2(b.lg_ - a.lg_)) / std::numbers::ln2);
    }

    LogLength& operator+=(LogLength other) noexcept { return *this = *this + other; }
    LogLength& operator*=(LogLength other) noexcept { return *this = *this * other; }

    /// this - other. A result that is negative by no more than `rel_slack`
    /// (in log2 units) is rounded to zero; anything larger throws.
    LogLength minus(LogLength other, double rel_slack = 1e-12) const {
        if (other.is_zero())
            return *this;
        if (other.lg_ >= lg_) {
            if (other.lg_ - lg_ <= rel_slack)
                return zero();
            throw RangeError("log-space subtraction would be negative");
        }
        return from_log2(lg_ + std::log1p(-std::exp2(other.lg_ - lg_)) / std::numbers::ln2);
    }

    LogLength pow(double p) const noexcept {
        if (is_zero())
            return p == 0.0 ? one() : zero();
        return from_log2(lg_ * p);
    }

    /// count * this, for an exact or large multiplicity.
    LogLength times(long double count) const {
        if (count < 0)
            throw DomainError("negative multiplicity");
        if (count == 0 || is_zero())
            return zero();
        return from_log2(lg_ + static_cast<double>(std::log2(count)));
    }

    /// 2^k * this.
    LogLength scaled_pow2(double k) const noexcept { return is_zero() ? zero() : from_log2(lg_ + k); }

    friend constexpr bool operator==(LogLength a, LogLength b) noexcept { return a.lg_ == b.lg_; }
    friend constexpr std::partial_ordering operator<=>(LogLength a, LogLength b) noexcept {
        return a.lg_ <=> b.lg_;
    }

private:
    static constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    double lg_ = kNegInf;
};

/// Stable sum of many lengths: factor out the largest term, then add the
/// scaled mantissas with compensated summation.
inline LogLength log_sum(std::span<const LogLength> terms) {
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms)
        top = std::max(top, t.log2());
    if (top == -std::numeric_limits<double>::infinity())
        return LogLength::zero();
    long double sum = 0.0L, comp = 0.0L;
    for (const auto& t : terms) {
        if (t.is_zero())
            continue;
        const long double x = std::exp2(static_cast<long double>(t.log2() - top));
        const long double y = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            comp += (sum - y) + x;
        else
            comp += (x - y) + sum;
        sum = y;
    }
    return LogLength::from_log2(top + static_cast<double>(std::log2(sum + comp)));
}

inline LogLength log_sum(std::initializer_list<LogLength> terms) {
    return log_sum(std::span<const LogLength>(terms.begin(), terms.size()));
}

/// log2(a / b) for positive lengths.
inline double log2_ratio(LogLength a, LogLength b) {
    if (a.is_zero() || b.is_zero())
        throw RangeError("log ratio of a zero length");
    return a.log2() - b.log2();
}

/// Relative difference |a - b| / max(a, b), computed without leaving log space.
inline double relative_difference(LogLength a, LogLength b) {
    if (a == b)
        return 0.0;
    if (a.is_zero() || b.is_zero())
        return 1.0;
    const double d = std::fabs(a.log2() - b.log2());
    return -std::expm1(-d * std::numbers::ln2);
}

} // namespace fractlab
