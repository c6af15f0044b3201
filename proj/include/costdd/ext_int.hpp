#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace costdd {

/// Signed 64-bit integer extended with -inf and +inf.
///
/// The two extreme int64 values are reserved as the infinities, so every
/// finite value lies strictly between them. Finite arithmetic is checked: a
/// result that would leave the finite range throws OverflowError instead of
/// wrapping or silently turning into an infinity.
class ExtInt {
public:
    using value_type = std::int64_t;

    static constexpr value_type kNegInfRaw = std::numeric_limits<value_type>::min();
    static constexpr value_type kPosInfRaw = std::numeric_limits<value_type>::max();
    static constexpr value_type kMinFinite = kNegInfRaw + 1;
    static constexpr value_type kMaxFinite = kPosInfRaw - 1;

    constexpr ExtInt() noexcept = default;

    /// Finite value. Throws OverflowError for the two reserved raw values.
    constexpr ExtInt(value_type v) : raw_(v) { // NOLINT(google-explicit-constructor)
        if (v == kNegInfRaw || v == kPosInfRaw) throw OverflowError("ExtInt: finite value out of range");
    }

    static constexpr ExtInt neg_inf() noexcept { return ExtInt(RawTag{}, kNegInfRaw); }
    static constexpr ExtInt pos_inf() noexcept { return ExtInt(RawTag{}, kPosInfRaw); }
    /// Rebuild from raw() without validation; used by hash-table keys.
    static constexpr ExtInt from_raw(value_type raw) noexcept { return ExtInt(RawTag{}, raw); }

    constexpr bool is_neg_inf() const noexcept { return raw_ == kNegInfRaw; }
    constexpr bool is_pos_inf() const noexcept { return raw_ == kPosInfRaw; }
    constexpr bool is_finite() const noexcept { return !is_neg_inf() && !is_pos_inf(); }

    /// Finite payload; precondition is_finite().
    constexpr value_type value() const {
        if (!is_finite()) throw ContractError("ExtInt: value() of an infinity");
        return raw_;
    }
    constexpr value_type raw() const noexcept { return raw_; }

    friend constexpr auto operator<=>(ExtInt a, ExtInt b) noexcept = default;
    friend constexpr bool operator==(ExtInt a, ExtInt b) noexcept = default;

    /// x + c for a finite cost c. Infinities absorb.
    friend constexpr ExtInt operator+(ExtInt x, value_type c) {
        if (!x.is_finite()) return x;
        value_type r = 0;
        if (__builtin_add_overflow(x.raw_, c, &r) || r == kNegInfRaw || r == kPosInfRaw)
            throw OverflowError("cost arithmetic overflow");
        return ExtInt(RawTag{}, r);
    }
    friend constexpr ExtInt operator-(ExtInt x, value_type c) {
        if (!x.is_finite()) return x;
        value_type r = 0;
        if (__builtin_sub_overflow(x.raw_, c, &r) || r == kNegInfRaw || r == kPosInfRaw)
            throw OverflowError("cost arithmetic overflow");
        return ExtInt(RawTag{}, r);
    }

    std::string to_string() const {
        if (is_neg_inf()) return "-inf";
        if (is_pos_inf()) return "+inf";
        return std::to_string(raw_);
    }

    /// Accepts a decimal integer, "-inf", "+inf" or "inf".
    static std::optional<ExtInt> parse(std::string_view s) {
        if (s == "-inf") return neg_inf();
        if (s == "+inf" || s == "inf") return pos_inf();
        if (s.empty()) return std::nullopt;
        std::size_t i = 0;
        bool neg = false;
        if (s[0] == '-' || s[0] == '+') {
            neg = s[0] == '-';
            i = 1;
        }
        if (i == s.size()) return std::nullopt;
        value_type acc = 0;
        for (; i < s.size(); ++i) {
            char ch = s[i];
            if (ch < '0' || ch > '9') return std::nullopt;
            int d = ch - '0';
            if (__builtin_mul_overflow(acc, 10, &acc)) return std::nullopt;
            if (__builtin_add_overflow(acc, neg ? -d : d, &acc)) return std::nullopt;
        }
        if (acc == kNegInfRaw || acc == kPosInfRaw) return std::nullopt;
        return ExtInt(acc);
    }

private:
    struct RawTag {};
    constexpr ExtInt(RawTag, value_type raw) noexcept : raw_(raw) {}

    value_type raw_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, ExtInt x) { return os << x.to_string(); }

} // namespace costdd
