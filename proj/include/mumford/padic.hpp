#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <climits>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "mumford/errors.hpp"

namespace mumford {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt p_pow(long long p, long long k) {
    if (k < 0) throw math_error("p_pow: negative exponent");
    BigInt base = p, r = 1;
    while (k > 0) {
        if (k & 1) r *= base;
        base *= base;
        k >>= 1;
    }
    return r;
}

// Inverse of u modulo p^k (p prime, p does not divide u), by lifting the
// inverse mod p with Newton iteration x <- x(2 - ux).
inline BigInt mod_inverse(const BigInt& u, long long p, long long k) {
    BigInt u0 = u % p;
    if (u0 < 0) u0 += p;
    if (u0 == 0) throw math_error("mod_inverse: argument divisible by p");
    BigInt x = 0;
    for (long long c = 1; c < p; ++c) {
        if ((u0 * c) % p == 1) { x = c; break; }
    }
    long long have = 1;
    BigInt mod = p;
    while (have < k) {
        have *= 2;
        mod *= mod;
        x = (x * (2 - u * x)) % mod;
        if (x < 0) x += mod;
    }
    BigInt target = p_pow(p, k);
    x %= target;
    if (x < 0) x += target;
    return x;
}

namespace detail {
inline int& working_digits_ref() {
    thread_local int n = 20;
    return n;
}
} // namespace detail

// Relative working precision carried by arithmetic when no better bound is
// available (conversions of exact values to digit windows, inversions of
// exact non-terminating values). The guard absorbs leading-digit loss in
// additions so that n requested output digits survive.
struct PrecisionPolicy {
    int working_digits = 20;

    static int guard_digits() {
        if (const char* e = std::getenv("MUMFORD_GUARD_DIGITS")) {
            int g = std::atoi(e);
            if (g > 0) return g;
        }
        return 10;
    }
    static PrecisionPolicy for_target(int n) { return PrecisionPolicy{n + guard_digits()}; }
};

inline int default_working_digits() { return detail::working_digits_ref(); }

class working_precision_scope {
public:
    explicit working_precision_scope(int n) : saved_(detail::working_digits_ref()) {
        detail::working_digits_ref() = n;
    }
    ~working_precision_scope() { detail::working_digits_ref() = saved_; }
    working_precision_scope(const working_precision_scope&) = delete;
    working_precision_scope& operator=(const working_precision_scope&) = delete;

private:
    int saved_;
};

// An element of Q_p at capped relative precision.
//
// States:
//   - exact zero (optionally marked as produced by cancellation),
//   - exact nonzero:  value = sign * mag * p^val, p does not divide mag
//     (a terminating expansion known to all digits),
//   - inexact:        digits of value/p^val are known mod p^prec only;
//     unit in [1, p^prec), p does not divide unit.
//
// Values are immutable after construction.
class Padic {
public:
    static constexpr int kExactDigitCap = 4096;

    Padic() : p_(2), zero_(true), exact_(true) {}

    static Padic zero(long long p) {
        Padic x;
        x.p_ = p;
        return x;
    }

    static Padic from_integer(long long p, const BigInt& v) {
        check_prime(p);
        if (v == 0) return zero(p);
        Padic x;
        x.p_ = p;
        x.zero_ = false;
        x.exact_ = true;
        x.sign_ = v < 0 ? -1 : 1;
        BigInt m = v < 0 ? BigInt(-v) : v;
        long long val = 0;
        while (m % p == 0) { m /= p; ++val; }
        x.val_ = val;
        x.mag_ = m;
        return x.maybe_demote();
    }

    static Padic one(long long p) { return from_integer(p, 1); }

    // p-adic expansion of num/den, exact when the expansion terminates
    // (den a power of p after reduction), otherwise truncated to `digits`
    // significant digits.
    static Padic from_rational(const BigInt& num, const BigInt& den, long long p, int digits) {
        check_prime(p);
        if (den == 0) throw math_error("division by zero");
        if (num == 0) return zero(p);
        if (digits < 1) throw math_error("from_rational: need at least one digit");
        BigInt n = num, d = den;
        if (d < 0) { n = -n; d = -d; }
        int sign = n < 0 ? -1 : 1;
        if (n < 0) n = -n;
        long long val = 0;
        while (n % p == 0) { n /= p; ++val; }
        while (d % p == 0) { d /= p; --val; }
        if (d == 1) {
            Padic x;
            x.p_ = p;
            x.zero_ = false;
            x.exact_ = true;
            x.sign_ = sign;
            x.val_ = val;
            x.mag_ = n;
            return x.maybe_demote();
        }
        BigInt mod = p_pow(p, digits);
        BigInt u = (n % mod) * mod_inverse(d, p, digits) % mod;
        if (sign < 0) u = mod - u;
        return make_inexact(p, val, u, digits);
    }

    static Padic from_rational(long long num, long long den, long long p, int digits) {
        return from_rational(BigInt(num), BigInt(den), p, digits);
    }

    // Windowed value with explicit digits: value = unit * p^val known mod
    // p^(val+prec). The unit is reduced; cancellation collapses to zero.
    static Padic inexact(long long p, long long val, const BigInt& unit, long long prec) {
        check_prime(p);
        if (prec < 1) throw math_error("inexact: need prec >= 1");
        BigInt u = unit % p_pow(p, prec);
        if (u < 0) u += p_pow(p, prec);
        return make_inexact(p, val, std::move(u), prec);
    }

    // Same value with the valuation shifted by dv (multiplication by p^dv).
    Padic shifted_by(long long dv) const { return shifted(dv); }

    long long prime() const { return p_; }
    bool is_zero() const { return zero_; }
    bool from_cancellation() const { return zero_ && cancelled_; }
    bool exact() const { return exact_; }

    long long val() const {
        if (zero_) throw math_error("val() of zero");
        return val_;
    }

    // Significant digits known; LLONG_MAX-like sentinel for exact values.
    long long prec() const {
        if (exact_) return kInfPrec;
        return prec_;
    }

    // Absolute precision: value is known mod p^abs_prec().
    long long abs_prec() const {
        if (exact_) return kInfPrec;
        return val_ + prec_;
    }

    // Digits of value / p^val modulo p^k. Requires k <= prec for inexact.
    BigInt unit_mod(long long k) const {
        if (zero_) throw math_error("unit_mod of zero");
        if (k <= 0) return 0;
        BigInt mod = p_pow(p_, k);
        if (exact_) {
            BigInt r = (sign_ * mag_) % mod;
            if (r < 0) r += mod;
            return r;
        }
        if (k > prec_) throw precision_error("unit digits requested beyond known precision");
        return unit_ % mod;
    }

    // Digit a_k of the expansion sum a_k p^k. Positions below the valuation
    // are exactly zero; positions at or above val + prec are unknown.
    int digit_at(long long k) const {
        if (zero_) {
            if (exact_) return 0;
            throw precision_error("digit of inexact zero");
        }
        if (k < val_) return 0;
        BigInt u = unit_mod(k - val_ + 1);
        return static_cast<int>(u / p_pow(p_, k - val_) % p_);
    }

    std::vector<int> digits_in_range(long long lo, long long hi) const {
        std::vector<int> out;
        out.reserve(static_cast<size_t>(hi > lo ? hi - lo : 0));
        for (long long k = lo; k < hi; ++k) out.push_back(digit_at(k));
        return out;
    }

    Padic operator-() const {
        if (zero_) return *this;
        Padic x = *this;
        if (exact_) {
            x.sign_ = -sign_;
        } else {
            BigInt mod = p_pow(p_, prec_);
            x.unit_ = mod - unit_;
        }
        return x;
    }

    friend Padic operator+(const Padic& a, const Padic& b) {
        a.check_same_prime(b);
        if (a.zero_) return b;
        if (b.zero_) return a;
        long long p = a.p_;
        long long v = std::min(a.val_, b.val_);
        if (a.exact_ && b.exact_) {
            long long shift_a = a.val_ - v, shift_b = b.val_ - v;
            if (shift_a > kExactDigitCap || shift_b > kExactDigitCap)
                return add_windowed(a, b, v, std::min(a.eff_abs(), b.eff_abs()));
            BigInt s = a.sign_ * a.mag_ * p_pow(p, shift_a) + b.sign_ * b.mag_ * p_pow(p, shift_b);
            if (s == 0) return zero(p);
            return from_integer(p, s).shifted(v);
        }
        return add_windowed(a, b, v, std::min(a.eff_abs(), b.eff_abs()));
    }

    friend Padic operator-(const Padic& a, const Padic& b) { return a + (-b); }

    friend Padic operator*(const Padic& a, const Padic& b) {
        a.check_same_prime(b);
        long long p = a.p_;
        if (a.zero_ || b.zero_) return zero(p);
        if (a.exact_ && b.exact_) {
            Padic x;
            x.p_ = p;
            x.zero_ = false;
            x.exact_ = true;
            x.sign_ = a.sign_ * b.sign_;
            x.val_ = a.val_ + b.val_;
            x.mag_ = a.mag_ * b.mag_;
            return x.maybe_demote();
        }
        long long prec = std::min(a.eff_prec(), b.eff_prec());
        BigInt mod = p_pow(p, prec);
        BigInt u = a.unit_mod(prec) * b.unit_mod(prec) % mod;
        return make_inexact(p, a.val_ + b.val_, u, prec);
    }

    Padic inverse() const {
        if (zero_) {
            if (cancelled_) throw math_error("precision-exhausted divisor");
            throw math_error("division by zero");
        }
        if (exact_ && mag_ == 1) {
            Padic x = *this;
            x.val_ = -val_;
            return x;
        }
        long long prec = eff_prec();
        if (prec >= kInfPrec) prec = default_working_digits();
        BigInt u = mod_inverse(unit_mod(prec), p_, prec);
        return make_inexact(p_, -val_, u, prec);
    }

    friend Padic operator/(const Padic& a, const Padic& b) {
        a.check_same_prime(b);
        if (a.zero_) {
            if (b.zero_) throw math_error(b.cancelled_ ? "precision-exhausted divisor" : "division by zero");
            return zero(a.p_);
        }
        if (b.exact_ && !b.zero_ && a.exact_ && b.mag_ != 0 && a.mag_ % b.mag_ == 0) {
            Padic x;
            x.p_ = a.p_;
            x.zero_ = false;
            x.exact_ = true;
            x.sign_ = a.sign_ * b.sign_;
            x.val_ = a.val_ - b.val_;
            x.mag_ = a.mag_ / b.mag_;
            return x;
        }
        return a * b.inverse();
    }

    // Equality of the represented values at shared precision.
    bool same_value(const Padic& o) const {
        check_same_prime(o);
        if (zero_ || o.zero_) return zero_ && o.zero_;
        if (val_ != o.val_) return false;
        long long k = std::min(eff_prec(), o.eff_prec());
        if (k >= kInfPrec) return sign_ == o.sign_ && mag_ == o.mag_;
        return unit_mod(k) == o.unit_mod(k);
    }

    friend bool operator==(const Padic& a, const Padic& b) { return a.same_value(b); }
    friend bool operator!=(const Padic& a, const Padic& b) { return !a.same_value(b); }

    // |a| <= |b|  <=>  val(a) >= val(b), with |0| = 0.
    bool abs_leq(const Padic& o) const {
        if (zero_) return true;
        if (o.zero_) return false;
        return val_ >= o.val_;
    }

    Padic truncate_rel(long long n) const {
        if (zero_) return *this;
        if (n < 1) throw math_error("truncate_rel: need n >= 1");
        if (n >= eff_prec()) return *this;
        BigInt u = unit_mod(n);
        return make_inexact(p_, val_, u, n);
    }

    // Forget digits at positions >= a; value below indistinguishable from 0
    // collapses to the cancellation zero.
    Padic truncate_abs(long long a) const {
        if (zero_) return *this;
        if (val_ >= a) {
            Padic z = zero(p_);
            z.cancelled_ = true;
            return z;
        }
        return truncate_rel(a - val_);
    }

    std::string str() const; // format_digits below

private:
    static constexpr long long kInfPrec = std::numeric_limits<long long>::max() / 4;

    static void check_prime(long long p) {
        if (p < 2) throw math_error("prime must be >= 2");
        for (long long d = 2; d * d <= p; ++d)
            if (p % d == 0) throw math_error("p = " + std::to_string(p) + " is not prime");
    }

    void check_same_prime(const Padic& o) const {
        if (p_ != o.p_) throw math_error("mixed primes in arithmetic");
    }

    long long eff_prec() const { return exact_ ? kInfPrec : prec_; }
    long long eff_abs() const { return exact_ ? kInfPrec : val_ + prec_; }

    Padic shifted(long long dv) const {
        if (zero_) return *this;
        Padic x = *this;
        x.val_ += dv;
        return x;
    }

    static Padic make_inexact(long long p, long long val, BigInt u, long long prec) {
        if (u == 0) {
            Padic z = zero(p);
            z.cancelled_ = true;
            return z;
        }
        // Strip p factors: cancellation moved the valuation up.
        while (u % p == 0) {
            u /= p;
            ++val;
            --prec;
        }
        if (prec <= 0) {
            Padic z = zero(p);
            z.cancelled_ = true;
            return z;
        }
        Padic x;
        x.p_ = p;
        x.zero_ = false;
        x.exact_ = false;
        x.val_ = val;
        x.unit_ = std::move(u);
        x.prec_ = prec;
        return x;
    }

    static Padic add_windowed(const Padic& a, const Padic& b, long long v, long long abs_known) {
        long long p = a.p_;
        long long width = abs_known - v;
        if (width >= kInfPrec / 2) width = std::max<long long>(default_working_digits(), 1);
        if (width <= 0) {
            Padic z = zero(p);
            z.cancelled_ = true;
            return z;
        }
        BigInt mod = p_pow(p, width);
        BigInt s = 0;
        for (const Padic* t : {&a, &b}) {
            long long shift = t->val_ - v;
            if (shift >= width) continue; // contributes 0 in the window
            BigInt u = t->unit_mod(width - shift);
            s += u * p_pow(p, shift);
        }
        s %= mod;
        return make_inexact(p, v, std::move(s), width);
    }

    Padic maybe_demote() const {
        if (!exact_ || zero_) return *this;
        // Keep exact magnitudes bounded; beyond the cap fall back to a window.
        // Base-p digit count never exceeds the bit count, so small magnitudes
        // skip the probe entirely.
        if (boost::multiprecision::msb(mag_) < static_cast<unsigned>(kExactDigitCap)) return *this;
        BigInt probe = mag_;
        long long digits = 0;
        while (probe > 0 && digits <= kExactDigitCap) {
            probe /= p_;
            ++digits;
        }
        if (digits <= kExactDigitCap) return *this;
        long long w = kExactDigitCap;
        return make_inexact(p_, val_, unit_mod(w), w);
    }

    long long p_;
    bool zero_ = false;
    bool cancelled_ = false;
    bool exact_ = false;
    int sign_ = 1;       // exact values only
    long long val_ = 0;
    BigInt mag_ = 0;     // exact: positive magnitude of the unit part
    BigInt unit_ = 0;    // inexact: unit digits in [1, p^prec)
    long long prec_ = 0; // inexact only

    friend std::string format_digits(const Padic&);
};

// Digit-string form: "(" ["…"] digits ["." digits] ")_p", digits read with
// a_0 adjacent to the point (or rightmost when there is no point) and
// increasing powers leftward. "…" marks truncation of a non-terminating or
// windowed expansion.
inline std::string format_digits(const Padic& x) {
    long long p = x.prime();
    std::string suffix = ")_" + std::to_string(p);
    if (x.is_zero()) return "(0" + suffix;

    bool truncated;
    long long top; // highest printed position
    if (x.exact() && x.sign_ > 0) {
        truncated = false;
        BigInt probe = x.mag_;
        long long digits = 0;
        while (probe > 0) { probe /= p; ++digits; }
        top = x.val() + digits - 1;
    } else if (x.exact()) {
        truncated = true;
        top = x.val() + default_working_digits() - 1;
    } else {
        truncated = true;
        top = x.val() + x.prec() - 1;
    }
    if (top < 0 && truncated)
        throw precision_error("cannot format: known window lies entirely below the point");

    std::string out = "(";
    if (truncated) out += "…";
    auto emit = [&](long long k) { out += static_cast<char>('0' + x.digit_at(k)); };
    long long int_top = std::max<long long>(top, 0);
    for (long long k = int_top; k >= 0; --k) emit(k);
    if (x.val() < 0) {
        out += '.';
        for (long long k = -1; k >= x.val(); --k) emit(k);
    }
    return out + suffix;
}

inline std::string Padic::str() const { return format_digits(*this); }

inline std::ostream& operator<<(std::ostream& os, const Padic& x) { return os << format_digits(x); }

inline Padic parse_digits(const std::string& s, long long p) {
    std::string body = s;
    std::string suffix = ")_" + std::to_string(p);
    if (body.size() < 2 + suffix.size() || body.front() != '(' ||
        body.substr(body.size() - suffix.size()) != suffix)
        throw parse_error("digit string must look like (…ddd)_" + std::to_string(p));
    body = body.substr(1, body.size() - 1 - suffix.size());

    bool truncated = false;
    if (body.rfind("…", 0) == 0) {
        truncated = true;
        body = body.substr(3);
    } else if (body.rfind("...", 0) == 0) {
        truncated = true;
        body = body.substr(3);
    }

    std::string int_part = body, frac_part;
    if (auto dot = body.find('.'); dot != std::string::npos) {
        int_part = body.substr(0, dot);
        frac_part = body.substr(dot + 1);
        if (frac_part.empty()) throw parse_error("empty fractional part");
    }
    if (int_part.empty()) throw parse_error("empty digit string");

    std::vector<int> digit_of; // position k = index into this, bottom first
    long long bottom = -static_cast<long long>(frac_part.size());
    std::string all = int_part + frac_part; // leftmost = highest power
    for (char c : all) {
        if (c < '0' || c > '9') throw parse_error("bad digit character");
        int d = c - '0';
        if (d >= p) throw parse_error("digit " + std::to_string(d) + " >= p");
    }
    long long top = bottom + static_cast<long long>(all.size()) - 1;
    auto digit_at_pos = [&](long long k) { return all[static_cast<size_t>(top - k)] - '0'; };

    long long val = bottom;
    while (val <= top && digit_at_pos(val) == 0) ++val;
    if (val > top) {
        if (truncated) throw parse_error("cannot represent an all-zero truncated window");
        return Padic::zero(p);
    }

    BigInt u = 0;
    for (long long k = top; k >= val; --k) u = u * p + digit_at_pos(k);
    if (truncated) return Padic::inexact(p, val, u, top - val + 1);
    return Padic::from_integer(p, u).shifted_by(val);
}

} // namespace mumford
