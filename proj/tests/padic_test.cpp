#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mumford/padic.hpp"

using namespace mumford;

namespace {

// Independent oracle: the first k digits of x must satisfy
// (sum a_i p^i) * den == num * p^{-val} (mod p^k), i.e. the digit window
// really is the expansion of num/den.
void check_against_modular(const Padic& x, long long num, long long den, long long k) {
    long long p = x.prime();
    REQUIRE(!x.is_zero());
    BigInt n = num, d = den;
    long long val = 0;
    while (n % p == 0) { n /= p; ++val; }
    while (d % p == 0) { d /= p; --val; }
    REQUIRE(x.val() == val);
    BigInt window = 0;
    for (long long i = k - 1; i >= 0; --i) window = window * p + x.digit_at(val + i);
    BigInt mod = p_pow(p, k);
    BigInt lhs = (window * d - n) % mod;
    if (lhs < 0) lhs += mod;
    REQUIRE(lhs == 0);
}

} // namespace

TEST_CASE("pure powers of p parse exactly") {
    Padic x = Padic::from_rational(27, 1, 3, 15);
    REQUIRE(x.exact());
    REQUIRE(x.val() == 3);
    REQUIRE(x.digit_at(3) == 1);
    REQUIRE(x.digit_at(4) == 0);

    Padic third = Padic::from_rational(1, 3, 3, 15);
    REQUIRE(third.exact());
    REQUIRE(third.val() == -1);
    REQUIRE(third.digit_at(-1) == 1);
}

TEST_CASE("negative integers expand with repeating complement digits") {
    Padic x = Padic::from_rational(-5, 1, 3, 12);
    REQUIRE(x.val() == 0);
    // -5 = 1 + 1*3 + 2*9 + 2*27 + ... in Q_3
    REQUIRE(x.digit_at(0) == 1);
    REQUIRE(x.digit_at(1) == 1);
    for (int i = 2; i < 12; ++i) REQUIRE(x.digit_at(i) == 2);
    check_against_modular(x, -5, 1, 12);
}

TEST_CASE("zero denominator is rejected") {
    REQUIRE_THROWS_AS(Padic::from_rational(1, 0, 3, 10), math_error);
}

TEST_CASE("x plus minus x is the exact zero") {
    Padic x = Padic::from_rational(22, 7, 5, 12);
    Padic s = x + (-x);
    REQUIRE(s.is_zero());
    Padic y = Padic::from_rational(14, 1, 5, 12);
    REQUIRE((y + (-y)).is_zero());
}

TEST_CASE("one third times three is one in Q_3") {
    Padic a = Padic::from_rational(1, 3, 3, 10);
    Padic b = Padic::from_rational(3, 1, 3, 10);
    REQUIRE((a * b) == Padic::one(3));
    REQUIRE((a * b).exact());
}

TEST_CASE("valuations add under multiplication") {
    Padic a = Padic::from_rational(27, 1, 3, 10);
    Padic b = Padic::from_rational(3, 1, 3, 10);
    REQUIRE((a * b).val() == 4);
}

TEST_CASE("division errors distinguish exact zero from cancellation") {
    Padic one = Padic::one(3);
    REQUIRE_THROWS_WITH(one / Padic::zero(3), "division by zero");
    Padic x = Padic::from_rational(7, 5, 3, 10);
    Padic cancelled = x - x;
    REQUIRE(cancelled.is_zero());
    REQUIRE(cancelled.from_cancellation());
    REQUIRE_THROWS_WITH(one / cancelled, "precision-exhausted divisor");
}

TEST_CASE("addition records true remaining precision after cancellation") {
    // 1 + 2 = 3 in Q_3: one digit of relative precision dies.
    Padic a = Padic::inexact(3, 0, 1, 10);
    Padic b = Padic::inexact(3, 0, 2, 10);
    Padic s = a + b;
    REQUIRE(s.val() == 1);
    REQUIRE(s.prec() == 9);
}

TEST_CASE("digit string formatting matches the trailing-left convention") {
    REQUIRE(format_digits(Padic::one(3)) == "(1)_3");
    REQUIRE(format_digits(Padic::from_rational(27, 1, 3, 10)) == "(1000)_3");
    REQUIRE(format_digits(Padic::from_rational(1, 3, 3, 10)) == "(0.1)_3");
    REQUIRE(format_digits(Padic::zero(3)) == "(0)_3");

    // A windowed value with positive valuation pads with zeros below it.
    Padic q = Padic::inexact(3, 2, 1 + 3 * 0 + 9 * 1, 3); // digits 1,0,1 from p^2
    REQUIRE(format_digits(q) == "(…" "10100)_3");
}

TEST_CASE("digit strings parse with valuation read off trailing zeros") {
    Padic q11 = parse_digits("(…" "220200000100)_3", 3);
    REQUIRE(!q11.exact());
    REQUIRE(q11.val() == 2);
    REQUIRE(q11.prec() == 10);
    REQUIRE(q11.digit_at(2) == 1);
    REQUIRE(q11.digit_at(3) == 0);
    REQUIRE(q11.digit_at(5) == 0);
    REQUIRE(q11.digit_at(8) == 2);

    Padic q23 = parse_digits("(…" "020201120.1)_3", 3);
    REQUIRE(q23.val() == -1);
    REQUIRE(q23.prec() == 10);
    REQUIRE(q23.digit_at(-1) == 1);

    Padic one = parse_digits("(1)_3", 3);
    REQUIRE(one.exact());
    REQUIRE(one == Padic::one(3));
}

TEST_CASE("format then parse is the identity on carried digits") {
    std::mt19937 rng(12345);
    const long long p = 3;
    for (int trial = 0; trial < 200; ++trial) {
        long long val = static_cast<long long>(rng() % 9) - 4;
        int prec = 1 + static_cast<int>(rng() % 12);
        BigInt u = 0;
        for (int i = 0; i < prec; ++i) u = u * p + static_cast<long long>(rng() % p);
        if (u % p == 0) u += 1;
        Padic x = Padic::inexact(p, val, u, prec);
        if (x.is_zero()) continue;
        if (x.val() + x.prec() - 1 < 0) continue; // integer part not fully known
        Padic back = parse_digits(format_digits(x), p);
        REQUIRE(back.val() == x.val());
        REQUIRE(back.prec() == x.prec());
        REQUIRE(back == x);
    }
}

TEST_CASE("arithmetic agrees with exact rational arithmetic mod p^k") {
    std::mt19937 rng(987);
    auto rand_nonzero = [&](long long bound) {
        long long v = 0;
        while (v == 0) v = static_cast<long long>(rng() % (2 * bound + 1)) - bound;
        return v;
    };
    for (long long p : {3LL, 5LL, 7LL}) {
        for (int trial = 0; trial < 300; ++trial) {
            long long a = rand_nonzero(60), b = rand_nonzero(60);
            long long c = rand_nonzero(60), d = rand_nonzero(60);
            Padic x = Padic::from_rational(a, b, p, 14);
            Padic y = Padic::from_rational(c, d, p, 14);

            // x*y = (ac)/(bd)
            check_against_modular(x * y, a * c, b * d, 8);
            // x/y = (ad)/(bc)
            check_against_modular(x / y, a * d, b * c, 8);
            // x+y = (ad+cb)/(bd), unless it vanishes
            long long sn = a * d + c * b, sd = b * d;
            Padic s = x + y;
            if (sn == 0) {
                REQUIRE(s.is_zero());
            } else {
                // Heavy cancellation can eat the comparison window; only
                // check when at least 6 digits survived.
                if (!s.is_zero() && s.prec() >= 6) check_against_modular(s, sn, sd, 6);
            }
        }
    }
}

TEST_CASE("ultrametric valuation rules hold") {
    std::mt19937 rng(555);
    auto rand_nonzero = [&](long long bound) {
        long long v = 0;
        while (v == 0) v = static_cast<long long>(rng() % (2 * bound + 1)) - bound;
        return v;
    };
    const long long p = 3;
    int equality_checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        Padic x = Padic::from_rational(rand_nonzero(400), rand_nonzero(400), p, 16);
        Padic y = Padic::from_rational(rand_nonzero(400), rand_nonzero(400), p, 16);
        REQUIRE((x * y).val() == x.val() + y.val());
        Padic s = x + y;
        if (!s.is_zero()) {
            REQUIRE(s.val() >= std::min(x.val(), y.val()));
            if (x.val() != y.val()) {
                REQUIRE(s.val() == std::min(x.val(), y.val()));
                ++equality_checked;
            }
        }
    }
    REQUIRE(equality_checked > 50);
}

TEST_CASE("truncation windows") {
    Padic x = Padic::from_rational(-5, 1, 3, 12);
    Padic t = x.truncate_rel(4);
    REQUIRE(t.prec() == 4);
    REQUIRE(t == x);

    Padic a = x.truncate_abs(3);
    REQUIRE(a.prec() == 3);
    REQUIRE(a.val() == 0);

    Padic gone = Padic::from_rational(27, 1, 3, 12).truncate_abs(2);
    REQUIRE(gone.is_zero());
}

TEST_CASE("unit_mod beyond known precision demands more digits") {
    Padic x = Padic::inexact(3, 0, 5, 3);
    REQUIRE_THROWS_AS(x.unit_mod(7), precision_error);
    REQUIRE(Padic::from_rational(5, 1, 3, 3).unit_mod(30) == 5);
}
