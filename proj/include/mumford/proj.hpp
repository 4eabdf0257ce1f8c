#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mumford/errors.hpp"
#include "mumford/padic.hpp"

namespace mumford {

// -------------------------------------------------------------------------
// Points of P^1(Q_p): an affine value or the point at infinity.

class ProjPoint {
public:
    ProjPoint() : inf_(true) {}
    explicit ProjPoint(Padic z) : inf_(false), z_(std::move(z)) {}

    static ProjPoint infinity() { return ProjPoint(); }
    static ProjPoint affine(Padic z) { return ProjPoint(std::move(z)); }

    bool is_infinity() const { return inf_; }
    const Padic& value() const {
        if (inf_) throw math_error("value() of the point at infinity");
        return z_;
    }

    // Normalized homogeneous coordinates: the coordinate of larger absolute
    // value is 1, so both entries are p-adic integers.
    std::pair<Padic, Padic> normalized(long long p) const {
        if (inf_) return {Padic::one(p), Padic::zero(p)};
        if (z_.is_zero() || z_.val() >= 0) return {z_, Padic::one(p)};
        return {Padic::one(p), z_.inverse()};
    }

    bool same_point(const ProjPoint& o) const {
        if (inf_ || o.inf_) return inf_ == o.inf_;
        return z_.same_value(o.z_);
    }
    friend bool operator==(const ProjPoint& a, const ProjPoint& b) { return a.same_point(b); }
    friend bool operator!=(const ProjPoint& a, const ProjPoint& b) { return !(a == b); }

    // Dedup key identifying the point through digits below p^depth.
    std::string abs_key(long long depth) const {
        if (inf_) return "inf";
        if (z_.is_zero() || z_.val() >= depth) return "0";
        std::string s = std::to_string(z_.val()) + ":";
        for (int d : z_.digits_in_range(z_.val(), depth)) s += static_cast<char>('0' + d);
        return s;
    }

private:
    bool inf_;
    Padic z_;
};

// -------------------------------------------------------------------------
// Exact 2x2 matrices over Q up to scalar (elements of PGL(2, Q)).
// Entries are integers with content 1 and canonical sign, so equality in
// PGL is plain equality of entries.

class Mobius {
public:
    Mobius() : a_(1), b_(0), c_(0), d_(1) {}
    Mobius(BigInt a, BigInt b, BigInt c, BigInt d)
        : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
        normalize();
        if (det() == 0) throw math_error("matrix is singular");
    }

    // Entries as rational strings, e.g. {{"-13/9","44/9"},{"-2/9","13/9"}}.
    static Mobius from_strings(const std::string& a, const std::string& b,
                               const std::string& c, const std::string& d) {
        BigInt n[4], m[4];
        parse_entry(a, n[0], m[0]);
        parse_entry(b, n[1], m[1]);
        parse_entry(c, n[2], m[2]);
        parse_entry(d, n[3], m[3]);
        BigInt l = 1;
        for (auto& den : m) l = l / boost::multiprecision::gcd(l, den) * den;
        return Mobius(n[0] * (l / m[0]), n[1] * (l / m[1]), n[2] * (l / m[2]), n[3] * (l / m[3]));
    }

    const BigInt& a() const { return a_; }
    const BigInt& b() const { return b_; }
    const BigInt& c() const { return c_; }
    const BigInt& d() const { return d_; }

    BigInt det() const { return a_ * d_ - b_ * c_; }
    BigInt trace() const { return a_ + d_; }

    friend Mobius operator*(const Mobius& x, const Mobius& y) {
        return Mobius(x.a_ * y.a_ + x.b_ * y.c_, x.a_ * y.b_ + x.b_ * y.d_,
                      x.c_ * y.a_ + x.d_ * y.c_, x.c_ * y.b_ + x.d_ * y.d_);
    }

    Mobius inverse() const { return Mobius(d_, -b_, -c_, a_); }

    Mobius pow(long long e) const {
        if (e < 0) return inverse().pow(-e);
        Mobius r, base = *this;
        while (e > 0) {
            if (e & 1) r = r * base;
            base = base * base;
            e >>= 1;
        }
        return r;
    }

    bool is_identity() const { return b_ == 0 && c_ == 0 && a_ == d_; }

    // Equality in PGL: with content 1, proportional matrices differ by sign.
    friend bool operator==(const Mobius& x, const Mobius& y) {
        if (x.a_ == y.a_ && x.b_ == y.b_ && x.c_ == y.c_ && x.d_ == y.d_) return true;
        return x.a_ == -y.a_ && x.b_ == -y.b_ && x.c_ == -y.c_ && x.d_ == -y.d_;
    }
    friend bool operator!=(const Mobius& x, const Mobius& y) { return !(x == y); }

    std::string str() const {
        return "[[" + a_.str() + "," + b_.str() + "],[" + c_.str() + "," + d_.str() + "]]";
    }

private:
    static void parse_entry(const std::string& s, BigInt& num, BigInt& den) {
        try {
            auto slash = s.find('/');
            if (slash == std::string::npos) {
                num = BigInt(s);
                den = 1;
            } else {
                num = BigInt(s.substr(0, slash));
                den = BigInt(s.substr(slash + 1));
            }
        } catch (const std::exception&) {
            throw parse_error("bad matrix entry '" + s + "'");
        }
        if (den == 0) throw parse_error("zero denominator in matrix entry");
        if (den < 0) { num = -num; den = -den; }
    }

    // Content normalization only. The sign of the representative is kept as
    // given so that traces and eigenvalues read off the input matrices.
    void normalize() {
        using boost::multiprecision::gcd;
        BigInt g = gcd(gcd(abs(a_), abs(b_)), gcd(abs(c_), abs(d_)));
        if (g > 1) { a_ /= g; b_ /= g; c_ /= g; d_ /= g; }
    }

    BigInt a_, b_, c_, d_;
};

inline long long int_val(const BigInt& v, long long p) {
    if (v == 0) throw math_error("valuation of zero integer");
    BigInt m = v;
    long long k = 0;
    while (m % p == 0) { m /= p; ++k; }
    return k;
}

// Newton-polygon criterion: the characteristic polynomial x^2 - t x + det
// has roots of distinct valuations exactly when 2 val(t) < val(det).
inline bool is_hyperbolic(const Mobius& m, long long p) {
    if (m.det() == 0) throw math_error("is_hyperbolic: singular matrix");
    BigInt t = m.trace();
    if (t == 0) return false;
    return 2 * int_val(t, p) < int_val(m.det(), p);
}

// -------------------------------------------------------------------------
// The Padic-valued form of a matrix, for applying to points.

struct PadicMobius {
    Padic a, b, c, d;

    ProjPoint apply(const ProjPoint& z) const {
        if (z.is_infinity()) {
            if (c.is_zero()) return ProjPoint::infinity();
            return ProjPoint::affine(a / c);
        }
        Padic num = a * z.value() + b;
        Padic den = c * z.value() + d;
        if (den.is_zero()) {
            if (den.from_cancellation())
                throw precision_error("point indistinguishable from the pole");
            return ProjPoint::infinity();
        }
        return ProjPoint::affine(num / den);
    }

    // Preimage of infinity.
    ProjPoint pole() const {
        if (c.is_zero()) return ProjPoint::infinity();
        return ProjPoint::affine(-(d / c));
    }
};

inline PadicMobius to_padic(const Mobius& m, long long p, int digits) {
    auto conv = [&](const BigInt& e) { return Padic::from_rational(e, 1, p, digits); };
    return PadicMobius{conv(m.a()), conv(m.b()), conv(m.c()), conv(m.d())};
}

inline ProjPoint apply(const Mobius& m, const ProjPoint& z, long long p, int digits) {
    return to_padic(m, p, digits).apply(z);
}

// -------------------------------------------------------------------------
// Eigenvalues and fixed points of a hyperbolic matrix. Distinct Newton
// slopes force both roots into Q_p; lambda1 is the eigenvalue of smaller
// valuation (larger absolute value) and its fixed point attracts iteration.

struct EigenData {
    Padic lambda1;     // val(lambda1) = val(trace)
    Padic lambda2;     // val(lambda2) = val(det) - val(trace)
    ProjPoint fixed1;  // attracting fixed point
    ProjPoint fixed2;  // repelling fixed point
};

inline EigenData eigen_data(const Mobius& m, long long p, int digits) {
    if (!is_hyperbolic(m, p)) throw math_error("eigen_data: matrix is not hyperbolic");
    Padic t = Padic::from_rational(m.trace(), 1, p, digits);
    Padic det = Padic::from_rational(m.det(), 1, p, digits);

    // Hensel/Newton for the root of x^2 - t x + det with val = val(t);
    // starting at x = t puts the residual below the square of f'(t).
    Padic x = t;
    for (int it = 0; it < 64; ++it) {
        Padic f = x * x - t * x + det;
        if (f.is_zero()) break;
        Padic fp = x + x - t;
        Padic step = f / fp;
        x = x - step;
        if (step.val() - x.val() > 2 * digits) break;
    }
    Padic l1 = x;
    Padic l2 = det / l1;

    auto fixed_for = [&](const Padic& l) -> ProjPoint {
        if (m.c() != 0) {
            Padic c = Padic::from_rational(m.c(), 1, p, digits);
            Padic d = Padic::from_rational(m.d(), 1, p, digits);
            return ProjPoint::affine((l - d) / c);
        }
        // Triangular: eigenvalue a fixes infinity, eigenvalue d fixes
        // b/(d - a).
        Padic a = Padic::from_rational(m.a(), 1, p, digits);
        if (l.same_value(a)) return ProjPoint::infinity();
        Padic b = Padic::from_rational(m.b(), 1, p, digits);
        Padic d = Padic::from_rational(m.d(), 1, p, digits);
        return ProjPoint::affine(b / (d - a));
    };

    return EigenData{l1, l2, fixed_for(l1), fixed_for(l2)};
}

// -------------------------------------------------------------------------
// Reduced words in a free group / free product.
//
// A word is the sequence h_1 h_2 ... h_k acting by h_k first:
// w(z) = h_1(h_2(...h_k(z))). Letters are signed generator indices
// +-(i+1) for Schottky groups; the free-product enumeration uses its own
// alphabet with every letter an involution.

using Word = std::vector<int>;

inline bool is_reduced_word(const Word& w) {
    for (size_t i = 0; i + 1 < w.size(); ++i)
        if (w[i] == -w[i + 1]) return false;
    return true;
}

inline Word reduce_word(const Word& w) {
    Word out;
    for (int letter : w) {
        if (!out.empty() && out.back() == -letter)
            out.pop_back();
        else
            out.push_back(letter);
    }
    return out;
}

inline Word inverse_word(const Word& w) {
    Word out(w.rbegin(), w.rend());
    for (int& l : out) l = -l;
    return out;
}

inline Mobius word_to_matrix(const Word& w, const std::vector<Mobius>& gens) {
    Mobius m;
    for (int letter : w) {
        int i = (letter > 0 ? letter : -letter) - 1;
        if (i < 0 || static_cast<size_t>(i) >= gens.size())
            throw math_error("word letter out of range");
        m = m * (letter > 0 ? gens[i] : gens[i].inverse());
    }
    return m;
}

inline std::string word_str(const Word& w) {
    std::string s = "[";
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(w[i]);
    }
    return s + "]";
}

// Number of reduced words of length <= m over g free generators:
// 1 + sum_{k=1}^m 2g (2g-1)^{k-1}.
inline unsigned long long count_reduced_words(int g, int m) {
    unsigned long long total = 1, layer = 1;
    for (int k = 1; k <= m; ++k) {
        layer *= (k == 1) ? 2ull * g : 2ull * g - 1;
        total += layer;
    }
    return total;
}

// Depth-first enumeration of all reduced words of length <= m, the empty
// word first, children visited in letter order +1,-1,+2,-2,...  Words are
// extended on the left, so each step prepends one generator; the callback
// sees the full word h_1...h_k.
inline void for_each_reduced_word(int g, int m, const std::function<void(const Word&)>& visit) {
    Word w;
    visit(w);
    std::function<void()> rec = [&]() {
        if (static_cast<int>(w.size()) >= m) return;
        for (int i = 1; i <= g; ++i) {
            for (int letter : {i, -i}) {
                if (!w.empty() && w.front() == -letter) continue;
                w.insert(w.begin(), letter);
                visit(w);
                rec();
                w.erase(w.begin());
            }
        }
    };
    rec();
}

inline std::vector<Word> enumerate_words(int g, int m) {
    std::vector<Word> out;
    for_each_reduced_word(g, m, [&](const Word& w) { out.push_back(w); });
    return out;
}

// Cross-ratio (a,b;c,d) = (a-c)(b-d) / ((a-d)(b-c)) for finite points.
inline Padic cross_ratio(const Padic& a, const Padic& b, const Padic& c, const Padic& d) {
    return ((a - c) * (b - d)) / ((a - d) * (b - c));
}

} // namespace mumford
