#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "mumford/errors.hpp"
#include "mumford/padic.hpp"
#include "mumford/proj.hpp"
#include "mumford/rat.hpp"

namespace mumford {

// -------------------------------------------------------------------------
// Balls in P^1(Q_p). radius = p^{-q}; q is rational with denominator <= 2 so
// that midpoint balls of odd-length edges are representable without p-adic
// square roots. A complement ball contains infinity and excludes the affine
// ball around the stored center.

struct Ball {
    enum class Kind { affine, complement };

    Kind kind = Kind::affine;
    bool closed = false;
    Padic center; // finite
    Rat q;

    static Ball affine_open(Padic c, Rat q) { return Ball{Kind::affine, false, std::move(c), q}; }
    static Ball affine_closed(Padic c, Rat q) { return Ball{Kind::affine, true, std::move(c), q}; }

    bool is_affine() const { return kind == Kind::affine; }

    // P^1 minus this ball.
    Ball complement() const {
        return Ball{is_affine() ? Kind::complement : Kind::affine, !closed, center, q};
    }

    bool contains(const ProjPoint& z) const {
        if (z.is_infinity()) return kind == Kind::complement;
        Padic diff = z.value() - center;
        if (diff.is_zero()) return is_affine(); // z == center
        Rat v(diff.val());
        if (is_affine()) return closed ? v >= q : v > q;
        return closed ? v <= q : v < q;
    }

    // Set equality within the same kind and openness.
    bool same_ball(const Ball& o) const {
        if (kind != o.kind || closed != o.closed || q != o.q) return false;
        Padic diff = center - o.center;
        if (diff.is_zero()) return true;
        Rat v(diff.val());
        bool open_affine_part = is_affine() ? !closed : closed;
        return open_affine_part ? v > q : v >= q;
    }

    std::string str() const {
        std::string s = is_affine() ? "B(" : "P1\\B(";
        s += (center.is_zero() ? "0" : format_digits(center)) + ", p^-(" + q.str() + "))";
        return s + (closed ? "[closed]" : "[open]");
    }
};

inline bool affine_membership(const Ball& b, const ProjPoint& z) { return b.contains(z); }

// -------------------------------------------------------------------------
// Type-2 (and half-integer, type-3) points of the Berkovich line: closed
// balls B(c, p^{-q})+. The center is canonicalized modulo p^ceil(q) so equal
// points have identical encodings.

class BerkPoint {
public:
    BerkPoint() : q_(0) { center_ = Padic::zero(2); }

    BerkPoint(const Padic& center, Rat q) : q_(q) { center_ = canonical_center(center, q); }

    const Padic& center() const { return center_; }
    const Rat& q() const { return q_; }
    long long prime() const { return center_.prime(); }

    Ball closed_ball() const { return Ball::affine_closed(center_, q_); }

    bool same_point(const BerkPoint& o) const {
        if (q_ != o.q_) return false;
        Padic diff = center_ - o.center_;
        return diff.is_zero() || Rat(diff.val()) >= q_;
    }
    friend bool operator==(const BerkPoint& a, const BerkPoint& b) { return a.same_point(b); }
    friend bool operator!=(const BerkPoint& a, const BerkPoint& b) { return !(a == b); }

    std::string key() const {
        std::string s = q_.str() + "|";
        if (center_.is_zero()) return s + "0";
        long long hi = q_.ceil();
        if (center_.val() >= hi) return s + "0";
        s += std::to_string(center_.val()) + ":";
        for (int d : center_.digits_in_range(center_.val(), hi)) s += static_cast<char>('0' + d);
        return s;
    }

    // Deterministic order: by radius exponent, then canonical center key.
    friend bool operator<(const BerkPoint& a, const BerkPoint& b) {
        if (a.q_ != b.q_) return a.q_ < b.q_;
        return a.key() < b.key();
    }

    std::string str() const {
        return "B(" + (center_.is_zero() ? std::string("(0)") : format_digits(center_)) + ", p^-(" +
               q_.str() + "))+";
    }

private:
    static Padic canonical_center(const Padic& c, Rat q) {
        long long p = c.prime();
        long long hi = q.ceil();
        if (c.is_zero() || c.val() >= hi) return Padic::zero(p);
        BigInt u = 0;
        auto digits = c.digits_in_range(c.val(), hi);
        for (auto it = digits.rbegin(); it != digits.rend(); ++it) u = u * p + *it;
        return Padic::from_integer(p, u).shifted_by(c.val());
    }

    Padic center_;
    Rat q_;
};

// Smallest closed ball containing both: same center, radius raised to
// max(r1, r2, |c1 - c2|).
inline BerkPoint meet(const BerkPoint& a, const BerkPoint& b) {
    Padic diff = a.center() - b.center();
    Rat q = rat_min(a.q(), b.q());
    if (!diff.is_zero()) q = rat_min(q, Rat(diff.val()));
    return BerkPoint(a.center(), q);
}

// Path metric: log_p of the radius ratio through the meet.
inline Rat distance(const BerkPoint& a, const BerkPoint& b) {
    BerkPoint m = meet(a, b);
    return (a.q() - m.q()) + (b.q() - m.q());
}

// -------------------------------------------------------------------------
// Finite subtrees of the Berkovich line.

struct MetricTree {
    struct Edge {
        int u, v;
        Rat length;
    };

    std::vector<BerkPoint> vertices;
    std::vector<bool> leaf; // type-1 inputs realized as deep balls
    std::vector<Edge> edges;

    int find_vertex(const BerkPoint& p) const {
        for (size_t i = 0; i < vertices.size(); ++i)
            if (vertices[i] == p) return static_cast<int>(i);
        return -1;
    }

    Rat total_length() const {
        Rat t(0);
        for (const auto& e : edges) t = t + e.length;
        return t;
    }

    bool on_tree(const BerkPoint& x) const {
        for (const auto& e : edges) {
            Rat du = distance(vertices[e.u], x), dv = distance(vertices[e.v], x);
            if (du + dv == e.length) return true;
        }
        return !edges.empty() ? false : (!vertices.empty() && vertices[0] == x);
    }
};

// Union of all paths connecting the given points: vertex set = inputs plus
// all pairwise meets, edges between metric-adjacent vertices.
inline MetricTree span_tree(const std::vector<BerkPoint>& inputs,
                            const std::vector<bool>* input_is_leaf = nullptr) {
    MetricTree t;
    auto add = [&](const BerkPoint& p, bool lf) {
        for (size_t i = 0; i < t.vertices.size(); ++i)
            if (t.vertices[i] == p) return;
        t.vertices.push_back(p);
        t.leaf.push_back(lf);
    };
    for (size_t i = 0; i < inputs.size(); ++i)
        add(inputs[i], input_is_leaf ? (*input_is_leaf)[i] : false);
    size_t n_inputs = t.vertices.size();
    for (size_t i = 0; i < n_inputs; ++i)
        for (size_t j = i + 1; j < n_inputs; ++j) add(meet(t.vertices[i], t.vertices[j]), false);

    // Deterministic vertex order.
    std::vector<size_t> order(t.vertices.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t x, size_t y) { return t.vertices[x] < t.vertices[y]; });
    MetricTree out;
    for (size_t i : order) {
        out.vertices.push_back(t.vertices[i]);
        out.leaf.push_back(t.leaf[i]);
    }

    int n = static_cast<int>(out.vertices.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            Rat dij = distance(out.vertices[i], out.vertices[j]);
            bool adjacent = true;
            for (int k = 0; k < n && adjacent; ++k) {
                if (k == i || k == j) continue;
                Rat dik = distance(out.vertices[i], out.vertices[k]);
                Rat dkj = distance(out.vertices[k], out.vertices[j]);
                if (dik + dkj == dij && dik > Rat(0) && dkj > Rat(0)) adjacent = false;
            }
            if (adjacent && dij > Rat(0)) out.edges.push_back({i, j, dij});
        }
    }
    return out;
}

inline MetricTree span_tree_mixed(const std::vector<BerkPoint>& type2,
                                  const std::vector<ProjPoint>& leaves, long long leaf_depth) {
    std::vector<BerkPoint> pts = type2;
    std::vector<bool> is_leaf(pts.size(), false);
    for (const ProjPoint& z : leaves) {
        if (z.is_infinity())
            throw math_error("span_tree: infinity leaves are handled by a coordinate change");
        pts.emplace_back(z.value(), Rat(leaf_depth));
        is_leaf.push_back(true);
    }
    return span_tree(pts, &is_leaf);
}

// The point of T closest to z along the path from z into the tree.
inline BerkPoint retract(const ProjPoint& z, const MetricTree& t, long long depth) {
    if (t.vertices.empty()) throw math_error("retract: empty tree");
    if (z.is_infinity()) {
        // The path from infinity enters the tree at its largest ball.
        int best = 0;
        for (size_t i = 1; i < t.vertices.size(); ++i)
            if (t.vertices[i].q() < t.vertices[best].q()) best = static_cast<int>(i);
        return t.vertices[best];
    }
    BerkPoint zz(z.value(), Rat(depth));
    BerkPoint best = t.vertices[0];
    Rat best_d = distance(zz, best);
    auto consider = [&](const BerkPoint& c) {
        if (!t.on_tree(c)) return;
        Rat d = distance(zz, c);
        if (d < best_d) {
            best = c;
            best_d = d;
        }
    };
    for (const auto& v : t.vertices) consider(v);
    for (const auto& v : t.vertices) consider(meet(zz, v));
    return best;
}

// -------------------------------------------------------------------------
// Exact images of balls and Berkovich points under PGL(2, Q).

namespace detail {

// val(pole - c); the bool flags "pole at the center". Agreement through the
// whole working window counts as equality, consistent with the collapse
// convention of Padic subtraction.
inline std::pair<bool, long long> pole_offset(const PadicMobius& m, const Padic& c) {
    if (m.c.is_zero()) return {false, 0}; // pole at infinity
    Padic diff = -(m.d / m.c) - c;
    if (diff.is_zero()) return {true, 0};
    return {false, diff.val()};
}

} // namespace detail

// Image of the type-2/3 point B(c, p^-q)+ as a point; always a closed
// affine ball. When the pole lies in the closed ball we recenter at the
// pole, where the map reads A + B/(z - pole).
inline BerkPoint point_image(const Mobius& mob, const BerkPoint& P, int digits) {
    long long p = P.prime();
    PadicMobius m = to_padic(mob, p, digits);
    long long vdet = int_val(mob.det(), p);
    if (m.c.is_zero()) {
        // z -> (az + b)/d scales radii by |a/d|
        long long scale = m.a.val() - m.d.val();
        return BerkPoint(m.apply(ProjPoint::affine(P.center())).value(), P.q() + Rat(scale));
    }
    auto [at_center, t] = detail::pole_offset(m, P.center());
    long long vc = m.c.val();
    if (at_center || Rat(t) >= P.q()) {
        // pole inside the closed ball: recenter there
        Padic A = m.a / m.c;
        Rat vB = Rat(vdet - 2 * vc);
        return BerkPoint(A, vB - P.q());
    }
    Padic image_center = m.apply(ProjPoint::affine(P.center())).value();
    Rat qq = Rat(vdet) + P.q() - Rat(2 * (vc + t));
    return BerkPoint(image_center, qq);
}

// Exact set image of a ball. Open balls map to open balls and closed balls
// to closed balls; the side of infinity flips when the ball covers the pole.
inline Ball ball_image(const Mobius& mob, const Ball& B, long long p, int digits) {
    if (!B.is_affine()) return ball_image(mob, B.complement(), p, digits).complement();

    PadicMobius m = to_padic(mob, p, digits);
    long long vdet = int_val(mob.det(), p);
    if (m.c.is_zero()) {
        long long scale = m.a.val() - m.d.val();
        Padic cimg = m.apply(ProjPoint::affine(B.center)).value();
        return Ball{Ball::Kind::affine, B.closed, cimg, B.q + Rat(scale)};
    }
    auto [at_center, t] = detail::pole_offset(m, B.center);
    long long vc = m.c.val();
    bool pole_inside = at_center || (B.closed ? Rat(t) >= B.q : Rat(t) > B.q);
    if (pole_inside) {
        Padic A = m.a / m.c;
        Rat vB = Rat(vdet - 2 * vc);
        return Ball{Ball::Kind::complement, B.closed, A, vB - B.q};
    }
    Padic cimg = m.apply(ProjPoint::affine(B.center)).value();
    Rat qq = Rat(vdet) + B.q - Rat(2 * vc) - Rat(2) * rat_min(Rat(t), B.q);
    return Ball{Ball::Kind::affine, B.closed, cimg, qq};
}

} // namespace mumford
