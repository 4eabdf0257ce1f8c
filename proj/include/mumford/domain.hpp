#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mumford/berkovich.hpp"
#include "mumford/errors.hpp"
#include "mumford/padic.hpp"
#include "mumford/proj.hpp"
#include "mumford/rat.hpp"

namespace mumford {

// -------------------------------------------------------------------------
// A good fundamental domain: the complement of 2g open balls
// B_1..B_g, B_1'..B_g' with disjoint closures, where
// gamma_i(P^1 \ B_i') = B_i+ and gamma_i^{-1}(P^1 \ B_i) = B_i'+.

struct GoodDomain {
    long long p = 3;
    std::vector<Mobius> generators;      // gamma_1..gamma_g
    std::vector<Ball> balls;             // B_1..B_g, B_1'..B_g' (open)
    std::vector<Word> generator_words;   // the gamma_i as words in the user's inputs

    int genus() const { return static_cast<int>(generators.size()); }
    const Ball& b(int i) const { return balls[i]; }
    const Ball& bprime(int i) const { return balls[genus() + i]; }

    BerkPoint gauss_point(int ball_index) const {
        return BerkPoint(balls[ball_index].center, balls[ball_index].q);
    }

    // c: minimum pairwise distance between the 2g Gaussian points.
    Rat min_pairwise_distance() const {
        Rat best(0);
        bool first = true;
        int n = static_cast<int>(balls.size());
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                Rat d = distance(gauss_point(i), gauss_point(j));
                if (first || d < best) { best = d; first = false; }
            }
        }
        return best;
    }

    // log_p of the minimum ball diameter is -max_radius_exp().
    Rat max_radius_exp() const {
        Rat best = balls[0].q;
        for (const Ball& b : balls) best = rat_max(best, b.q);
        return best;
    }

    bool contains(const ProjPoint& z) const {
        for (const Ball& b : balls)
            if (b.contains(z)) return false;
        return true;
    }
    bool interior_contains(const ProjPoint& z) const {
        for (const Ball& b : balls) {
            Ball closed = b;
            closed.closed = true;
            if (closed.contains(z)) return false;
        }
        return true;
    }
};

struct DomainCheck {
    bool ok = true;
    std::string failure;
};

namespace detail {
// Closed balls in the ultrametric world are nested or disjoint.
inline bool closed_balls_disjoint(const Ball& x, const Ball& y) {
    Ball a = x, b = y;
    a.closed = b.closed = true;
    if (!a.is_affine() && !b.is_affine()) return false; // both contain infinity
    if (!a.is_affine()) std::swap(a, b);
    if (b.is_affine()) {
        Padic diff = a.center - b.center;
        if (diff.is_zero()) return false;
        return Rat(diff.val()) < rat_min(a.q, b.q);
    }
    // affine a+ disjoint from complement b+ <=> a+ inside the open excluded ball
    Padic diff = a.center - b.center;
    if (!(a.q > b.q)) return false;
    if (diff.is_zero()) return true;
    return Rat(diff.val()) > b.q;
}
} // namespace detail

// Verifies disjointness of the 2g closed balls and both mapping conditions.
inline DomainCheck check_good_domain(const std::vector<Mobius>& gens,
                                     const std::vector<Ball>& balls, long long p, int digits) {
    DomainCheck r;
    int g = static_cast<int>(gens.size());
    if (static_cast<int>(balls.size()) != 2 * g) {
        return {false, "expected 2g balls"};
    }
    for (int i = 0; i < 2 * g; ++i) {
        for (int j = i + 1; j < 2 * g; ++j) {
            if (!detail::closed_balls_disjoint(balls[i], balls[j]))
                return {false, "closed balls " + std::to_string(i) + " and " + std::to_string(j) +
                                   " are not disjoint"};
        }
    }
    for (int i = 0; i < g; ++i) {
        Ball outside_prime = balls[g + i].complement(); // closed
        Ball target = balls[i];
        target.closed = true;
        if (!ball_image(gens[i], outside_prime, p, digits).same_ball(target))
            return {false, "generator " + std::to_string(i + 1) +
                               " does not map the complement of B'_i onto B_i+"};
        Ball outside = balls[i].complement();
        Ball target_prime = balls[g + i];
        target_prime.closed = true;
        if (!ball_image(gens[i].inverse(), outside, p, digits).same_ball(target_prime))
            return {false, "generator " + std::to_string(i + 1) +
                               " inverse does not map the complement of B_i onto B'_i+"};
    }
    return r;
}

// -------------------------------------------------------------------------
// Reducing a point into a good fundamental domain. Repeatedly applies
// gamma_i / gamma_i^{-1} while the point sits in one of the open balls.

struct Reduction {
    ProjPoint point;
    Word word;     // gamma with point = gamma(input)
    Mobius gamma;
};

inline Reduction reduce_point(const GoodDomain& F, const ProjPoint& input, int digits,
                              int budget = 1000) {
    ProjPoint z = input;
    Word word;
    Mobius gamma;
    int g = F.genus();
    for (int step = 0; step < budget; ++step) {
        int hit = -1;
        for (int i = 0; i < 2 * g && hit < 0; ++i)
            if (F.balls[i].contains(z)) hit = i;
        if (hit < 0) {
            Reduction r{z, word, gamma};
            return r;
        }
        // in B_i: pull back by gamma_i^{-1}; in B_i': push by gamma_i
        int i = hit % g;
        bool primed = hit >= g;
        const Mobius& m = primed ? F.generators[i] : F.generators[i].inverse();
        z = apply(m, z, F.p, digits);
        word.insert(word.begin(), primed ? (i + 1) : -(i + 1));
        gamma = (primed ? F.generators[i] : F.generators[i].inverse()) * gamma;
    }
    throw math_error("reduction did not terminate: possible limit point");
}

// -------------------------------------------------------------------------
// The agent: the finite subtree spanned by an orbit prefix Gamma_m * a,
// its vertices (branch points), tree edges, and the partial quotient map
// given by single-generator identifications.

struct Agent {
    long long p = 3;
    int digits = 20;
    int genus = 0;
    std::vector<Mobius> gens;
    std::vector<BerkPoint> vertices;             // sorted canonically
    std::vector<std::vector<int>> adj;
    std::vector<std::vector<int>> ident;         // [v][letter] -> vertex or -1
    std::unordered_map<std::string, int> by_key;

    // letters indexed 0..2g-1 as +1,-1,+2,-2,...
    static int letter_index(int letter) {
        int i = (letter > 0 ? letter : -letter) - 1;
        return 2 * i + (letter > 0 ? 0 : 1);
    }
    const Mobius& letter_matrix(int letter_idx) const { return mats_[letter_idx]; }

    int vertex_of(const BerkPoint& pt) const {
        auto it = by_key.find(pt.key());
        return it == by_key.end() ? -1 : it->second;
    }

    std::vector<Mobius> mats_; // cached signed-generator matrices
};

// Orbit of the base points under all reduced words of length <= m.
inline std::vector<ProjPoint> orbit_points(const std::vector<Mobius>& gens, int m,
                                           const std::vector<ProjPoint>& base, long long p,
                                           int digits) {
    std::vector<PadicMobius> pm;
    for (const Mobius& g : gens) {
        pm.push_back(to_padic(g, p, digits));
        pm.push_back(to_padic(g.inverse(), p, digits));
    }
    std::vector<ProjPoint> out;
    std::unordered_map<std::string, bool> seen;
    auto push = [&](const ProjPoint& z) {
        std::string k = z.abs_key(digits);
        if (seen.emplace(k, true).second) out.push_back(z);
    };
    // depth-first over words, extending on the left
    std::function<void(const ProjPoint&, int, int)> rec = [&](const ProjPoint& z, int first_letter,
                                                              int depth) {
        if (depth >= m) return;
        int g = static_cast<int>(gens.size());
        for (int i = 1; i <= g; ++i) {
            for (int letter : {i, -i}) {
                if (first_letter == -letter) continue;
                ProjPoint nz = pm[Agent::letter_index(letter)].apply(z);
                push(nz);
                rec(nz, letter, depth + 1);
            }
        }
    };
    for (const ProjPoint& b : base) {
        push(b);
        rec(b, 0, 0);
    }
    return out;
}

inline Agent build_agent(const std::vector<Mobius>& gens, int m, const std::vector<ProjPoint>& base,
                         long long p, int digits) {
    Agent ag;
    ag.p = p;
    ag.digits = digits;
    ag.genus = static_cast<int>(gens.size());
    ag.gens = gens;
    for (const Mobius& g : gens) {
        ag.mats_.push_back(g);
        ag.mats_.push_back(g.inverse());
    }

    std::vector<ProjPoint> orbit = orbit_points(gens, m, base, p, digits);
    std::vector<Padic> pts;
    for (const ProjPoint& z : orbit)
        if (!z.is_infinity()) pts.push_back(z.value());
    if (pts.size() < 2) return ag; // no branch structure yet

    // Sort by digit strings from the lowest valuation; adjacent meets then
    // enumerate all pairwise meets.
    long long floor_v = 0;
    for (const Padic& x : pts) floor_v = std::min(floor_v, x.val());
    long long depth = digits + (floor_v < 0 ? -floor_v : 0);
    auto key_of = [&](const Padic& x) {
        std::string s;
        for (int d : x.digits_in_range(floor_v, floor_v + depth))
            s += static_cast<char>('0' + d);
        std::reverse(s.begin(), s.end()); // most significant digit first? no:
        return s;
    };
    // lexicographic order on digits with increasing powers left-to-right
    std::vector<std::pair<std::string, size_t>> keyed;
    keyed.reserve(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        std::string s;
        for (int d : pts[i].digits_in_range(floor_v, floor_v + depth))
            s += static_cast<char>('0' + d);
        keyed.emplace_back(std::move(s), i);
    }
    std::sort(keyed.begin(), keyed.end());

    std::vector<BerkPoint> verts;
    auto add_vertex = [&](const BerkPoint& v) {
        for (const BerkPoint& w : verts)
            if (w == v) return;
        verts.push_back(v);
    };
    for (size_t i = 0; i + 1 < keyed.size(); ++i) {
        const Padic& x = pts[keyed[i].second];
        const Padic& y = pts[keyed[i + 1].second];
        Padic diff = x - y;
        if (diff.is_zero()) continue;
        add_vertex(BerkPoint(x, Rat(diff.val())));
    }
    if (verts.empty()) return ag;
    std::sort(verts.begin(), verts.end());
    ag.vertices = verts;
    ag.adj.assign(verts.size(), {});
    for (size_t i = 0; i < verts.size(); ++i) ag.by_key[verts[i].key()] = static_cast<int>(i);

    // Parent of v: the deepest strictly-containing vertex ball.
    std::vector<Rat> qs;
    for (const BerkPoint& v : verts) qs.push_back(v.q());
    for (size_t i = 0; i < verts.size(); ++i) {
        int parent = -1;
        for (size_t j = 0; j < verts.size(); ++j) {
            if (i == j) continue;
            if (!(qs[j] < qs[i])) continue;
            // does ball j contain ball i's center?
            Padic diff = verts[i].center() - verts[j].center();
            if (!diff.is_zero() && Rat(diff.val()) < qs[j]) continue;
            if (parent < 0 || qs[parent] < qs[j]) parent = static_cast<int>(j);
        }
        if (parent >= 0) {
            ag.adj[i].push_back(parent);
            ag.adj[parent].push_back(static_cast<int>(i));
        }
    }

    // Single-generator identifications between vertices.
    ag.ident.assign(verts.size(), std::vector<int>(2 * ag.genus, -1));
    for (size_t v = 0; v < verts.size(); ++v) {
        for (int li = 0; li < 2 * ag.genus; ++li) {
            BerkPoint img = point_image(ag.mats_[li], verts[v], digits);
            ag.ident[v][li] = ag.vertex_of(img);
        }
    }
    return ag;
}

// -------------------------------------------------------------------------
// Good fundamental domains in the tree.

struct BoundaryPair {
    int unprimed_in = -1, unprimed_out = -1; // (R_i, Q_i)
    int primed_in = -1, primed_out = -1;     // (R_i', Q_i')
    Mobius pairing;                          // a_i with a_i(R') = Q, a_i(Q') = R
    Word pairing_word;                       // in the input generators
};

struct TreeDomain {
    long long p = 3;
    int digits = 20;
    std::vector<Mobius> gens; // the input generators
    Agent agent;
    std::vector<int> V;
    std::vector<std::pair<int, int>> E;
    std::vector<BoundaryPair> I;

    std::vector<Mobius> pairing_generators() const {
        std::vector<Mobius> a;
        for (const auto& pr : I) a.push_back(pr.pairing);
        return a;
    }
};

namespace detail {

// Shortest identification word sending vertex `from` to vertex `to`,
// as a sequence of letters applied left-to-right (first letter first).
inline std::optional<std::vector<int>> ident_path(const Agent& ag, int from, int to,
                                                  int max_depth) {
    if (from == to) return std::vector<int>{};
    std::vector<int> prev_vertex(ag.vertices.size(), -2), prev_letter(ag.vertices.size(), 0);
    std::deque<std::pair<int, int>> queue{{from, 0}};
    prev_vertex[from] = -1;
    while (!queue.empty()) {
        auto [v, depth] = queue.front();
        queue.pop_front();
        if (depth >= max_depth) continue;
        for (int li = 0; li < 2 * ag.genus; ++li) {
            int w = ag.ident[v][li];
            if (w < 0 || prev_vertex[w] != -2) continue;
            prev_vertex[w] = v;
            prev_letter[w] = li;
            if (w == to) {
                std::vector<int> letters;
                for (int cur = w; prev_vertex[cur] != -1; cur = prev_vertex[cur])
                    letters.push_back(prev_letter[cur]);
                std::reverse(letters.begin(), letters.end());
                return letters;
            }
            queue.push_back({w, depth + 1});
        }
    }
    return std::nullopt;
}

inline int apply_letters(const Agent& ag, int v, const std::vector<int>& letters) {
    for (int li : letters) {
        v = ag.ident[v][li];
        if (v < 0) return -1;
    }
    return v;
}

inline int signed_letter(int letter_index) {
    int gen = letter_index / 2 + 1;
    return letter_index % 2 == 0 ? gen : -gen;
}

} // namespace detail

// The burning loop: grow V and E outward from a seed vertex; when a frontier
// edge is conjugate to another frontier edge, pair them into I and record
// the conjugating element.
inline TreeDomain construct_tree_domain(const Agent& agent, int seed) {
    TreeDomain D;
    D.p = agent.p;
    D.digits = agent.digits;
    D.gens = agent.gens;
    D.agent = agent;
    if (agent.vertices.empty()) throw math_error("agent insufficient, increase m");

    struct Frontier {
        int in, out;
    };
    std::vector<bool> burned(agent.vertices.size(), false);
    std::deque<Frontier> frontier;
    burned[seed] = true;
    D.V.push_back(seed);
    std::vector<Frontier> open;

    auto try_pair = [&](const Frontier& cand) -> bool {
        for (size_t fi = 0; fi < open.size(); ++fi) {
            const Frontier& f = open[fi];
            auto letters = detail::ident_path(agent, cand.out, f.in, 64);
            if (!letters) continue;
            if (detail::apply_letters(agent, cand.in, *letters) != f.out) continue;
            // matched: pairing word maps cand.out->f.in, cand.in->f.out
            BoundaryPair pr;
            pr.primed_in = cand.in;
            pr.primed_out = cand.out;
            pr.unprimed_in = f.in;
            pr.unprimed_out = f.out;
            Word w;
            Mobius a;
            for (int li : *letters) {
                int sl = detail::signed_letter(li);
                w.insert(w.begin(), sl);
                a = agent.mats_[li] * a;
            }
            pr.pairing = a;
            pr.pairing_word = reduce_word(w);
            D.I.push_back(pr);
            open.erase(open.begin() + static_cast<long>(fi));
            return true;
        }
        return false;
    };

    for (int nb : agent.adj[seed]) {
        Frontier cand{seed, nb};
        if (!try_pair(cand)) open.push_back(cand);
    }
    // breadth-first burning, deterministic order
    while (true) {
        std::optional<Frontier> next;
        for (const Frontier& f : open)
            if (!burned[f.out]) { next = f; break; }
        if (!next) break;
        open.erase(std::find_if(open.begin(), open.end(), [&](const Frontier& f) {
            return f.in == next->in && f.out == next->out;
        }));
        D.E.emplace_back(next->in, next->out);
        burned[next->out] = true;
        D.V.push_back(next->out);
        for (int nb : agent.adj[next->out]) {
            if (nb == next->in) continue;
            Frontier cand{next->out, nb};
            if (!try_pair(cand)) open.push_back(cand);
        }
    }
    if (static_cast<int>(D.I.size()) != agent.genus)
        throw math_error("agent insufficient, increase m");
    return D;
}

// Certification: the paper-side checks that S really is a good fundamental
// domain in the tree and that the pairing elements generate the whole group.
inline bool certify_tree_domain(const std::vector<Mobius>& gens, const TreeDomain& D,
                                int reduce_budget = 1000) {
    const Agent& ag = D.agent;
    int g = static_cast<int>(gens.size());
    if (static_cast<int>(D.I.size()) != g) return false;

    // S connected: E must span V
    {
        std::map<int, std::vector<int>> adj;
        for (auto [u, v] : D.E) {
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        std::vector<int> stack{D.V[0]};
        std::map<int, bool> seen{{D.V[0], true}};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[v])
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
        }
        for (int v : D.V)
            if (!seen.count(v)) return false;
    }

    std::vector<bool> in_V(ag.vertices.size(), false);
    for (int v : D.V) in_V[v] = true;
    for (const BoundaryPair& pr : D.I) {
        // boundary edges are terminal: inner endpoint in V, outer not
        if (!in_V[pr.unprimed_in] || !in_V[pr.primed_in]) return false;
        if (in_V[pr.unprimed_out] || in_V[pr.primed_out]) return false;
        // pairing condition a_i(R', Q') = (Q, R)
        BerkPoint imgR = point_image(pr.pairing, ag.vertices[pr.primed_in], D.digits);
        BerkPoint imgQ = point_image(pr.pairing, ag.vertices[pr.primed_out], D.digits);
        if (imgR != ag.vertices[pr.unprimed_out]) return false;
        if (imgQ != ag.vertices[pr.unprimed_in]) return false;
    }

    // pick P: a vertex incident to no boundary edge, else the midpoint of
    // the longest interior edge, else the seed itself
    std::vector<bool> touches_boundary(ag.vertices.size(), false);
    for (const BoundaryPair& pr : D.I) {
        touches_boundary[pr.unprimed_in] = true;
        touches_boundary[pr.primed_in] = true;
    }
    BerkPoint P;
    bool found = false;
    for (int v : D.V)
        if (!touches_boundary[v]) {
            P = ag.vertices[v];
            found = true;
            break;
        }
    if (!found && !D.E.empty()) {
        auto longest = D.E[0];
        Rat len(-1);
        for (auto e : D.E) {
            Rat l = distance(ag.vertices[e.first], ag.vertices[e.second]);
            if (l > len) { len = l; longest = e; }
        }
        const BerkPoint& a = ag.vertices[longest.first];
        const BerkPoint& b = ag.vertices[longest.second];
        // midpoint along the nested pair
        const BerkPoint& deep = a.q() > b.q() ? a : b;
        Rat mid = (a.q() + b.q()) / Rat(2);
        P = BerkPoint(deep.center(), mid);
        found = true;
    }
    if (!found) P = ag.vertices[D.V[0]];

    // beyond-boundary test helpers
    auto beyond = [&](const BerkPoint& X, int Rv, int Qv) {
        const BerkPoint& R = ag.vertices[Rv];
        const BerkPoint& Q = ag.vertices[Qv];
        Rat dRX = distance(R, X), dRQ = distance(R, Q), dQX = distance(Q, X);
        return dRX == dRQ + dQX; // X at or past Q on the far side
    };

    for (int letter = 1; letter <= g; ++letter) {
        for (int sign : {+1, -1}) {
            Mobius h = sign > 0 ? gens[letter - 1] : gens[letter - 1].inverse();
            BerkPoint X = point_image(h, P, D.digits);
            bool back = false;
            for (int step = 0; step < reduce_budget; ++step) {
                if (X == P) { back = true; break; }
                bool moved = false;
                for (const BoundaryPair& pr : D.I) {
                    if (beyond(X, pr.unprimed_in, pr.unprimed_out)) {
                        X = point_image(pr.pairing.inverse(), X, D.digits);
                        moved = true;
                        break;
                    }
                    if (beyond(X, pr.primed_in, pr.primed_out)) {
                        X = point_image(pr.pairing, X, D.digits);
                        moved = true;
                        break;
                    }
                }
                if (!moved) break;
            }
            if (!back) return false;
        }
    }
    return true;
}

// From a certified tree domain to the ball form: each boundary edge joins
// nested balls B(a, r)+ in B(a, R)+; the open midpoint ball B(a, sqrt(rR))
// realizes the good fundamental domain.
inline GoodDomain tree_domain_to_balls(const TreeDomain& D) {
    const Agent& ag = D.agent;
    GoodDomain F;
    F.p = D.p;
    int g = static_cast<int>(D.I.size());
    std::vector<Ball> primed;
    for (const BoundaryPair& pr : D.I) {
        auto midpoint_ball = [&](int inner_v, int outer_v) {
            const BerkPoint& R = ag.vertices[inner_v];
            const BerkPoint& Q = ag.vertices[outer_v];
            if (!(Q.q() > R.q()))
                throw math_error("boundary edge points toward infinity; apply a coordinate change");
            Padic diff = Q.center() - R.center();
            if (!diff.is_zero() && Rat(diff.val()) < R.q())
                throw math_error("boundary edge is not nested; apply a coordinate change");
            return Ball::affine_open(Q.center(), (R.q() + Q.q()) / Rat(2));
        };
        F.generators.push_back(pr.pairing);
        F.generator_words.push_back(pr.pairing_word);
        F.balls.push_back(midpoint_ball(pr.unprimed_in, pr.unprimed_out));
        primed.push_back(midpoint_ball(pr.primed_in, pr.primed_out));
    }
    for (int i = 0; i < g; ++i) F.balls.push_back(primed[i]);
    DomainCheck chk = check_good_domain(F.generators, F.balls, F.p, D.digits);
    if (!chk.ok) throw math_error("certified domain failed the ball-form check: " + chk.failure);
    return F;
}

// -------------------------------------------------------------------------
// Putting arbitrary generators into good position / the Schottky test.

struct SchottkyVerdict {
    enum class Kind { good_position, relation, non_hyperbolic, inconclusive };
    Kind kind = Kind::inconclusive;
    GoodDomain domain;   // good_position
    int m_used = 0;
    Word witness;        // relation / non_hyperbolic
    Mobius witness_matrix;
    int max_m_tried = 0; // inconclusive
};

namespace detail {

// Hyperbolicity pre-check over all nonempty reduced words of length <= m.
// Returns a verdict for the first offending word, scanning by length.
inline std::optional<SchottkyVerdict> hyperbolicity_scan(const std::vector<Mobius>& gens, int m,
                                                         long long p) {
    std::optional<SchottkyVerdict> bad;
    int g = static_cast<int>(gens.size());
    std::vector<std::pair<Word, Mobius>> layer, next;
    layer.emplace_back(Word{}, Mobius());
    for (int len = 1; len <= m && !bad; ++len) {
        next.clear();
        for (const auto& [w, mat] : layer) {
            for (int i = 1; i <= g && !bad; ++i) {
                for (int letter : {i, -i}) {
                    if (!w.empty() && w.back() == -letter) continue;
                    Word nw = w;
                    nw.push_back(letter);
                    Mobius nm = mat * (letter > 0 ? gens[i - 1] : gens[i - 1].inverse());
                    if (nm.is_identity()) {
                        SchottkyVerdict v;
                        v.kind = SchottkyVerdict::Kind::relation;
                        v.witness = nw;
                        v.witness_matrix = nm;
                        bad = v;
                        break;
                    }
                    if (!is_hyperbolic(nm, p)) {
                        SchottkyVerdict v;
                        v.kind = SchottkyVerdict::Kind::non_hyperbolic;
                        v.witness = nw;
                        v.witness_matrix = nm;
                        bad = v;
                        break;
                    }
                    next.emplace_back(std::move(nw), std::move(nm));
                }
            }
            if (bad) break;
        }
        layer.swap(next);
    }
    return bad;
}

// Direct axis construction for a single hyperbolic generator: the orbit of
// a fixed point is a single point, so the tree domain is cut out of the
// axis between the two fixed points.
inline TreeDomain genus1_tree_domain(const Mobius& gen, long long p, int digits) {
    EigenData e = eigen_data(gen, p, digits);
    if (e.fixed1.is_infinity() || e.fixed2.is_infinity())
        throw math_error("fixed point at infinity; apply a coordinate change");
    long long t = e.lambda2.val() - e.lambda1.val();
    Padic fa = e.fixed1.value(), fr = e.fixed2.value();
    Padic diff = fa - fr;
    if (diff.is_zero()) throw precision_error("fixed points indistinguishable; raise precision");
    long long s = diff.val();

    Agent ag;
    ag.p = p;
    ag.digits = digits;
    ag.genus = 1;
    ag.gens = {gen};
    ag.mats_ = {gen, gen.inverse()};
    // axis points X_{-1}..X_t; X_j (j>=0) shrinks toward the attracting
    // fixed point, X_{-1} toward the repelling one
    std::vector<BerkPoint> verts;
    verts.emplace_back(fr, Rat(s + 1)); // X_{ -1 }
    for (long long j = 0; j <= t; ++j) verts.emplace_back(fa, Rat(s + j));
    ag.vertices = verts;
    ag.adj.assign(verts.size(), {});
    for (size_t i = 0; i + 1 < verts.size(); ++i) {
        size_t u = i == 0 ? 1 : i + 1; // X_{-1} attaches to X_0
        size_t v = i == 0 ? 0 : i;
        // chain: X_{-1} - X_0 - X_1 - ... - X_t
        ag.adj[u].push_back(static_cast<int>(v));
        ag.adj[v].push_back(static_cast<int>(u));
    }
    for (size_t i = 0; i < verts.size(); ++i) ag.by_key[verts[i].key()] = static_cast<int>(i);
    ag.ident.assign(verts.size(), std::vector<int>(2, -1));
    for (size_t v = 0; v < verts.size(); ++v) {
        for (int li = 0; li < 2; ++li)
            ag.ident[v][li] = ag.vertex_of(point_image(ag.mats_[li], verts[v], digits));
    }

    TreeDomain D;
    D.p = p;
    D.digits = digits;
    D.gens = {gen};
    D.agent = ag;
    // V = X_0..X_{t-1} (indices 1..t in verts), E consecutive,
    // I: unprimed (X_{t-1}, X_t), primed (X_0, X_{-1})
    for (long long j = 0; j <= t - 1; ++j) D.V.push_back(static_cast<int>(j + 1));
    for (long long j = 0; j + 1 <= t - 1; ++j)
        D.E.emplace_back(static_cast<int>(j + 1), static_cast<int>(j + 2));
    BoundaryPair pr;
    pr.unprimed_in = static_cast<int>(t);     // X_{t-1}
    pr.unprimed_out = static_cast<int>(t + 1); // X_t
    pr.primed_in = 1;                          // X_0
    pr.primed_out = 0;                         // X_{-1}
    pr.pairing = gen;
    pr.pairing_word = {1};
    D.I.push_back(pr);
    return D;
}

} // namespace detail

struct GoodPositionOptions {
    int max_m = 12;
    int base_digits = 0; // 0: derive from the generators
};

inline SchottkyVerdict good_position(const std::vector<Mobius>& gens, long long p,
                                     GoodPositionOptions opt = {}) {
    if (gens.empty()) throw math_error("need at least one generator");
    int g = static_cast<int>(gens.size());

    // translation lengths bound how deep orbit points sink per word letter
    long long max_t = 1;
    for (const Mobius& m : gens) {
        if (m.is_identity() || !is_hyperbolic(m, p)) continue;
        long long vd = int_val(m.det(), p);
        long long vt = m.trace() == 0 ? vd : int_val(m.trace(), p);
        max_t = std::max(max_t, vd - 2 * vt >= 0 ? vd - 2 * vt + 2 * vt - vt * 2 + (vd - vt) - vt
                                                 : 1);
    }
    // val(lambda2) - val(lambda1) = val(det) - 2 val(trace)
    max_t = 1;
    for (const Mobius& m : gens) {
        if (m.is_identity()) continue;
        if (m.trace() == 0) continue;
        long long span = int_val(m.det(), p) - 2 * int_val(m.trace(), p);
        max_t = std::max(max_t, span);
    }

    for (int m = 1; m <= opt.max_m; ++m) {
        if (auto bad = detail::hyperbolicity_scan(gens, m, p)) return *bad;

        int digits = opt.base_digits > 0 ? opt.base_digits
                                         : static_cast<int>(32 + 2 * (m + 2) * max_t);
        for (int attempt = 0; attempt < 3; ++attempt) {
            try {
                working_precision_scope scope(digits);
                TreeDomain D;
                if (g == 1) {
                    D = detail::genus1_tree_domain(gens[0], p, digits);
                } else {
                    // orbit base: the finite fixed points of the first generator
                    EigenData e = eigen_data(gens[0], p, digits);
                    std::vector<ProjPoint> base;
                    if (!e.fixed1.is_infinity()) base.push_back(e.fixed1);
                    if (base.empty() && !e.fixed2.is_infinity()) base.push_back(e.fixed2);
                    if (base.empty()) throw math_error("both fixed points at infinity");
                    Agent ag = build_agent(gens, m, base, p, digits);
                    if (ag.vertices.empty()) throw math_error("agent insufficient, increase m");

                    // seed: the agent vertex nearest the meet of the fixed
                    // points of the first two generators
                    BerkPoint hull;
                    {
                        std::vector<BerkPoint> fixed_pts;
                        for (int i = 0; i < std::min(g, 2); ++i) {
                            EigenData ei = eigen_data(gens[i], p, digits);
                            if (!ei.fixed1.is_infinity())
                                fixed_pts.emplace_back(ei.fixed1.value(), Rat(digits));
                            if (!ei.fixed2.is_infinity())
                                fixed_pts.emplace_back(ei.fixed2.value(), Rat(digits));
                        }
                        hull = fixed_pts[0];
                        for (const BerkPoint& f : fixed_pts) hull = meet(hull, f);
                    }
                    int seed = 0;
                    Rat best = distance(ag.vertices[0], hull);
                    for (size_t v = 1; v < ag.vertices.size(); ++v) {
                        Rat d = distance(ag.vertices[v], hull);
                        if (d < best) { best = d; seed = static_cast<int>(v); }
                    }
                    D = construct_tree_domain(ag, seed);
                }
                if (!certify_tree_domain(gens, D)) break; // try larger m
                GoodDomain F = tree_domain_to_balls(D);
                SchottkyVerdict v;
                v.kind = SchottkyVerdict::Kind::good_position;
                v.domain = F;
                v.m_used = m;
                return v;
            } catch (const precision_error&) {
                digits *= 2;
                continue;
            } catch (const math_error&) {
                break; // agent insufficient or degenerate: try larger m
            }
        }
    }
    SchottkyVerdict v;
    v.kind = SchottkyVerdict::Kind::inconclusive;
    v.max_m_tried = opt.max_m;
    return v;
}

} // namespace mumford
