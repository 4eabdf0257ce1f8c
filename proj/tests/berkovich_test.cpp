#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mumford/berkovich.hpp"

using namespace mumford;

namespace {
const int N = 20;
const long long P = 3;

Padic c3(long long n, long long d = 1) { return Padic::from_rational(n, d, P, N); }
BerkPoint bp(long long center, long long q) { return BerkPoint(c3(center), Rat(q)); }
} // namespace

TEST_CASE("meet of the two genus-2 cherry balls") {
    BerkPoint p1 = bp(4, 2), p1p = bp(1, 2);
    BerkPoint m = meet(p1, p1p);
    REQUIRE(m == bp(1, 1));
    REQUIRE(m == bp(4, 1)); // same closed ball
    REQUIRE(meet(p1, p1) == p1);
}

TEST_CASE("meet is commutative and associative on triples") {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        BerkPoint a = bp(static_cast<long long>(rng() % 40), static_cast<long long>(rng() % 5));
        BerkPoint b = bp(static_cast<long long>(rng() % 40), static_cast<long long>(rng() % 5));
        BerkPoint c = bp(static_cast<long long>(rng() % 40), static_cast<long long>(rng() % 5));
        REQUIRE(meet(a, b) == meet(b, a));
        REQUIRE(meet(meet(a, b), c) == meet(a, meet(b, c)));
    }
}

TEST_CASE("distances between the genus-2 example points") {
    REQUIRE(distance(bp(4, 2), bp(1, 2)) == Rat(2));
    REQUIRE(distance(bp(4, 2), bp(5, 2)) == Rat(4));
    REQUIRE(distance(bp(4, 2), bp(2, 2)) == Rat(4));
    REQUIRE(distance(bp(5, 2), bp(2, 2)) == Rat(2));
    REQUIRE(distance(bp(7, 3), bp(7, 3)) == Rat(0));
}

TEST_CASE("closed ball equality at shared radius") {
    REQUIRE(bp(1, 1) == bp(4, 1));   // |1-4| = 1/3 <= 1/3
    REQUIRE(bp(1, 2) != bp(4, 2));   // |1-4| = 1/3 > 1/9
    REQUIRE(bp(0, 0) == bp(9, 0));
    BerkPoint half(c3(0), Rat(3, 2));
    BerkPoint half2(c3(9), Rat(3, 2)); // val(9-0)=2 >= 3/2
    REQUIRE(half == half2);
    REQUIRE(half.key() == half2.key());
}

TEST_CASE("span of two points is a single edge") {
    MetricTree t = span_tree({bp(4, 2), bp(4, 5)});
    REQUIRE(t.vertices.size() == 2);
    REQUIRE(t.edges.size() == 1);
    REQUIRE(t.edges[0].length == Rat(3));
}

TEST_CASE("span of the four genus-2 points gives two cherries and a bridge") {
    // B1=B(4,1/9), B1'=B(1,1/9), B2=B(5,1/9), B2'=B(2,1/9)
    MetricTree t = span_tree({bp(4, 2), bp(1, 2), bp(5, 2), bp(2, 2)});
    // inputs + cherry meets B(1,1/3), B(2,1/3) + top B(1,1)
    REQUIRE(t.vertices.size() == 7);
    REQUIRE(t.edges.size() == 6);

    int m1 = t.find_vertex(bp(1, 1)), m2 = t.find_vertex(bp(2, 1)), top = t.find_vertex(bp(0, 0));
    REQUIRE(m1 >= 0);
    REQUIRE(m2 >= 0);
    REQUIRE(top >= 0);
    // cherry stems have length 1, the bridge passes through the top in
    // two unit edges
    int stems = 0, bridge = 0;
    for (const auto& e : t.edges) {
        if (e.length != Rat(1)) continue;
        if (e.u == top || e.v == top)
            ++bridge;
        else
            ++stems;
    }
    REQUIRE(stems == 4);
    REQUIRE(bridge == 2);
    REQUIRE(distance(t.vertices[m1], t.vertices[m2]) == Rat(2));
    REQUIRE(t.total_length() == Rat(6));
}

TEST_CASE("span of the six genus-3 points matches the honeycomb tree") {
    // B1=B(1,..), B1'=B(3,..), B2=B(2,..), B2'=B(6,..), B3=B(4,..), B3'=B(5,..)
    MetricTree t = span_tree({bp(1, 2), bp(3, 2), bp(2, 2), bp(6, 2), bp(4, 2), bp(5, 2)});
    REQUIRE(t.vertices.size() == 10); // 6 inputs, 3 cherries, 1 top
    REQUIRE(t.edges.size() == 9);
    // cherries pair centers {1,4}, {2,5}, {3,6}
    REQUIRE(distance(bp(1, 2), bp(4, 2)) == Rat(2));
    REQUIRE(distance(bp(2, 2), bp(5, 2)) == Rat(2));
    REQUIRE(distance(bp(3, 2), bp(6, 2)) == Rat(2));
    REQUIRE(distance(bp(1, 2), bp(3, 2)) == Rat(4));
    for (const auto& e : t.edges) REQUIRE(e.length == Rat(1));
}

TEST_CASE("span output does not depend on insertion order") {
    std::vector<BerkPoint> pts = {bp(4, 2), bp(1, 2), bp(5, 2), bp(2, 2)};
    MetricTree t1 = span_tree(pts);
    std::reverse(pts.begin(), pts.end());
    MetricTree t2 = span_tree(pts);
    REQUIRE(t1.vertices.size() == t2.vertices.size());
    for (size_t i = 0; i < t1.vertices.size(); ++i) REQUIRE(t1.vertices[i] == t2.vertices[i]);
    REQUIRE(t1.edges.size() == t2.edges.size());
    for (size_t i = 0; i < t1.edges.size(); ++i) {
        REQUIRE(t1.edges[i].u == t2.edges[i].u);
        REQUIRE(t1.edges[i].v == t2.edges[i].v);
        REQUIRE(t1.edges[i].length == t2.edges[i].length);
    }
}

TEST_CASE("four-point ultrametric tree condition") {
    std::mt19937 rng(4321);
    for (int trial = 0; trial < 100; ++trial) {
        BerkPoint q[4] = {
            bp(static_cast<long long>(rng() % 60), static_cast<long long>(rng() % 6)),
            bp(static_cast<long long>(rng() % 60), static_cast<long long>(rng() % 6)),
            bp(static_cast<long long>(rng() % 60), static_cast<long long>(rng() % 6)),
            bp(static_cast<long long>(rng() % 60), static_cast<long long>(rng() % 6))};
        Rat s1 = distance(q[0], q[1]) + distance(q[2], q[3]);
        Rat s2 = distance(q[0], q[2]) + distance(q[1], q[3]);
        Rat s3 = distance(q[0], q[3]) + distance(q[1], q[2]);
        Rat mx = rat_max(s1, rat_max(s2, s3));
        int at_max = (s1 == mx) + (s2 == mx) + (s3 == mx);
        REQUIRE(at_max >= 2);
    }
}

TEST_CASE("retraction onto a tree") {
    MetricTree t = span_tree({bp(4, 2), bp(1, 2), bp(5, 2), bp(2, 2)});
    // the largest ball on the way to infinity is the top B(1,1)+
    REQUIRE(retract(ProjPoint::infinity(), t, N) == bp(0, 0));
    // a point deep inside B(4,1/9) retracts onto that vertex
    REQUIRE(retract(ProjPoint::affine(c3(4 + 81)), t, N) == bp(4, 2));
    // a point far from every ball retracts onto the path at its meet level
    BerkPoint r = retract(ProjPoint::affine(c3(19)), t, N);
    REQUIRE(t.on_tree(r));
    // oracle: no tree vertex or meet candidate is closer
    BerkPoint z(c3(19), Rat(N));
    for (const auto& v : t.vertices) {
        REQUIRE(distance(z, r) <= distance(z, v));
    }
}

TEST_CASE("ball membership and complement") {
    Ball b1 = Ball::affine_open(c3(1), Rat(2));
    REQUIRE(b1.contains(ProjPoint::affine(c3(1 + 27))));
    REQUIRE(!b1.contains(ProjPoint::affine(c3(10)))); // on the sphere
    REQUIRE(!b1.contains(ProjPoint::infinity()));
    Ball k = b1.complement();
    REQUIRE(k.contains(ProjPoint::infinity()));
    REQUIRE(k.contains(ProjPoint::affine(c3(10))));
    REQUIRE(!k.contains(ProjPoint::affine(c3(1 + 27))));
    REQUIRE(k.complement().same_ball(b1));

    Ball closed = Ball::affine_closed(c3(1), Rat(2));
    REQUIRE(closed.contains(ProjPoint::affine(c3(10))));
}

TEST_CASE("identity maps every ball to itself") {
    Mobius id;
    Ball b = Ball::affine_open(c3(4), Rat(2));
    REQUIRE(ball_image(id, b, P, N).same_ball(b));
    BerkPoint pnt = bp(4, 2);
    REQUIRE(point_image(id, pnt, N) == pnt);
}

TEST_CASE("gamma1 maps the complement of B(1,1/9) onto B(4,1/9)+") {
    Mobius g1(-5, 32, -8, 35);
    Ball b1p_open = Ball::affine_open(c3(1), Rat(2));
    Ball outside = b1p_open.complement(); // closed, contains infinity
    Ball img = ball_image(g1, outside, P, N);
    REQUIRE(img.is_affine());
    REQUIRE(img.closed);
    REQUIRE(img.same_ball(Ball::affine_closed(c3(4), Rat(2))));

    // and the inverse sends the complement of B(4,1/9) onto B(1,1/9)+
    Ball img2 = ball_image(g1.inverse(), Ball::affine_open(c3(4), Rat(2)).complement(), P, N);
    REQUIRE(img2.same_ball(Ball::affine_closed(c3(1), Rat(2))));
}

TEST_CASE("ball images round-trip") {
    Mobius g2(-13, 80, -8, 43);
    for (Ball b : {Ball::affine_open(c3(2), Rat(2)), Ball::affine_closed(c3(5), Rat(1)),
                   Ball::affine_open(c3(0), Rat(0)).complement()}) {
        Ball img = ball_image(g2, b, P, N);
        Ball back = ball_image(g2.inverse(), img, P, N);
        REQUIRE(back.same_ball(b));
    }
}

TEST_CASE("point images preserve distances") {
    Mobius g1(-5, 32, -8, 35), g2(-13, 80, -8, 43);
    std::vector<BerkPoint> pts = {bp(4, 2), bp(1, 2), bp(5, 2), bp(2, 2)};
    for (const Mobius& m : {g1, g2, g1 * g2}) {
        for (size_t i = 0; i < pts.size(); ++i) {
            for (size_t j = i + 1; j < pts.size(); ++j) {
                BerkPoint a = point_image(m, pts[i], N), b = point_image(m, pts[j], N);
                REQUIRE(distance(a, b) == distance(pts[i], pts[j]));
            }
        }
    }
}

TEST_CASE("point image agrees with the set image when the pole is outside") {
    Mobius g1(-5, 32, -8, 35);
    BerkPoint pnt = bp(1, 2); // pole of g1 is 35/8, at distance 3^-3 inside B(1,1/9)... check closed
    Ball img_set = ball_image(g1, Ball::affine_closed(c3(2), Rat(2)), P, N);
    BerkPoint img_pt = point_image(g1, bp(2, 2), N);
    REQUIRE(img_set.is_affine());
    REQUIRE(img_pt == BerkPoint(img_set.center, img_set.q));
}
