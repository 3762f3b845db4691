#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nashflow/pwl.hpp"

#include <random>
#include <vector>

using namespace nashflow;

namespace {

// Deterministic rational sample points for property checks.
std::vector<Rat> sample_points(unsigned seed, int count, int lo, int hi) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(lo * 12, hi * 12);
    std::vector<Rat> out;
    for (int i = 0; i < count; ++i) out.emplace_back(num(rng), 12);
    return out;
}

}  // namespace

TEST_CASE("piecewise linear evaluation and slopes") {
    // 0 on (-inf,0], slope 3 to (3,9), then slope 1.
    PiecewiseLinear f({Rat(0), Rat(3)}, {Rat(0), Rat(9)}, Rat(1));
    CHECK(f(Rat(-5)) == Rat(0));
    CHECK(f(Rat(0)) == Rat(0));
    CHECK(f(Rat(2)) == Rat(6));
    CHECK(f(Rat(3)) == Rat(9));
    CHECK(f(Rat(7)) == Rat(13));
    CHECK(f(Rat(5, 2)) == Rat(15, 2));
    CHECK(f.slope_right(Rat(1)) == Rat(3));
    CHECK(f.slope_right(Rat(3)) == Rat(1));
    CHECK(f.slope_right(Rat(100)) == Rat(1));
    CHECK(f.non_decreasing());
}

TEST_CASE("canonicalization merges equal slopes") {
    PiecewiseLinear a({Rat(0), Rat(1), Rat(2)}, {Rat(0), Rat(2), Rat(4)}, Rat(2));
    PiecewiseLinear b = PiecewiseLinear::ray(Rat(0), Rat(0), Rat(2));
    CHECK(a == b);
    CHECK(a.breakpoints().size() == 1);

    PiecewiseLinear c({Rat(5)}, {Rat(7)}, Rat(0));
    CHECK(c == PiecewiseLinear::constant(Rat(7)));
}

TEST_CASE("arithmetic and shifting") {
    PiecewiseLinear f = PiecewiseLinear::ray(Rat(0), Rat(0), Rat(2));
    PiecewiseLinear g({Rat(1)}, {Rat(3)}, Rat(1));
    PiecewiseLinear sum = f + g;
    CHECK(sum(Rat(0)) == Rat(3));
    CHECK(sum(Rat(1)) == Rat(5));
    CHECK(sum(Rat(4)) == Rat(14));
    PiecewiseLinear diff = f - g;
    CHECK(diff(Rat(4)) == Rat(2));

    PiecewiseLinear shifted = f.shift_arg(Rat(3));  // f(t - 3)
    CHECK(shifted(Rat(3)) == Rat(0));
    CHECK(shifted(Rat(5)) == Rat(4));
}

TEST_CASE("composition agrees with pointwise evaluation") {
    PiecewiseLinear f({Rat(0), Rat(4)}, {Rat(1), Rat(9)}, Rat(1, 2));
    PiecewiseLinear g({Rat(0), Rat(2)}, {Rat(0), Rat(6)}, Rat(1));
    PiecewiseLinear h = compose_monotone(f, g);
    for (const Rat& t : sample_points(11, 100, -3, 12)) CHECK(h(t) == f(g(t)));
}

TEST_CASE("pointwise min agrees with pointwise evaluation") {
    PiecewiseLinear f = PiecewiseLinear::ray(Rat(0), Rat(0), Rat(3));
    PiecewiseLinear g({Rat(1)}, {Rat(4)}, Rat(1));
    PiecewiseLinear h({Rat(-1), Rat(2)}, {Rat(10), Rat(4)}, Rat(0));
    std::vector<PiecewiseLinear> fs = {f, g, h};
    PiecewiseLinear lower = pointwise_min(fs);
    for (const Rat& t : sample_points(12, 100, -4, 10)) {
        Rat want = std::min({f(t), g(t), h(t)});
        CHECK(lower(t) == want);
    }
}

TEST_CASE("first crossing finds exact hitting times") {
    PiecewiseLinear f({Rat(0), Rat(3)}, {Rat(0), Rat(9)}, Rat(1));
    CHECK(*first_crossing(f, Rat(6), Rat(0)) == Rat(2));
    CHECK(*first_crossing(f, Rat(10), Rat(0)) == Rat(4));
    CHECK(*first_crossing(f, Rat(0), Rat(-5)) == Rat(-5));
    CHECK(*first_crossing(f, Rat(6), Rat(5)) == Rat(5));  // already above

    PiecewiseLinear flat = PiecewiseLinear::constant(Rat(1));
    CHECK(!first_crossing(flat, Rat(2), Rat(0)));
}

TEST_CASE("piecewise constant evaluation, limits, and integral") {
    PiecewiseConstant f({Rat(1), Rat(4)}, {Rat(3), Rat(1)});
    CHECK(f(Rat(0)) == Rat(0));
    CHECK(f(Rat(1)) == Rat(3));
    CHECK(f(Rat(4)) == Rat(1));
    CHECK(f.left_limit(Rat(4)) == Rat(3));
    CHECK(f.left_limit(Rat(1)) == Rat(0));
    CHECK(f.next_change(Rat(0)) == MaybeRat(Rat(1)));
    CHECK(f.next_change(Rat(1)) == MaybeRat(Rat(4)));
    CHECK(!f.next_change(Rat(4)));

    PiecewiseLinear F = f.integral();
    CHECK(F(Rat(1)) == Rat(0));
    CHECK(F(Rat(4)) == Rat(9));
    CHECK(F(Rat(6)) == Rat(11));
}

TEST_CASE("piecewise constant set_from truncates the tail") {
    PiecewiseConstant f({Rat(0), Rat(2)}, {Rat(5), Rat(7)});
    f.set_from(Rat(3), Rat(2));
    CHECK(f(Rat(2)) == Rat(7));
    CHECK(f(Rat(3)) == Rat(2));
    CHECK(f(Rat(100)) == Rat(2));
    // Overwriting at the last breakpoint replaces it; a redundant value merges
    // into the previous segment.
    f.set_from(Rat(3), Rat(7));
    CHECK(f.breakpoints() == std::vector<Rat>{Rat(0), Rat(2)});
    CHECK(f(Rat(10)) == Rat(7));
}
