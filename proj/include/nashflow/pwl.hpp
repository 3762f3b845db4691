#pragma once

#include "nashflow/rational.hpp"

#include <span>
#include <vector>

namespace nashflow {

// Continuous piecewise-linear function of rational time.
//
// Represented by strictly increasing breakpoints t0 < t1 < ... with values at
// each breakpoint, plus a final slope beyond the last breakpoint. Left of t0
// the function is constant at values[0]. Construction canonicalizes: adjacent
// segments with equal slope are merged, so equality is structural.
class PiecewiseLinear {
public:
    PiecewiseLinear(std::vector<Rat> times, std::vector<Rat> values, Rat final_slope);

    static PiecewiseLinear constant(const Rat& v);
    // Single kink at (t0, v0) with the given slope to the right.
    static PiecewiseLinear ray(const Rat& t0, const Rat& v0, const Rat& slope);
    // Identity function.
    static PiecewiseLinear identity();

    Rat operator()(const Rat& t) const;

    const std::vector<Rat>& breakpoints() const { return times_; }
    const std::vector<Rat>& values() const { return values_; }
    const Rat& final_slope() const { return final_slope_; }

    // Slope of the segment immediately right of t.
    Rat slope_right(const Rat& t) const;

    bool non_decreasing() const;

    // f(t - delta) as a new function.
    PiecewiseLinear shift_arg(const Rat& delta) const;

    PiecewiseLinear operator+(const PiecewiseLinear& o) const;
    PiecewiseLinear operator-(const PiecewiseLinear& o) const;

    bool operator==(const PiecewiseLinear& o) const = default;

private:
    std::vector<Rat> times_;
    std::vector<Rat> values_;
    Rat final_slope_;
};

// Right-continuous piecewise-constant function: value values[i] on
// [times[i], times[i+1]), the last value extends to infinity, and left_value
// left of times[0].
class PiecewiseConstant {
public:
    PiecewiseConstant(std::vector<Rat> times, std::vector<Rat> values, Rat left_value = Rat(0));

    static PiecewiseConstant constant(const Rat& v);

    // Right-continuous evaluation.
    Rat operator()(const Rat& t) const;
    // Left-sided limit at t.
    Rat left_limit(const Rat& t) const;

    const std::vector<Rat>& breakpoints() const { return times_; }
    const std::vector<Rat>& values() const { return values_; }
    const Rat& left_value() const { return left_value_; }

    // Redefines the function as `value` on [t, infinity). t must not precede
    // an existing breakpoint.
    void set_from(const Rat& t, const Rat& value);

    // Smallest breakpoint > t (every breakpoint is a genuine value change).
    MaybeRat next_change(const Rat& t) const;

    // Exact antiderivative with F(times[0]) = 0; requires left_value == 0.
    PiecewiseLinear integral() const;

    bool operator==(const PiecewiseConstant& o) const = default;

private:
    void canonicalize();

    std::vector<Rat> times_;
    std::vector<Rat> values_;
    Rat left_value_;
};

// Exact composition f(g(t)) for nondecreasing g.
PiecewiseLinear compose_monotone(const PiecewiseLinear& f, const PiecewiseLinear& g);

// Exact lower envelope.
PiecewiseLinear pointwise_min(std::span<const PiecewiseLinear> fs);
PiecewiseLinear pointwise_min(const PiecewiseLinear& a, const PiecewiseLinear& b);

// Least t >= from with f(t) >= level, or nullopt if the level is never reached.
MaybeRat first_crossing(const PiecewiseLinear& f, const Rat& level, const Rat& from);

}  // namespace nashflow
