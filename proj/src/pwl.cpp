#include "nashflow/pwl.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace nashflow {

namespace {

// Merged, deduplicated breakpoint union of two functions.
std::vector<Rat> merge_times(const std::vector<Rat>& a, const std::vector<Rat>& b) {
    std::vector<Rat> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

PiecewiseLinear::PiecewiseLinear(std::vector<Rat> times, std::vector<Rat> values, Rat final_slope)
    : times_(std::move(times)), values_(std::move(values)), final_slope_(std::move(final_slope)) {
    if (times_.empty() || times_.size() != values_.size())
        throw std::invalid_argument("PiecewiseLinear: need matching nonempty breakpoint/value lists");
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i - 1] < times_[i]))
            throw std::invalid_argument("PiecewiseLinear: breakpoints must be strictly increasing");

    // Canonicalize: drop leading flat segments (the implicit left extension is
    // already constant) and merge interior breakpoints with equal slopes.
    std::size_t first = 0;
    while (first + 1 < times_.size() && values_[first] == values_[first + 1]) ++first;
    std::vector<Rat> ts, vs;
    ts.push_back(times_[first]);
    vs.push_back(values_[first]);
    for (std::size_t i = first + 1; i < times_.size(); ++i) {
        // Slope of incoming segment at ts.back() .. times_[i].
        Rat in_slope = (values_[i] - vs.back()) / (times_[i] - ts.back());
        Rat out_slope = (i + 1 < times_.size())
                            ? (values_[i + 1] - values_[i]) / (times_[i + 1] - times_[i])
                            : final_slope_;
        if (in_slope == out_slope) continue;  // breakpoint is redundant
        ts.push_back(times_[i]);
        vs.push_back(values_[i]);
    }
    if (ts.size() == 1 && final_slope_ == 0) {
        // Globally constant; normalize the arbitrary breakpoint to 0.
        ts[0] = 0;
    }
    times_ = std::move(ts);
    values_ = std::move(vs);
}

PiecewiseLinear PiecewiseLinear::constant(const Rat& v) {
    return PiecewiseLinear({Rat(0)}, {v}, Rat(0));
}

PiecewiseLinear PiecewiseLinear::ray(const Rat& t0, const Rat& v0, const Rat& slope) {
    return PiecewiseLinear({t0}, {v0}, slope);
}

PiecewiseLinear PiecewiseLinear::identity() {
    return PiecewiseLinear({Rat(0)}, {Rat(0)}, Rat(1));
}

Rat PiecewiseLinear::operator()(const Rat& t) const {
    if (t <= times_.front()) return values_.front();
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times_.begin()) - 1;
    if (i + 1 < times_.size()) {
        Rat slope = (values_[i + 1] - values_[i]) / (times_[i + 1] - times_[i]);
        return values_[i] + slope * (t - times_[i]);
    }
    return values_.back() + final_slope_ * (t - times_.back());
}

Rat PiecewiseLinear::slope_right(const Rat& t) const {
    if (t < times_.front()) return Rat(0);
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times_.begin()) - 1;
    if (i + 1 < times_.size())
        return (values_[i + 1] - values_[i]) / (times_[i + 1] - times_[i]);
    return final_slope_;
}

bool PiecewiseLinear::non_decreasing() const {
    if (final_slope_ < 0) return false;
    for (std::size_t i = 1; i < values_.size(); ++i)
        if (values_[i] < values_[i - 1]) return false;
    return true;
}

PiecewiseLinear PiecewiseLinear::shift_arg(const Rat& delta) const {
    std::vector<Rat> ts = times_;
    for (auto& t : ts) t += delta;
    return PiecewiseLinear(std::move(ts), values_, final_slope_);
}

PiecewiseLinear PiecewiseLinear::operator+(const PiecewiseLinear& o) const {
    std::vector<Rat> ts = merge_times(times_, o.times_);
    std::vector<Rat> vs;
    vs.reserve(ts.size());
    for (const auto& t : ts) vs.push_back((*this)(t) + o(t));
    return PiecewiseLinear(std::move(ts), std::move(vs), final_slope_ + o.final_slope_);
}

PiecewiseLinear PiecewiseLinear::operator-(const PiecewiseLinear& o) const {
    std::vector<Rat> ts = merge_times(times_, o.times_);
    std::vector<Rat> vs;
    vs.reserve(ts.size());
    for (const auto& t : ts) vs.push_back((*this)(t)-o(t));
    return PiecewiseLinear(std::move(ts), std::move(vs), final_slope_ - o.final_slope_);
}

PiecewiseConstant::PiecewiseConstant(std::vector<Rat> times, std::vector<Rat> values, Rat left_value)
    : times_(std::move(times)), values_(std::move(values)), left_value_(std::move(left_value)) {
    if (times_.empty() || times_.size() != values_.size())
        throw std::invalid_argument("PiecewiseConstant: need matching nonempty breakpoint/value lists");
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i - 1] < times_[i]))
            throw std::invalid_argument("PiecewiseConstant: breakpoints must be strictly increasing");
    canonicalize();
}

void PiecewiseConstant::canonicalize() {
    std::vector<Rat> ts, vs;
    for (std::size_t i = 0; i < times_.size(); ++i) {
        const Rat& prev = vs.empty() ? left_value_ : vs.back();
        if (values_[i] == prev) continue;
        ts.push_back(times_[i]);
        vs.push_back(values_[i]);
    }
    if (ts.empty()) {
        ts.push_back(times_.front());
        vs.push_back(left_value_);
    }
    times_ = std::move(ts);
    values_ = std::move(vs);
}

PiecewiseConstant PiecewiseConstant::constant(const Rat& v) {
    return PiecewiseConstant({Rat(0)}, {v}, v);
}

Rat PiecewiseConstant::operator()(const Rat& t) const {
    if (t < times_.front()) return left_value_;
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

Rat PiecewiseConstant::left_limit(const Rat& t) const {
    if (t <= times_.front()) return left_value_;
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

void PiecewiseConstant::set_from(const Rat& t, const Rat& value) {
    if (t < times_.back())
        throw std::invalid_argument("PiecewiseConstant::set_from: time precedes existing breakpoints");
    while (!times_.empty() && times_.back() == t) {
        times_.pop_back();
        values_.pop_back();
    }
    const Rat& prev = values_.empty() ? left_value_ : values_.back();
    if (value != prev) {
        times_.push_back(t);
        values_.push_back(value);
    }
    if (times_.empty()) {
        times_.push_back(t);
        values_.push_back(left_value_);
    }
}

MaybeRat PiecewiseConstant::next_change(const Rat& t) const {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.end()) return std::nullopt;
    return *it;
}

PiecewiseLinear PiecewiseConstant::integral() const {
    if (left_value_ != 0)
        throw std::logic_error("PiecewiseConstant::integral: nonzero left extension");
    std::vector<Rat> ts{times_.front()};
    std::vector<Rat> vs{Rat(0)};
    for (std::size_t i = 1; i < times_.size(); ++i) {
        ts.push_back(times_[i]);
        vs.push_back(vs.back() + values_[i - 1] * (times_[i] - times_[i - 1]));
    }
    return PiecewiseLinear(std::move(ts), std::move(vs), values_.back());
}

PiecewiseLinear compose_monotone(const PiecewiseLinear& f, const PiecewiseLinear& g) {
    if (!g.non_decreasing())
        throw std::invalid_argument("compose_monotone: inner function must be nondecreasing");

    // Result breakpoints: g's own, plus preimages under g of f's breakpoints.
    std::vector<Rat> ts = g.breakpoints();
    const auto& gt = g.breakpoints();
    const auto& gv = g.values();
    for (const Rat& fb : f.breakpoints()) {
        // Search each linear piece of g for g(t) == fb.
        for (std::size_t i = 0; i + 1 < gt.size(); ++i) {
            if ((gv[i] <= fb && fb <= gv[i + 1]) && gv[i] != gv[i + 1]) {
                Rat slope = (gv[i + 1] - gv[i]) / (gt[i + 1] - gt[i]);
                ts.push_back(gt[i] + (fb - gv[i]) / slope);
            }
        }
        if (g.final_slope() > 0 && fb >= gv.back())
            ts.push_back(gt.back() + (fb - gv.back()) / g.final_slope());
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    std::vector<Rat> vs;
    vs.reserve(ts.size());
    for (const Rat& t : ts) vs.push_back(f(g(t)));
    // Beyond the last breakpoint both f and g are in their final linear piece.
    Rat final_slope = g.final_slope() == 0 ? Rat(0) : f.slope_right(g(ts.back())) * g.final_slope();
    return PiecewiseLinear(std::move(ts), std::move(vs), final_slope);
}

PiecewiseLinear pointwise_min(const PiecewiseLinear& a, const PiecewiseLinear& b) {
    std::vector<Rat> ts = merge_times(a.breakpoints(), b.breakpoints());
    // Insert crossings inside each shared segment and beyond the last breakpoint.
    std::vector<Rat> extra;
    for (std::size_t i = 0; i + 1 <= ts.size(); ++i) {
        Rat t0 = ts[i];
        Rat va = a(t0), vb = b(t0);
        Rat sa = a.slope_right(t0), sb = b.slope_right(t0);
        if (sa == sb) continue;
        Rat cross = t0 + (vb - va) / (sa - sb);
        if (cross <= t0) continue;
        if (i + 1 < ts.size()) {
            if (cross < ts[i + 1]) extra.push_back(cross);
        } else {
            extra.push_back(cross);
        }
    }
    ts.insert(ts.end(), extra.begin(), extra.end());
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    std::vector<Rat> vs;
    vs.reserve(ts.size());
    for (const Rat& t : ts) vs.push_back(std::min(a(t), b(t)));
    // Which function is smaller in the limit decides the final slope.
    const Rat& tl = ts.back();
    Rat va = a(tl), vb = b(tl);
    Rat final_slope;
    if (va < vb)
        final_slope = a.final_slope();
    else if (vb < va)
        final_slope = b.final_slope();
    else
        final_slope = std::min(a.final_slope(), b.final_slope());
    return PiecewiseLinear(std::move(ts), std::move(vs), final_slope);
}

PiecewiseLinear pointwise_min(std::span<const PiecewiseLinear> fs) {
    if (fs.empty()) throw std::invalid_argument("pointwise_min: empty list");
    PiecewiseLinear acc = fs[0];
    for (std::size_t i = 1; i < fs.size(); ++i) acc = pointwise_min(acc, fs[i]);
    return acc;
}

MaybeRat first_crossing(const PiecewiseLinear& f, const Rat& level, const Rat& from) {
    if (f(from) >= level) return from;
    const auto& ts = f.breakpoints();
    // Scan segment by segment starting at `from`.
    Rat t = from;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] <= t) continue;
        if (f(ts[i]) >= level) {
            // Crossing inside (t, ts[i]].
            Rat v = f(t);
            Rat slope = f.slope_right(t);
            return t + (level - v) / slope;
        }
        t = ts[i];
    }
    Rat v = f(t);
    if (f.final_slope() > 0) return t + (level - v) / f.final_slope();
    return std::nullopt;
}

}  // namespace nashflow
