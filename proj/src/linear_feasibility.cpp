#include "nashflow/linear_feasibility.hpp"

#include <algorithm>

#include <stdexcept>

namespace nashflow {

void FeasibilitySystem::add(LinearConstraint c) {
    if (static_cast<int>(c.coef.size()) != n_vars_)
        throw std::invalid_argument("FeasibilitySystem::add: wrong coefficient count");
    rows_.push_back(std::move(c));
}

void FeasibilitySystem::add(const std::vector<std::pair<int, Rat>>& terms, Rel rel, Rat rhs) {
    LinearConstraint c;
    c.coef.assign(n_vars_, Rat(0));
    for (const auto& [var, coef] : terms) c.coef[var] += coef;
    c.rel = rel;
    c.rhs = std::move(rhs);
    rows_.push_back(std::move(c));
}

namespace {

bool all_zero(const std::vector<Rat>& v) {
    return std::all_of(v.begin(), v.end(), [](const Rat& r) { return r == 0; });
}

// Dense exact-rational tableau with Bland's rule. Maximizes whatever reduced
// objective is loaded; callers run the classic two phases on it.
struct Simplex {
    int rows = 0, cols = 0;
    std::vector<std::vector<Rat>> a;
    std::vector<Rat> b;  // kept nonnegative
    std::vector<int> basis;
    std::vector<Rat> obj;  // reduced costs
    Rat obj_value;

    Rat value_of(int col) const {
        for (int r = 0; r < rows; ++r)
            if (basis[r] == col) return b[r];
        return Rat(0);
    }

    void pivot(int r, int c) {
        Rat lead = a[r][c];
        for (auto& x : a[r]) x /= lead;
        b[r] /= lead;
        for (int i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rat f = a[i][c];
            for (int j = 0; j < cols; ++j)
                if (a[r][j] != 0) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        if (obj[c] != 0) {
            Rat f = obj[c];
            for (int j = 0; j < cols; ++j)
                if (a[r][j] != 0) obj[j] -= f * a[r][j];
            obj_value += f * b[r];
        }
        basis[r] = c;
    }

    // Entering columns are restricted to < col_limit (this is how artificials
    // stay out). Stops early once column `watch` turns positive.
    void maximize(int col_limit, int watch = -1) {
        while (true) {
            if (watch >= 0 && value_of(watch) > 0) return;
            int enter = -1;
            for (int j = 0; j < col_limit; ++j)
                if (obj[j] > 0) {
                    enter = j;
                    break;
                }
            if (enter < 0) return;
            int leave = -1;
            for (int r = 0; r < rows; ++r) {
                if (!(a[r][enter] > 0)) continue;
                if (leave < 0) {
                    leave = r;
                    continue;
                }
                Rat diff = b[r] * a[leave][enter] - b[leave] * a[r][enter];
                if (diff < 0 || (diff == 0 && basis[r] < basis[leave])) leave = r;
            }
            if (leave < 0) throw std::logic_error("feasibility objective unbounded");
            pivot(leave, enter);
        }
    }
};

}  // namespace

std::optional<std::vector<Rat>> FeasibilitySystem::solve() const {
    std::vector<LinearConstraint> eqs, ineqs;
    for (const auto& r : rows_)
        (r.rel == Rel::Eq ? eqs : ineqs).push_back(r);

    // --- Gaussian elimination on the equalities.
    // pivots: (variable, reduced row) in elimination order.
    std::vector<std::pair<int, LinearConstraint>> pivots;
    for (std::size_t ei = 0; ei < eqs.size(); ++ei) {
        LinearConstraint row = eqs[ei];
        for (const auto& [pv, prow] : pivots) {
            if (row.coef[pv] == 0) continue;
            Rat factor = row.coef[pv];
            for (int j = 0; j < n_vars_; ++j) row.coef[j] -= factor * prow.coef[j];
            row.rhs -= factor * prow.rhs;
        }
        int pivot = -1;
        for (int j = 0; j < n_vars_; ++j)
            if (row.coef[j] != 0) {
                pivot = j;
                break;
            }
        if (pivot < 0) {
            if (row.rhs != 0) return std::nullopt;  // 0 = nonzero
            continue;
        }
        Rat lead = row.coef[pivot];
        for (int j = 0; j < n_vars_; ++j) row.coef[j] /= lead;
        row.rhs /= lead;
        pivots.emplace_back(pivot, std::move(row));
    }

    // Substitute pivot variables out of the inequalities.
    std::vector<bool> is_pivot(n_vars_, false);
    for (const auto& [pv, _] : pivots) is_pivot[pv] = true;
    for (auto& row : ineqs) {
        for (const auto& [pv, prow] : pivots) {
            if (row.coef[pv] == 0) continue;
            Rat factor = row.coef[pv];
            for (int j = 0; j < n_vars_; ++j) row.coef[j] -= factor * prow.coef[j];
            row.rhs -= factor * prow.rhs;
        }
    }

    // --- Simplex over the free variables. Each free variable is split into
    // a nonnegative difference, every inequality gets a slack, and strict
    // rows must leave a shared margin delta in (0, 1] that gets maximized.
    std::vector<int> free_vars;
    for (int j = 0; j < n_vars_; ++j)
        if (!is_pivot[j]) free_vars.push_back(j);
    const int k = static_cast<int>(free_vars.size());

    // Rows whose coefficients were fully eliminated are decided right away.
    std::vector<LinearConstraint> rows;
    bool has_strict = false;
    for (auto& c : ineqs) {
        if (all_zero(c.coef)) {
            if (c.rel == Rel::Lt ? !(Rat(0) < c.rhs) : !(Rat(0) <= c.rhs)) return std::nullopt;
            continue;
        }
        has_strict = has_strict || c.rel == Rel::Lt;
        rows.push_back(std::move(c));
    }

    // Column layout: p_0..p_{k-1}, q_0..q_{k-1} (y = p - q), delta, one slack
    // per row, artificials for rows whose right side had to be negated.
    const int delta_col = 2 * k;
    const int n_rows = static_cast<int>(rows.size()) + (has_strict ? 1 : 0);
    const int slack_begin = 2 * k + 1;
    const int art_begin = slack_begin + n_rows;
    int n_art = 0;
    if (has_strict) {
        LinearConstraint cap;  // delta <= 1 keeps the margin objective bounded
        cap.coef.assign(n_vars_, Rat(0));
        cap.rel = Rel::Le;
        cap.rhs = Rat(1);
        rows.push_back(std::move(cap));
    }
    for (const auto& c : rows)
        if (c.rhs < 0) ++n_art;

    Simplex sx;
    sx.rows = n_rows;
    sx.cols = art_begin + n_art;
    sx.a.assign(sx.rows, std::vector<Rat>(sx.cols, Rat(0)));
    sx.b.assign(sx.rows, Rat(0));
    sx.basis.assign(sx.rows, -1);
    int art_next = art_begin;
    for (int i = 0; i < n_rows; ++i) {
        auto& row = sx.a[i];
        const LinearConstraint& c = rows[i];
        for (int j = 0; j < k; ++j) {
            row[j] = c.coef[free_vars[j]];
            row[k + j] = -row[j];
        }
        bool is_cap = has_strict && i + 1 == n_rows;
        if (is_cap || c.rel == Rel::Lt) row[delta_col] = Rat(1);
        sx.b[i] = c.rhs;
        bool flip = sx.b[i] < 0;
        if (flip) {
            for (auto& x : row) x = -x;
            sx.b[i] = -sx.b[i];
        }
        row[slack_begin + i] = flip ? Rat(-1) : Rat(1);
        if (flip) {
            row[art_next] = Rat(1);
            sx.basis[i] = art_next++;
        } else {
            sx.basis[i] = slack_begin + i;
        }
    }

    // Phase one: drive the artificials to zero.
    sx.obj.assign(sx.cols, Rat(0));
    sx.obj_value = Rat(0);
    if (n_art > 0) {
        for (int i = 0; i < n_rows; ++i) {
            if (sx.basis[i] < art_begin) continue;
            for (int j = 0; j < art_begin; ++j) sx.obj[j] += sx.a[i][j];
            sx.obj_value -= sx.b[i];
        }
        sx.maximize(art_begin);
        if (sx.obj_value < 0) return std::nullopt;
        for (int i = 0; i < n_rows; ++i) {
            if (sx.basis[i] < art_begin) continue;
            for (int j = 0; j < art_begin; ++j)
                if (sx.a[i][j] != 0) {
                    sx.pivot(i, j);
                    break;
                }
            // A row still pinned to its artificial is redundant and inert.
        }
    }

    // Phase two: push the strictness margin positive.
    if (has_strict) {
        sx.obj.assign(sx.cols, Rat(0));
        sx.obj_value = Rat(0);
        sx.obj[delta_col] = Rat(1);
        for (int i = 0; i < n_rows; ++i) {
            const Rat& f = sx.obj[sx.basis[i]];
            if (f == 0) continue;
            Rat factor = f;
            for (int j = 0; j < sx.cols; ++j) sx.obj[j] -= factor * sx.a[i][j];
            sx.obj_value += factor * sx.b[i];
        }
        sx.maximize(art_begin, delta_col);
        if (!(sx.value_of(delta_col) > 0)) return std::nullopt;
    }

    std::vector<Rat> point(n_vars_, Rat(0));
    for (int j = 0; j < k; ++j)
        point[free_vars[j]] = sx.value_of(j) - sx.value_of(k + j);

    // Pivot variables from the equalities, in reverse elimination order.
    for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
        const auto& [pv, row] = *it;
        Rat value = row.rhs;
        for (int j = 0; j < n_vars_; ++j)
            if (j != pv) value -= row.coef[j] * point[j];
        point[pv] = value;
    }
    return point;
}

}  // namespace nashflow
