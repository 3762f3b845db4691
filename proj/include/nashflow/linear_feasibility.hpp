#pragma once

#include "nashflow/rational.hpp"

#include <optional>
#include <vector>

namespace nashflow {

// A linear relation  sum_i coef[i] * x_i  (rel)  rhs.
enum class Rel { Eq, Le, Lt };

struct LinearConstraint {
    std::vector<Rat> coef;
    Rel rel = Rel::Le;
    Rat rhs;
};

// Exact rational feasibility for small systems of linear equalities and (weak
// or strict) inequalities. Equalities are removed by Gaussian elimination,
// the rest by Fourier-Motzkin; a concrete sample point is recovered by back
// substitution. Sized for desk-scale problems (tens of variables).
class FeasibilitySystem {
public:
    explicit FeasibilitySystem(int n_vars) : n_vars_(n_vars) {}

    void add(LinearConstraint c);
    // Convenience: sparse terms.
    void add(const std::vector<std::pair<int, Rat>>& terms, Rel rel, Rat rhs);

    int variable_count() const { return n_vars_; }
    std::size_t constraint_count() const { return rows_.size(); }

    // A feasible point, or nullopt if the system is infeasible.
    std::optional<std::vector<Rat>> solve() const;

    bool feasible() const { return solve().has_value(); }

private:
    int n_vars_;
    std::vector<LinearConstraint> rows_;
};

}  // namespace nashflow
