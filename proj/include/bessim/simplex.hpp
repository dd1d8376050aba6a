#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace bessim::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Linear program in general form:
///   minimize c.x   subject to   row_lb <= A x <= row_ub,  lb <= x <= ub
/// Rows are stored sparse. Equality rows have row_lb == row_ub; one-sided
/// rows use +-kInf on the open side.
struct Problem {
    struct Row {
        std::vector<std::pair<int, double>> terms;
        double lb = -kInf;
        double ub = kInf;
        std::string name; // constraint family, reported on infeasibility
    };

    std::vector<double> c;
    std::vector<double> lb;
    std::vector<double> ub;
    std::vector<Row> rows;

    int add_var(double lo, double hi, double cost = 0.0);
    void add_row(double lo, double hi, std::vector<std::pair<int, double>> terms,
                 std::string name = {});
    std::size_t num_vars() const { return c.size(); }
};

enum class Status { Optimal, Infeasible, Unbounded, IterLimit };

struct Solution {
    Status status = Status::IterLimit;
    double objective = 0.0;
    std::vector<double> x;     // primal values, one per variable
    std::vector<double> y;     // row duals (valid at Optimal)
    double dual_objective = 0.0;
    double rel_gap = kInf;     // |primal - dual| / (1 + |primal|)
    int iterations = 0;
    std::string infeasible_family; // set when status == Infeasible
};

struct SolveParams {
    int max_iterations = 50000;
    double feas_tol = 1e-9;  // bound/row violation tolerance
    double opt_tol = 1e-9;   // reduced-cost tolerance
    int refactor_every = 100;
};

/// Bounded-variable revised simplex (phase 1 artificials, explicit basis
/// inverse with periodic refactorization, Dantzig pricing with a Bland
/// fallback under degeneracy). At Optimal the solution carries a dual
/// certificate: y and the clamped reduced costs give dual_objective, and
/// rel_gap is the certified primal-dual gap.
Solution solve(const Problem& p, const SolveParams& params = {});

struct MipParams {
    SolveParams lp;
    int max_nodes = 50000;
    double int_tol = 1e-7;
    double rel_gap = 1e-9; // prune tolerance on bounds
};

/// Depth-first branch and bound over the listed integer variables
/// (binaries in practice). Throws SolverTimeoutError when max_nodes is
/// exhausted before the tree is closed.
Solution solve_mip(const Problem& p, const std::vector<int>& integer_vars,
                   const MipParams& params = {});

} // namespace bessim::lp
