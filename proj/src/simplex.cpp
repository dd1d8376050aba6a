#include "bessim/simplex.hpp"

#include <algorithm>
#include <cmath>

#include "bessim/errors.hpp"

namespace bessim::lp {

int Problem::add_var(double lo, double hi, double cost) {
    if (lo > hi) throw Error("variable bounds crossed (lb > ub)");
    lb.push_back(lo);
    ub.push_back(hi);
    c.push_back(cost);
    return static_cast<int>(c.size()) - 1;
}

void Problem::add_row(double lo, double hi, std::vector<std::pair<int, double>> terms,
                      std::string name) {
    if (lo > hi) throw Error("row bounds crossed (lb > ub)");
    Row r;
    r.terms = std::move(terms);
    r.lb = lo;
    r.ub = hi;
    r.name = std::move(name);
    rows.push_back(std::move(r));
}

namespace {

enum class VarState : unsigned char { Basic, AtLower, AtUpper, FreeAtZero };

// Bounded-variable revised simplex over the equality system
//   A x - s = 0,   lb <= x <= ub,   row_lb <= s <= row_ub
// Columns: structural 0..n-1, slack n..n+m-1, artificials appended for
// rows whose initial slack value violates its range. The basis inverse
// is kept explicitly and refreshed by Gauss-Jordan refactorization.
class Simplex {
public:
    Simplex(const Problem& p, const SolveParams& params) : p_(p), prm_(params) {
        n_ = p.num_vars();
        m_ = p.rows.size();
        ncols_ = n_ + m_; // artificials appended later
        lo_.assign(p.lb.begin(), p.lb.end());
        hi_.assign(p.ub.begin(), p.ub.end());
        for (const auto& r : p.rows) {
            lo_.push_back(r.lb);
            hi_.push_back(r.ub);
        }
        cols_.resize(ncols_);
        for (std::size_t i = 0; i < m_; ++i) {
            for (const auto& [j, v] : p.rows[i].terms) {
                if (j < 0 || static_cast<std::size_t>(j) >= n_)
                    throw Error("row references unknown variable");
                if (v != 0.0) cols_[j].emplace_back(static_cast<int>(i), v);
            }
            cols_[n_ + i].emplace_back(static_cast<int>(i), -1.0);
        }
    }

    Solution run() {
        init_point();
        Solution sol;
        if (!artificial_rows_.empty()) {
            set_phase1_costs();
            const Status st = iterate(/*phase1=*/true);
            if (st == Status::IterLimit) {
                sol.status = st;
                sol.iterations = iters_;
                return sol;
            }
            double infeas = 0.0;
            std::size_t worst_row = 0;
            for (std::size_t k = 0; k < nart_; ++k) {
                const double a = x_[ncols_ - nart_ + k];
                if (a > infeas) {
                    infeas = a;
                    worst_row = artificial_rows_[k];
                }
            }
            if (infeas > 1e-7 * (1.0 + rhs_scale_)) {
                sol.status = Status::Infeasible;
                sol.infeasible_family = p_.rows[worst_row].name;
                sol.iterations = iters_;
                return sol;
            }
            // Lock artificials at zero for phase 2.
            for (std::size_t k = 0; k < nart_; ++k) {
                const std::size_t j = ncols_ - nart_ + k;
                lo_[j] = hi_[j] = 0.0;
                if (state_[j] != VarState::Basic) {
                    x_[j] = 0.0;
                    state_[j] = VarState::AtLower;
                }
            }
        }
        set_phase2_costs();
        const Status st = iterate(/*phase1=*/false);
        sol.status = st;
        sol.iterations = iters_;
        if (st != Status::Optimal) return sol;

        refactorize(); // clean inverse before certifying
        finish(sol);
        return sol;
    }

private:
    const Problem& p_;
    SolveParams prm_;
    std::size_t n_ = 0, m_ = 0, ncols_ = 0, nart_ = 0;
    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<double> lo_, hi_, cost_, x_;
    std::vector<VarState> state_;
    std::vector<int> basic_;      // column index per basis position
    std::vector<int> basis_pos_;  // column -> basis position or -1
    std::vector<double> binv_;    // m x m row-major
    std::vector<std::size_t> artificial_rows_;
    double rhs_scale_ = 0.0;
    int iters_ = 0;

    double& binv(std::size_t i, std::size_t k) { return binv_[i * m_ + k]; }

    void init_point() {
        x_.assign(ncols_, 0.0);
        state_.assign(ncols_, VarState::AtLower);
        for (std::size_t j = 0; j < n_; ++j) {
            if (std::isfinite(lo_[j]) && (std::abs(lo_[j]) <= std::abs(hi_[j]) || !std::isfinite(hi_[j]))) {
                x_[j] = lo_[j];
                state_[j] = VarState::AtLower;
            } else if (std::isfinite(hi_[j])) {
                x_[j] = hi_[j];
                state_[j] = VarState::AtUpper;
            } else {
                x_[j] = 0.0;
                state_[j] = VarState::FreeAtZero;
            }
        }
        // Row activities at the starting point.
        std::vector<double> act(m_, 0.0);
        for (std::size_t j = 0; j < n_; ++j) {
            if (x_[j] == 0.0) continue;
            for (const auto& [i, v] : cols_[j]) act[i] += v * x_[j];
        }
        for (double a : act) rhs_scale_ = std::max(rhs_scale_, std::abs(a));
        for (std::size_t i = 0; i < m_; ++i) {
            rhs_scale_ = std::max({rhs_scale_, std::isfinite(lo_[n_ + i]) ? std::abs(lo_[n_ + i]) : 0.0,
                                   std::isfinite(hi_[n_ + i]) ? std::abs(hi_[n_ + i]) : 0.0});
        }

        basic_.assign(m_, -1);
        basis_pos_.assign(ncols_, -1);
        std::vector<double> diag(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t sj = n_ + i;
            if (act[i] >= lo_[sj] - prm_.feas_tol && act[i] <= hi_[sj] + prm_.feas_tol) {
                x_[sj] = act[i];
                state_[sj] = VarState::Basic;
                basic_[i] = static_cast<int>(sj);
                diag[i] = -1.0; // slack column is -e_i
            } else {
                const double rest = act[i] > hi_[sj] ? hi_[sj] : lo_[sj];
                x_[sj] = rest;
                state_[sj] = act[i] > hi_[sj] ? VarState::AtUpper : VarState::AtLower;
                artificial_rows_.push_back(i);
            }
        }
        nart_ = artificial_rows_.size();
        for (std::size_t k = 0; k < nart_; ++k) {
            const std::size_t i = artificial_rows_[k];
            const std::size_t sj = n_ + i;
            const double resid = act[i] - x_[sj]; // sign of the violation
            const double sigma = resid > 0.0 ? -1.0 : 1.0;
            // column sigma * e_i, value |resid| >= 0, bounds [0, inf)
            cols_.push_back({{static_cast<int>(i), sigma}});
            lo_.push_back(0.0);
            hi_.push_back(kInf);
            x_.push_back(std::abs(resid));
            state_.push_back(VarState::Basic);
            basis_pos_.push_back(-1);
            basic_[i] = static_cast<int>(ncols_ + k);
            diag[i] = sigma;
        }
        ncols_ += nart_;
        binv_.assign(m_ * m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            binv(i, i) = diag[i] == 0.0 ? 1.0 : 1.0 / diag[i];
            if (basic_[i] >= 0) basis_pos_[basic_[i]] = static_cast<int>(i);
        }
    }

    void set_phase1_costs() {
        cost_.assign(ncols_, 0.0);
        for (std::size_t k = 0; k < nart_; ++k) cost_[ncols_ - nart_ + k] = 1.0;
    }

    void set_phase2_costs() {
        cost_.assign(ncols_, 0.0);
        for (std::size_t j = 0; j < n_; ++j) cost_[j] = p_.c[j];
    }

    // y = cost_B^T * B^{-1}
    void compute_duals(std::vector<double>& y) const {
        y.assign(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = cost_[basic_[i]];
            if (cb == 0.0) continue;
            const double* row = binv_.data() + i * m_;
            for (std::size_t k = 0; k < m_; ++k) y[k] += cb * row[k];
        }
    }

    double reduced_cost(std::size_t j, const std::vector<double>& y) const {
        double d = cost_[j];
        for (const auto& [i, v] : cols_[j]) d -= y[i] * v;
        return d;
    }

    // w = B^{-1} a_j
    void ftran(std::size_t j, std::vector<double>& w) const {
        w.assign(m_, 0.0);
        for (const auto& [i, v] : cols_[j])
            for (std::size_t r = 0; r < m_; ++r) w[r] += binv_[r * m_ + i] * v;
    }

    void refactorize() {
        if (m_ == 0) return;
        // Gauss-Jordan inversion of the basis matrix.
        std::vector<double> a(m_ * m_, 0.0);
        for (std::size_t pos = 0; pos < m_; ++pos)
            for (const auto& [i, v] : cols_[basic_[pos]]) a[i * m_ + pos] = v;
        std::vector<double> inv(m_ * m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) inv[i * m_ + i] = 1.0;
        for (std::size_t col = 0; col < m_; ++col) {
            std::size_t piv = col;
            double best = std::abs(a[col * m_ + col]);
            for (std::size_t r = col + 1; r < m_; ++r) {
                const double v = std::abs(a[r * m_ + col]);
                if (v > best) {
                    best = v;
                    piv = r;
                }
            }
            if (best < 1e-12) throw Error("singular basis during refactorization");
            if (piv != col) {
                for (std::size_t k = 0; k < m_; ++k) {
                    std::swap(a[piv * m_ + k], a[col * m_ + k]);
                    std::swap(inv[piv * m_ + k], inv[col * m_ + k]);
                }
            }
            const double pv = a[col * m_ + col];
            for (std::size_t k = 0; k < m_; ++k) {
                a[col * m_ + k] /= pv;
                inv[col * m_ + k] /= pv;
            }
            for (std::size_t r = 0; r < m_; ++r) {
                if (r == col) continue;
                const double f = a[r * m_ + col];
                if (f == 0.0) continue;
                for (std::size_t k = 0; k < m_; ++k) {
                    a[r * m_ + k] -= f * a[col * m_ + k];
                    inv[r * m_ + k] -= f * inv[col * m_ + k];
                }
            }
        }
        // inv now maps: row-permuted... Gauss-Jordan on [A|I] yields A^{-1}
        binv_ = std::move(inv);
        recompute_basics();
    }

    void recompute_basics() {
        // x_B = B^{-1} * (0 - sum of nonbasic columns at their values)
        std::vector<double> rhs(m_, 0.0);
        for (std::size_t j = 0; j < ncols_; ++j) {
            if (state_[j] == VarState::Basic || x_[j] == 0.0) continue;
            for (const auto& [i, v] : cols_[j]) rhs[i] -= v * x_[j];
        }
        for (std::size_t r = 0; r < m_; ++r) {
            double s = 0.0;
            const double* row = binv_.data() + r * m_;
            for (std::size_t k = 0; k < m_; ++k) s += row[k] * rhs[k];
            x_[basic_[r]] = s;
        }
    }

    Status iterate(bool phase1) {
        std::vector<double> y, w;
        int degenerate_run = 0;
        int since_refactor = 0;
        int ray_retries = 0;
        const double flip_eps = 1e-11;
        while (true) {
            if (iters_ >= prm_.max_iterations) return Status::IterLimit;
            compute_duals(y);

            // Pricing: Dantzig by default, Bland when degeneracy persists.
            const bool bland = degenerate_run > 200;
            std::size_t enter = ncols_;
            double best_score = prm_.opt_tol;
            double enter_d = 0.0;
            for (std::size_t j = 0; j < ncols_; ++j) {
                const VarState st = state_[j];
                if (st == VarState::Basic) continue;
                if (lo_[j] == hi_[j]) continue; // fixed
                const double d = reduced_cost(j, y);
                double score = 0.0;
                if (st == VarState::AtLower && d < -prm_.opt_tol)
                    score = -d;
                else if (st == VarState::AtUpper && d > prm_.opt_tol)
                    score = d;
                else if (st == VarState::FreeAtZero && std::abs(d) > prm_.opt_tol)
                    score = std::abs(d);
                if (score > best_score) {
                    best_score = score;
                    enter = j;
                    enter_d = d;
                    if (bland) break; // first eligible index
                }
            }
            if (enter == ncols_) return Status::Optimal;

            const double dir = (state_[enter] == VarState::AtUpper ||
                                (state_[enter] == VarState::FreeAtZero && enter_d > 0.0))
                                   ? -1.0
                                   : 1.0;
            ftran(enter, w);

            // Ratio test: how far can x_enter move along dir before a basic
            // variable hits a bound or the entering variable hits its own
            // opposite bound.
            double t_max = kInf;
            if (std::isfinite(hi_[enter]) && std::isfinite(lo_[enter]))
                t_max = hi_[enter] - lo_[enter];
            int leave_pos = -1;
            double leave_bound = 0.0;
            double t_best = t_max;
            double pivot_mag = 0.0;
            for (std::size_t r = 0; r < m_; ++r) {
                const double rate = dir * w[r]; // x_B(r) moves at -rate per unit t
                if (std::abs(rate) < 1e-11) continue;
                const int bj = basic_[r];
                double bound, t;
                if (rate > 0.0) {
                    bound = lo_[bj];
                    if (!std::isfinite(bound)) continue;
                    t = (x_[bj] - bound) / rate;
                } else {
                    bound = hi_[bj];
                    if (!std::isfinite(bound)) continue;
                    t = (x_[bj] - bound) / rate; // rate < 0, x rises to ub
                }
                if (t < -flip_eps) t = 0.0;
                if (t < t_best - 1e-12 ||
                    (t < t_best + 1e-12 && std::abs(w[r]) > pivot_mag)) {
                    t_best = std::min(std::max(t, 0.0), t_max);
                    leave_pos = static_cast<int>(r);
                    leave_bound = bound;
                    pivot_mag = std::abs(w[r]);
                }
            }

            if (leave_pos < 0 && !std::isfinite(t_max)) {
                if (!phase1) return Status::Unbounded;
                // Phase 1 is bounded below by zero, so an apparent ray is
                // numerical: rebuild the inverse and retry.
                if (++ray_retries > 3) throw Error("phase-1 ray; numerical failure");
                refactorize();
                since_refactor = 0;
                continue;
            }

            const double t = leave_pos < 0 ? t_max : t_best;
            ++iters_;
            degenerate_run = t < flip_eps ? degenerate_run + 1 : 0;

            // Move the entering variable and all basics.
            if (t > 0.0) {
                x_[enter] += dir * t;
                for (std::size_t r = 0; r < m_; ++r)
                    if (w[r] != 0.0) x_[basic_[r]] -= dir * t * w[r];
            }

            if (leave_pos < 0) {
                // Bound flip: entering variable traversed its whole box.
                state_[enter] = dir > 0.0 ? VarState::AtUpper : VarState::AtLower;
                x_[enter] = dir > 0.0 ? hi_[enter] : lo_[enter];
                continue;
            }

            const int leave = basic_[leave_pos];
            x_[leave] = leave_bound; // land exactly on the blocking bound
            state_[leave] = leave_bound == lo_[leave] ? VarState::AtLower : VarState::AtUpper;
            if (lo_[leave] == hi_[leave]) state_[leave] = VarState::AtLower;
            basis_pos_[leave] = -1;
            basic_[leave_pos] = static_cast<int>(enter);
            basis_pos_[enter] = leave_pos;
            state_[enter] = VarState::Basic;

            // Rank-1 update of B^{-1}: eta column from w.
            const double wp = w[leave_pos];
            if (std::abs(wp) < 1e-12) {
                refactorize();
                since_refactor = 0;
                continue;
            }
            double* prow = binv_.data() + static_cast<std::size_t>(leave_pos) * m_;
            for (std::size_t k = 0; k < m_; ++k) prow[k] /= wp;
            for (std::size_t r = 0; r < m_; ++r) {
                if (static_cast<int>(r) == leave_pos) continue;
                const double f = w[r];
                if (f == 0.0) continue;
                double* row = binv_.data() + r * m_;
                for (std::size_t k = 0; k < m_; ++k) row[k] -= f * prow[k];
            }
            if (++since_refactor >= prm_.refactor_every) {
                refactorize();
                since_refactor = 0;
            }
        }
    }

    void finish(Solution& sol) {
        sol.x.assign(x_.begin(), x_.begin() + n_);
        // Snap barely-out-of-bound values (roundoff) onto their bounds.
        for (std::size_t j = 0; j < n_; ++j) {
            if (sol.x[j] < p_.lb[j]) sol.x[j] = p_.lb[j];
            if (sol.x[j] > p_.ub[j]) sol.x[j] = p_.ub[j];
        }
        double obj = 0.0;
        for (std::size_t j = 0; j < n_; ++j) obj += p_.c[j] * sol.x[j];
        sol.objective = obj;

        std::vector<double> y;
        compute_duals(y);
        sol.y = y;

        // Weak-duality bound: with A x - s = 0 the dual value is
        // sum over nonbasic columns of d_j * x_j (x_j rests on a bound).
        double g = 0.0;
        for (std::size_t j = 0; j < ncols_; ++j) {
            if (state_[j] == VarState::Basic) continue;
            const double d = reduced_cost(j, y);
            if (x_[j] != 0.0) g += d * x_[j];
        }
        sol.dual_objective = g;
        sol.rel_gap = std::abs(obj - g) / (1.0 + std::abs(obj));
    }
};

} // namespace

Solution solve(const Problem& p, const SolveParams& params) {
    Simplex s(p, params);
    return s.run();
}

namespace {

struct Node {
    std::vector<double> lb, ub;
    double bound; // parent LP objective (lower bound for the subtree)
};

/// Rounding repair: try to move every integer variable of a relaxation
/// solution onto an integer point inside the slack its rows leave, holding
/// the continuous variables fixed. Exclusivity-style formulations whose
/// indicators carry no cost are repaired to the node bound in one pass,
/// which lets branch and bound close the node without diving. Returns a
/// verified feasible solution or false; never accepts a violated row, so
/// the search stays exact.
bool repair_rounding(const Problem& p, const std::vector<int>& integer_vars, Solution& sol) {
    constexpr double kPad = 1e-9;   // interval slack granted when snapping
    constexpr double kVerify = 1e-7; // per-row violation budget after repair

    std::vector<double>& x = sol.x;
    std::vector<double> act(p.rows.size(), 0.0);
    for (std::size_t r = 0; r < p.rows.size(); ++r)
        for (const auto& [j, a] : p.rows[r].terms) act[r] += a * x[static_cast<std::size_t>(j)];

    std::vector<char> is_int(p.num_vars(), 0);
    for (int j : integer_vars) is_int[static_cast<std::size_t>(j)] = 1;
    std::vector<std::vector<std::pair<std::size_t, double>>> rows_of(p.num_vars());
    for (std::size_t r = 0; r < p.rows.size(); ++r)
        for (const auto& [j, a] : p.rows[r].terms)
            if (is_int[static_cast<std::size_t>(j)] && a != 0.0)
                rows_of[static_cast<std::size_t>(j)].push_back({r, a});

    for (int ji : integer_vars) {
        const auto j = static_cast<std::size_t>(ji);
        const double v = x[j];
        double lo = p.lb[j];
        double hi = p.ub[j];
        for (const auto& [r, a] : rows_of[j]) {
            const double rest = act[r] - a * v;
            const double blo = p.rows[r].lb - rest;
            const double bhi = p.rows[r].ub - rest;
            if (a > 0.0) {
                lo = std::max(lo, blo / a);
                hi = std::min(hi, bhi / a);
            } else {
                lo = std::max(lo, bhi / a);
                hi = std::min(hi, blo / a);
            }
        }
        lo -= kPad;
        hi += kPad;
        double snapped = std::round(v);
        if (snapped < lo) snapped = std::ceil(lo);
        if (snapped > hi) snapped = std::floor(hi);
        if (snapped < lo || snapped > hi) return false; // no integer fits
        for (const auto& [r, a] : rows_of[j]) act[r] += a * (snapped - v);
        x[j] = snapped;
    }

    for (std::size_t r = 0; r < p.rows.size(); ++r) {
        const double scale = kVerify * (1.0 + std::abs(act[r]));
        if (act[r] < p.rows[r].lb - scale || act[r] > p.rows[r].ub + scale) return false;
    }

    double obj = 0.0;
    for (std::size_t j = 0; j < p.num_vars(); ++j) obj += p.c[j] * x[j];
    sol.objective = obj;
    sol.status = Status::Optimal;
    return true;
}

} // namespace

Solution solve_mip(const Problem& p, const std::vector<int>& integer_vars,
                   const MipParams& params) {
    Problem work = p;
    Solution incumbent;
    bool have_incumbent = false;

    std::vector<Node> stack;
    stack.push_back({p.lb, p.ub, -kInf});
    int nodes = 0;

    auto fractional = [&](const Solution& s, int& var, double& frac) {
        var = -1;
        double worst = params.int_tol;
        for (int j : integer_vars) {
            const double v = s.x[j];
            const double f = std::abs(v - std::round(v));
            if (f > worst) {
                worst = f;
                var = j;
                frac = v;
            }
        }
        return var >= 0;
    };

    while (!stack.empty()) {
        if (++nodes > params.max_nodes) {
            double open = have_incumbent ? incumbent.objective : kInf;
            for (const auto& n : stack) open = std::min(open, n.bound);
            const double inc = have_incumbent ? incumbent.objective : kInf;
            const double gap = have_incumbent
                                   ? std::abs(inc - open) / (1.0 + std::abs(inc))
                                   : kInf;
            throw SolverTimeoutError("branch-and-bound node limit reached", inc, gap);
        }
        Node node = std::move(stack.back());
        stack.pop_back();
        if (have_incumbent &&
            node.bound >= incumbent.objective - params.rel_gap * (1.0 + std::abs(incumbent.objective)))
            continue;
        work.lb = node.lb;
        work.ub = node.ub;
        Solution rel = solve(work, params.lp);
        if (rel.status == Status::Infeasible) continue;
        if (rel.status == Status::Unbounded)
            throw Error("MILP relaxation unbounded; model is missing bounds");
        if (rel.status == Status::IterLimit)
            throw SolverTimeoutError("LP iteration limit inside branch-and-bound",
                                     have_incumbent ? incumbent.objective : kInf, kInf);
        if (have_incumbent &&
            rel.objective >= incumbent.objective - params.rel_gap * (1.0 + std::abs(incumbent.objective)))
            continue;

        int var = -1;
        double val = 0.0;
        if (!fractional(rel, var, val)) {
            // Integral: snap and accept.
            for (int j : integer_vars) rel.x[j] = std::round(rel.x[j]);
            incumbent = rel;
            have_incumbent = true;
            continue;
        }

        // Primal heuristic before branching: if the fractional point rounds
        // to a feasible integral one, adopt it, and when it already matches
        // this node's bound the subtree holds nothing better.
        Solution repaired = rel;
        if (repair_rounding(p, integer_vars, repaired)) {
            if (!have_incumbent || repaired.objective < incumbent.objective) {
                incumbent = repaired;
                have_incumbent = true;
            }
            if (repaired.objective <=
                rel.objective + params.rel_gap * (1.0 + std::abs(repaired.objective)))
                continue;
        }

        Node down{node.lb, node.ub, rel.objective};
        down.ub[var] = std::floor(val);
        Node up{std::move(node.lb), std::move(node.ub), rel.objective};
        up.lb[var] = std::ceil(val);
        // Explore the nearer side first (DFS pushes it last).
        if (val - std::floor(val) <= 0.5) {
            stack.push_back(std::move(up));
            stack.push_back(std::move(down));
        } else {
            stack.push_back(std::move(down));
            stack.push_back(std::move(up));
        }
    }

    if (!have_incumbent) {
        Solution s;
        s.status = Status::Infeasible;
        return s;
    }
    incumbent.status = Status::Optimal;
    incumbent.rel_gap = 0.0;
    return incumbent;
}

} // namespace bessim::lp
