#include "qcc/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qcc::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-10;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-9;

// Dense working form: A x = b with per-variable bounds [lo, hi]; columns are
// structural vars, then row slacks, then phase-1 artificials.
struct Tableau {
    int m = 0;                      // rows
    int n = 0;                      // total columns
    std::vector<double> a;          // m x n, row-major
    std::vector<double> b;          // m
    std::vector<double> lo, hi;     // n
    std::vector<double> cost;       // n (phase-2 objective, maximization)

    double& at(int r, int c) { return a[static_cast<size_t>(r) * n + c]; }
    double at(int r, int c) const { return a[static_cast<size_t>(r) * n + c]; }
};

class Simplex {
  public:
    explicit Simplex(Tableau t) : t_(std::move(t)) {
        binv_.assign(static_cast<size_t>(t_.m) * t_.m, 0.0);
        basis_.assign(t_.m, -1);
        at_upper_.assign(t_.n, false);
        xb_.assign(t_.m, 0.0);
    }

    // basis[i] = column basic in row i; B must be invertible.
    void set_basis(const std::vector<int>& basis) {
        basis_ = basis;
        rebuild_inverse();
        compute_xb();
    }

    // Nonbasic column rests at its upper bound instead of its lower one.
    void set_at_upper(int col, bool v) { at_upper_[col] = v; }

    bool optimize(const std::vector<double>& cost, int max_iters = 200000);

    double value(int col) const {
        for (int i = 0; i < t_.m; ++i)
            if (basis_[i] == col) return xb_[i];
        return at_upper_[col] ? t_.hi[col] : t_.lo[col];
    }

    bool is_basic(int col) const {
        for (int i = 0; i < t_.m; ++i)
            if (basis_[i] == col) return true;
        return false;
    }

    Tableau& tab() { return t_; }
    const std::vector<int>& basis() const { return basis_; }
    bool unbounded = false;

  private:
    void rebuild_inverse();
    void compute_xb();
    // w = B^-1 * A_col
    void ftran(int col, std::vector<double>& w) const;

    Tableau t_;
    std::vector<double> binv_;  // m x m
    std::vector<int> basis_;
    std::vector<bool> at_upper_;
    std::vector<double> xb_;
    int degenerate_streak_ = 0;
};

void Simplex::rebuild_inverse() {
    const int m = t_.m;
    // Gauss-Jordan on [B | I].
    std::vector<double> work(static_cast<size_t>(m) * 2 * m, 0.0);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) work[i * 2 * m + j] = t_.at(i, basis_[j]);
        work[i * 2 * m + m + i] = 1.0;
    }
    for (int col = 0; col < m; ++col) {
        int piv = -1;
        double best = kPivotTol;
        for (int r = col; r < m; ++r) {
            const double v = std::abs(work[r * 2 * m + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (piv < 0) throw std::runtime_error("lp: singular basis");
        if (piv != col)
            for (int j = 0; j < 2 * m; ++j) std::swap(work[piv * 2 * m + j], work[col * 2 * m + j]);
        const double d = work[col * 2 * m + col];
        for (int j = 0; j < 2 * m; ++j) work[col * 2 * m + j] /= d;
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            const double f = work[r * 2 * m + col];
            if (f == 0.0) continue;
            for (int j = 0; j < 2 * m; ++j) work[r * 2 * m + j] -= f * work[col * 2 * m + j];
        }
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) binv_[i * m + j] = work[i * 2 * m + m + j];
}

void Simplex::compute_xb() {
    const int m = t_.m;
    std::vector<double> rhs(t_.b);
    for (int c = 0; c < t_.n; ++c) {
        if (is_basic(c)) continue;
        const double xv = at_upper_[c] ? t_.hi[c] : t_.lo[c];
        if (xv == 0.0) continue;
        for (int i = 0; i < m; ++i) {
            const double aij = t_.at(i, c);
            if (aij != 0.0) rhs[i] -= aij * xv;
        }
    }
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) s += binv_[i * m + j] * rhs[j];
        xb_[i] = s;
    }
}

void Simplex::ftran(int col, std::vector<double>& w) const {
    const int m = t_.m;
    w.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) {
            const double aij = t_.at(j, col);
            if (aij != 0.0) s += binv_[i * m + j] * aij;
        }
        w[i] = s;
    }
}

bool Simplex::optimize(const std::vector<double>& cost, int max_iters) {
    const int m = t_.m;
    const int n = t_.n;
    unbounded = false;
    std::vector<double> y(m), w(m);
    std::vector<bool> basic_flag(n, false);

    for (int iter = 0; iter < max_iters; ++iter) {
        if (iter > 0 && iter % 256 == 0) {
            rebuild_inverse();  // refresh accumulated update error
            compute_xb();
        }
        basic_flag.assign(n, false);
        for (int i = 0; i < m; ++i) basic_flag[basis_[i]] = true;

        // Duals y = c_B * B^-1.
        for (int j = 0; j < m; ++j) {
            double s = 0.0;
            for (int i = 0; i < m; ++i) s += cost[basis_[i]] * binv_[i * m + j];
            y[j] = s;
        }

        // Pricing: Dantzig by default, Bland under a degenerate streak.
        const bool bland = degenerate_streak_ > 2 * m + 50;
        int enter = -1;
        double best_score = kCostTol;
        int enter_dir = 0;
        for (int c = 0; c < n; ++c) {
            if (basic_flag[c]) continue;
            double d = cost[c];
            for (int i = 0; i < m; ++i) {
                const double aic = t_.at(i, c);
                if (aic != 0.0) d -= y[i] * aic;
            }
            int dir = 0;
            if (!at_upper_[c] && d > kCostTol) dir = +1;           // raise from lower bound
            else if (at_upper_[c] && d < -kCostTol) dir = -1;      // lower from upper bound
            if (dir == 0) continue;
            const double score = std::abs(d);
            if (bland) {
                enter = c;
                enter_dir = dir;
                break;
            }
            if (score > best_score) {
                best_score = score;
                enter = c;
                enter_dir = dir;
            }
        }
        if (enter < 0) return true;  // optimal

        ftran(enter, w);

        // Ratio test: entering moves by t in direction enter_dir; basic i
        // changes by -enter_dir * w[i] * t.
        double t_max = t_.hi[enter] - t_.lo[enter];  // bound flip distance
        int leave = -1;
        int leave_to_upper = 0;
        for (int i = 0; i < m; ++i) {
            const double delta = -enter_dir * w[i];
            if (delta < -kPivotTol) {  // basic decreases toward its lower bound
                const double room = xb_[i] - t_.lo[basis_[i]];
                const double t_i = std::max(0.0, room) / (-delta);
                if (t_i < t_max - 1e-12 || (t_i < t_max + 1e-12 && leave >= 0 && basis_[i] < basis_[leave])) {
                    t_max = t_i;
                    leave = i;
                    leave_to_upper = 0;
                }
            } else if (delta > kPivotTol && t_.hi[basis_[i]] < kInf) {  // toward upper
                const double room = t_.hi[basis_[i]] - xb_[i];
                const double t_i = std::max(0.0, room) / delta;
                if (t_i < t_max - 1e-12 || (t_i < t_max + 1e-12 && leave >= 0 && basis_[i] < basis_[leave])) {
                    t_max = t_i;
                    leave = i;
                    leave_to_upper = 1;
                }
            }
        }

        if (t_max >= kInf / 2) {
            unbounded = true;
            return false;
        }
        degenerate_streak_ = (t_max < 1e-12) ? degenerate_streak_ + 1 : 0;

        // Apply step to basic values.
        for (int i = 0; i < m; ++i) xb_[i] += -enter_dir * w[i] * t_max;

        if (leave < 0) {
            // Bound flip: entering var moves to its other bound.
            at_upper_[enter] = !at_upper_[enter];
            continue;
        }

        // Pivot: entering becomes basic in row `leave`.
        const int leaving_col = basis_[leave];
        at_upper_[leaving_col] = leave_to_upper != 0;
        basis_[leave] = enter;
        xb_[leave] = (enter_dir > 0 ? t_.lo[enter] + t_max : t_.hi[enter] - t_max);

        // Update B^-1 by eliminating column `enter` (pivot row `leave`).
        const double piv = w[leave];
        if (std::abs(piv) < kPivotTol) {
            rebuild_inverse();
            compute_xb();
            continue;
        }
        for (int j = 0; j < m; ++j) binv_[leave * m + j] /= piv;
        for (int i = 0; i < m; ++i) {
            if (i == leave) continue;
            const double f = w[i];
            if (f == 0.0) continue;
            for (int j = 0; j < m; ++j) binv_[i * m + j] -= f * binv_[leave * m + j];
        }
        // xb for other rows already stepped above; recompute leave row value
        // exactly on occasion via periodic rebuilds.
    }
    throw std::runtime_error("lp: iteration limit exceeded");
}

}  // namespace

Result solve(const Problem& p) {
    Result res;
    const int nv = p.num_vars;
    const int mr = static_cast<int>(p.rows.size());

    if (static_cast<int>(p.objective.size()) != nv ||
        static_cast<int>(p.var_upper.size()) != nv)
        throw std::invalid_argument("lp: objective/var_upper size mismatch");

    Tableau t;
    t.m = mr;
    t.n = nv + mr + mr;  // structural + slack + artificial
    t.a.assign(static_cast<size_t>(t.m) * t.n, 0.0);
    t.b.assign(mr, 0.0);
    t.lo.assign(t.n, 0.0);
    t.hi.assign(t.n, 0.0);

    for (int j = 0; j < nv; ++j) t.hi[j] = p.var_upper[j];

    // Row scaling for mixed magnitudes.
    for (int i = 0; i < mr; ++i) {
        const Row& r = p.rows[i];
        if (!std::isfinite(r.hi)) throw std::invalid_argument("lp: row hi must be finite: " + r.name);
        if (r.lo > r.hi + 1e-15) throw std::invalid_argument("lp: row lo > hi: " + r.name);
        double scale = std::abs(r.hi) > std::abs(r.lo) ? std::abs(r.hi) : std::abs(r.lo);
        for (const auto& [j, v] : r.coeffs) scale = std::max(scale, std::abs(v));
        if (scale <= 0) scale = 1.0;
        for (const auto& [j, v] : r.coeffs) {
            if (j < 0 || j >= nv) throw std::invalid_argument("lp: bad column index");
            t.at(i, j) += v / scale;
        }
        // a.x + s = hi, 0 <= s <= hi - lo.
        t.at(i, nv + i) = 1.0;
        t.b[i] = r.hi / scale;
        t.lo[nv + i] = 0.0;
        t.hi[nv + i] = (r.hi - r.lo) / scale;
        if (!(t.hi[nv + i] >= 0)) t.hi[nv + i] = 0.0;
    }

    // Initial point: structural at 0, slack clamped into range; artificial
    // absorbs the residual with +-1 coefficient so it starts nonnegative.
    std::vector<int> basis(mr);
    std::vector<bool> slack_at_upper(mr, false);
    for (int i = 0; i < mr; ++i) {
        const double resid = t.b[i];  // all x=0
        const double s0 = std::clamp(resid, t.lo[nv + i], t.hi[nv + i]);
        slack_at_upper[i] = (s0 == t.hi[nv + i] && t.hi[nv + i] > 0.0);
        // slack nonbasic at nearest bound; artificial basic = resid - s0
        const double art = resid - s0;
        const int acol = nv + mr + i;
        t.at(i, acol) = art >= 0 ? 1.0 : -1.0;
        t.lo[acol] = 0.0;
        t.hi[acol] = kInf;
        basis[i] = acol;
    }

    Simplex sx(t);
    for (int i = 0; i < mr; ++i)
        if (slack_at_upper[i]) sx.set_at_upper(nv + i, true);
    sx.set_basis(basis);

    // Phase 1: minimize sum of artificials (maximize negative sum).
    std::vector<double> phase1(t.n, 0.0);
    for (int i = 0; i < mr; ++i) phase1[nv + mr + i] = -1.0;
    sx.optimize(phase1);

    double infeas = 0.0;
    for (int i = 0; i < mr; ++i) infeas += sx.value(nv + mr + i);
    if (infeas > 1e-7) {
        res.status = Status::Infeasible;
        for (int i = 0; i < mr; ++i)
            if (sx.value(nv + mr + i) > 1e-7)
                res.violated_rows.push_back(p.rows[i].name.empty()
                                                ? ("row " + std::to_string(i))
                                                : p.rows[i].name);
        return res;
    }

    // Pin artificials to zero and run the real objective.
    for (int i = 0; i < mr; ++i) sx.tab().hi[nv + mr + i] = 0.0;
    std::vector<double> phase2(t.n, 0.0);
    for (int j = 0; j < nv; ++j) phase2[j] = p.maximize ? p.objective[j] : -p.objective[j];
    const bool ok = sx.optimize(phase2);
    if (!ok && sx.unbounded) {
        res.status = Status::Unbounded;
        return res;
    }

    res.status = Status::Optimal;
    res.solution.assign(nv, 0.0);
    double obj = 0.0;
    for (int j = 0; j < nv; ++j) {
        double v = sx.value(j);
        v = std::clamp(v, 0.0, p.var_upper[j]);
        res.solution[j] = v;
        obj += p.objective[j] * v;
    }
    res.objective_value = obj;
    return res;
}

}  // namespace qcc::lp
