#include "psh/simplex.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

namespace psh {

namespace {

constexpr unsigned char kAtLower = 0;
constexpr unsigned char kAtUpper = 1;
constexpr unsigned char kBasic = 2;
constexpr unsigned char kFree = 3;

// Standard computational form: min c'x, Ax = b, l <= x <= u, where the last m
// columns are row slacks whose bounds encode the row sense.
struct StdForm {
    int m = 0;        // rows
    int n = 0;        // structural columns
    int total = 0;    // n + m
    std::vector<std::vector<std::pair<int, double>>> cols;  // (row, coeff)
    std::vector<double> cost, lb, ub, b;
};

StdForm build_std_form(const Milp& model, const std::vector<double>& lower,
                       const std::vector<double>& upper) {
    StdForm f;
    f.m = (int)model.rows.size();
    f.n = (int)model.variables.size();
    f.total = f.n + f.m;
    f.cols.resize(f.total);
    f.cost.assign(f.total, 0.0);
    f.lb.assign(f.total, 0.0);
    f.ub.assign(f.total, 0.0);
    f.b.resize(f.m);
    for (int j = 0; j < f.n; ++j) {
        f.cost[j] = model.variables[j].objective_coeff;
        f.lb[j] = lower[j];
        f.ub[j] = upper[j];
    }
    for (int i = 0; i < f.m; ++i) {
        const ConstraintRow& row = model.rows[i];
        f.b[i] = row.rhs;
        for (const auto& [j, a] : row.terms) f.cols[j].emplace_back(i, a);
        int s = f.n + i;
        f.cols[s].emplace_back(i, 1.0);
        switch (row.sense) {
            case RowSense::LessEqual: f.lb[s] = 0.0; f.ub[s] = kInf; break;
            case RowSense::Equal: f.lb[s] = 0.0; f.ub[s] = 0.0; break;
            case RowSense::GreaterEqual: f.lb[s] = -kInf; f.ub[s] = 0.0; break;
        }
    }
    return f;
}

class Simplex {
public:
    Simplex(const StdForm& f, const SimplexOptions& opt) : f_(f), opt_(opt) {
        max_iters_ = opt.max_iterations > 0 ? opt.max_iterations : 20000 + 40 * f_.m;
    }

    LpStatus run(const Basis* warm) {
        if (!init_basis(warm)) init_cold();
        if (!phase1()) return LpStatus::Infeasible;
        return phase2();
    }

    // Accessors used to assemble the LpSolution.
    double value_of(int j) const {
        if (stat_[j] == kBasic) return xB_[pos_[j]];
        return nonbasic_value(j);
    }
    const std::vector<unsigned char>& statuses() const { return stat_; }
    Eigen::VectorXd duals() const { return price(real_cost_by_row()); }
    int iterations() const { return iters_; }
    const std::vector<double>& unbounded_ray() const { return ray_; }

    bool degenerate(double tol) const {
        for (int i = 0; i < f_.m; ++i) {
            int j = basic_[i];
            if ((std::isfinite(f_.lb[j]) && std::abs(xB_[i] - f_.lb[j]) <= tol) ||
                (std::isfinite(f_.ub[j]) && std::abs(xB_[i] - f_.ub[j]) <= tol))
                return true;
        }
        return false;
    }

private:
    const StdForm& f_;
    SimplexOptions opt_;
    int max_iters_ = 0;
    int iters_ = 0;
    std::vector<int> basic_;   // row position -> column
    std::vector<int> pos_;     // column -> row position, -1 if nonbasic
    std::vector<unsigned char> stat_;
    // Basis inverse in product form: B^{-1} = E_k ... E_1 B0^{-1}, where B0 is
    // the factorized matrix and each eta records one pivot. Basis matrices
    // here are very sparse (a handful of nonzeros per column).
    // mutable: SparseLU::transpose() is non-const, used from const btran()
    mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
    Eigen::FullPivLU<Eigen::MatrixXd> full_lu_;
    bool use_full_lu_ = false;
    bool factored_ = false;  // identity basis shortcut before first refactor
    struct Eta {
        int r;
        double piv;
        Eigen::VectorXd d;  // pivot direction, d(r) == piv
    };
    std::vector<Eta> etas_;
    std::vector<double> xB_;
    std::vector<double> ray_;
    int pivots_since_refactor_ = 0;
    bool bland_ = false;
    int stall_ = 0;

    double nonbasic_value(int j) const {
        switch (stat_[j]) {
            case kAtLower: return f_.lb[j];
            case kAtUpper: return f_.ub[j];
            default: return 0.0;  // free at zero
        }
    }

    void init_cold() {
        stat_.assign(f_.total, kAtLower);
        for (int j = 0; j < f_.n; ++j) {
            if (std::isfinite(f_.lb[j])) stat_[j] = kAtLower;
            else if (std::isfinite(f_.ub[j])) stat_[j] = kAtUpper;
            else stat_[j] = kFree;
        }
        basic_.resize(f_.m);
        pos_.assign(f_.total, -1);
        for (int i = 0; i < f_.m; ++i) {
            int s = f_.n + i;
            basic_[i] = s;
            stat_[s] = kBasic;
            pos_[s] = i;
        }
        factored_ = false;  // all-slack basis is the identity
        etas_.clear();
        recompute_xB();
    }

    // B^{-1} v in place.
    void ftran(Eigen::VectorXd& v) const {
        if (factored_) {
            if (use_full_lu_) v = full_lu_.solve(v);
            else v = lu_.solve(v);
        }
        for (const Eta& e : etas_) {
            double a = v(e.r) / e.piv;
            if (a != 0.0) {
                v -= a * e.d;
                v(e.r) = a;
            } else {
                v(e.r) = 0.0;
            }
        }
    }

    // B^{-T} c in place.
    void btran(Eigen::VectorXd& c) const {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double s = it->d.dot(c) - it->piv * c(it->r);
            c(it->r) = (c(it->r) - s) / it->piv;
        }
        if (factored_)
            c = use_full_lu_ ? full_lu_.transpose().solve(c).eval()
                             : lu_.transpose().solve(c).eval();
    }

    bool init_basis(const Basis* warm) {
        if (!warm || (int)warm->col_status.size() != f_.total) return false;
        stat_ = warm->col_status;
        basic_.clear();
        pos_.assign(f_.total, -1);
        for (int j = 0; j < f_.total; ++j) {
            if (stat_[j] == kBasic) {
                pos_[j] = (int)basic_.size();
                basic_.push_back(j);
            } else if (stat_[j] == kAtLower && !std::isfinite(f_.lb[j])) {
                stat_[j] = std::isfinite(f_.ub[j]) ? kAtUpper : kFree;
            } else if (stat_[j] == kAtUpper && !std::isfinite(f_.ub[j])) {
                stat_[j] = std::isfinite(f_.lb[j]) ? kAtLower : kFree;
            }
        }
        if ((int)basic_.size() != f_.m) return false;
        return refactorize();
    }

    bool refactorize() {
        etas_.clear();
        if (f_.m > 0) {
            std::vector<Eigen::Triplet<double>> trips;
            for (int i = 0; i < f_.m; ++i)
                for (const auto& [r, a] : f_.cols[basic_[i]]) trips.emplace_back(r, i, a);
            Eigen::SparseMatrix<double> B(f_.m, f_.m);
            B.setFromTriplets(trips.begin(), trips.end());
            lu_.compute(B);
            if (lu_.info() == Eigen::Success) {
                use_full_lu_ = false;
            } else {
                // Dense full pivoting as the robust fallback.
                Eigen::MatrixXd Bd = Eigen::MatrixXd(B);
                full_lu_.compute(Bd);
                if (!full_lu_.isInvertible()) return false;
                use_full_lu_ = true;
            }
        }
        factored_ = true;
        recompute_xB();
        pivots_since_refactor_ = 0;
        return true;
    }

    void recompute_xB() {
        Eigen::VectorXd r(f_.m);
        for (int i = 0; i < f_.m; ++i) r(i) = f_.b[i];
        for (int j = 0; j < f_.total; ++j) {
            if (stat_[j] == kBasic) continue;
            double v = nonbasic_value(j);
            if (v == 0.0) continue;
            for (const auto& [i, a] : f_.cols[j]) r(i) -= a * v;
        }
        ftran(r);
        xB_.assign(f_.m, 0.0);
        for (int i = 0; i < f_.m; ++i) xB_[i] = r(i);
    }

    Eigen::VectorXd price(const Eigen::VectorXd& cB) const {
        Eigen::VectorXd y = cB;
        btran(y);
        return y;
    }

    Eigen::VectorXd real_cost_by_row() const {
        Eigen::VectorXd cB(f_.m);
        for (int i = 0; i < f_.m; ++i) cB(i) = f_.cost[basic_[i]];
        return cB;
    }

    double reduced_cost(int j, const Eigen::VectorXd& y, const std::vector<double>& cost) const {
        double d = cost[j];
        for (const auto& [i, a] : f_.cols[j]) d -= y(i) * a;
        return d;
    }

    double infeasibility() const {
        double s = 0.0;
        for (int i = 0; i < f_.m; ++i) {
            int j = basic_[i];
            if (xB_[i] < f_.lb[j]) s += f_.lb[j] - xB_[i];
            else if (xB_[i] > f_.ub[j]) s += xB_[i] - f_.ub[j];
        }
        return s;
    }

    // Entering column choice. sigma = +1 to increase, -1 to decrease.
    int choose_entering(const Eigen::VectorXd& y, const std::vector<double>& cost,
                        int& sigma) const {
        int best = -1;
        double best_score = opt_.dual_tol;
        int best_sigma = 0;
        for (int j = 0; j < f_.total; ++j) {
            if (stat_[j] == kBasic) continue;
            double d = reduced_cost(j, y, cost);
            int s = 0;
            double score = 0.0;
            if ((stat_[j] == kAtLower || stat_[j] == kFree) && d < -opt_.dual_tol) {
                s = +1;
                score = -d;
            } else if ((stat_[j] == kAtUpper || stat_[j] == kFree) && d > opt_.dual_tol) {
                s = -1;
                score = d;
            } else {
                continue;
            }
            if (bland_) {  // lowest eligible index
                sigma = s;
                return j;
            }
            if (score > best_score) {
                best_score = score;
                best = j;
                best_sigma = s;
            }
        }
        sigma = best_sigma;
        return best;
    }

    struct RatioResult {
        double t = kInf;
        int leaving_row = -1;       // -1: bound flip (or unbounded if t infinite)
        unsigned char exit_stat = kAtLower;
    };

    // Ratio test shared by both phases. In phase 1, a basic variable outside a
    // bound that is moving back toward it blocks when it reaches that bound.
    RatioResult ratio_test(const Eigen::VectorXd& d, int q, int sigma) const {
        RatioResult res;
        // entering variable's own opposite bound
        double span = f_.ub[q] - f_.lb[q];
        if (std::isfinite(span)) res.t = span;
        double best_pivot = 0.0;
        for (int i = 0; i < f_.m; ++i) {
            double rate = -sigma * d(i);  // d(xB_i)/dt
            if (std::abs(rate) <= opt_.pivot_tol) continue;
            int j = basic_[i];
            double x = xB_[i];
            double t_i = kInf;
            unsigned char exit_stat = kAtLower;
            if (rate > 0.0) {
                if (x < f_.lb[j] - opt_.feas_tol) {
                    // infeasible below and recovering: blocks at its lower bound
                    exit_stat = kAtLower;
                    t_i = (f_.lb[j] - x) / rate;
                } else if (x <= f_.ub[j] + opt_.feas_tol) {
                    exit_stat = kAtUpper;
                    if (std::isfinite(f_.ub[j])) t_i = (f_.ub[j] - x) / rate;
                }  // already above upper and moving further up: no block
            } else {
                if (x > f_.ub[j] + opt_.feas_tol) {
                    exit_stat = kAtUpper;
                    t_i = (x - f_.ub[j]) / (-rate);
                } else if (x >= f_.lb[j] - opt_.feas_tol) {
                    exit_stat = kAtLower;
                    if (std::isfinite(f_.lb[j])) t_i = (x - f_.lb[j]) / (-rate);
                }  // already below lower and moving further down: no block
            }
            if (t_i == kInf) continue;
            if (t_i < 0.0) t_i = 0.0;  // degenerate, already at/over the bound
            bool better = false;
            if (t_i < res.t - 1e-12) {
                better = true;  // strictly smaller step wins
            } else if (t_i <= res.t + 1e-12 && res.leaving_row >= 0) {
                // tie between row candidates: larger pivot, then lower index
                if (std::abs(rate) > best_pivot + 1e-12) better = true;
                else if (std::abs(rate) >= best_pivot - 1e-12 && j < basic_[res.leaving_row])
                    better = true;
            }
            if (better) {
                res.t = std::min(res.t, t_i);
                res.leaving_row = i;
                res.exit_stat = exit_stat;
                best_pivot = std::abs(rate);
            }
        }
        return res;
    }

    void apply_pivot(int q, int sigma, const Eigen::VectorXd& d, const RatioResult& rr) {
        double t = rr.t;
        if (rr.leaving_row < 0) {
            // bound flip: entering moves to its opposite bound
            for (int i = 0; i < f_.m; ++i) xB_[i] -= sigma * t * d(i);
            stat_[q] = (sigma > 0) ? kAtUpper : kAtLower;
            return;
        }
        int r = rr.leaving_row;
        double entering_value = nonbasic_value(q) + sigma * t;
        for (int i = 0; i < f_.m; ++i) xB_[i] -= sigma * t * d(i);
        int leaving_col = basic_[r];
        stat_[leaving_col] = rr.exit_stat;
        pos_[leaving_col] = -1;
        basic_[r] = q;
        stat_[q] = kBasic;
        pos_[q] = r;
        xB_[r] = entering_value;
        etas_.push_back({r, d(r), d});
        if (++pivots_since_refactor_ >= opt_.refactor_every) {
            if (!refactorize()) throw make_error("NumericalBreakdown", "singular basis");
        }
    }

    bool phase1() {
        double last = kInf;
        while (true) {
            double infeas = infeasibility();
            if (infeas <= opt_.feas_tol * (1.0 + f_.m)) {
                if (infeas > 0) repair_tiny_infeasibility();
                return true;
            }
            if (++iters_ > max_iters_)
                throw make_error("NumericalBreakdown", "phase 1 iteration limit");
            track_progress(infeas, last);
            // piecewise-linear infeasibility cost on the current basis
            Eigen::VectorXd cB(f_.m);
            std::vector<double> cost(f_.total, 0.0);
            for (int i = 0; i < f_.m; ++i) {
                int j = basic_[i];
                double c = 0.0;
                if (xB_[i] < f_.lb[j] - opt_.feas_tol) c = -1.0;
                else if (xB_[i] > f_.ub[j] + opt_.feas_tol) c = 1.0;
                cB(i) = c;
                cost[j] = c;
            }
            Eigen::VectorXd y = price(cB);
            int sigma = 0;
            int q = choose_entering(y, cost, sigma);
            if (q < 0) return false;  // locally optimal and still infeasible
            Eigen::VectorXd d = direction(q);
            RatioResult rr = ratio_test(d, q, sigma);
            if (rr.leaving_row < 0 && !std::isfinite(rr.t)) {
                // An improving phase-1 direction always hits the violated
                // bound of some infeasible basic; reaching here means the
                // pivot tolerance filtered every candidate out.
                throw make_error("NumericalBreakdown", "phase 1 lost all pivot candidates");
            }
            apply_pivot(q, sigma, d, rr);
        }
    }

    LpStatus phase2() {
        std::vector<double> cost = f_.cost;
        double last = kInf;
        while (true) {
            if (++iters_ > max_iters_)
                throw make_error("NumericalBreakdown", "phase 2 iteration limit");
            track_progress(objective_value(), last);
            Eigen::VectorXd y = price(real_cost_by_row());
            int sigma = 0;
            int q = choose_entering(y, cost, sigma);
            if (q < 0) return LpStatus::Optimal;
            Eigen::VectorXd d = direction(q);
            RatioResult rr = ratio_test(d, q, sigma);
            if (rr.leaving_row < 0 && !std::isfinite(rr.t)) {
                build_ray(q, sigma, d);
                return LpStatus::Unbounded;
            }
            apply_pivot(q, sigma, d, rr);
        }
    }

    Eigen::VectorXd direction(int q) const {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(f_.m);
        for (const auto& [i, a] : f_.cols[q]) d(i) += a;
        ftran(d);
        return d;
    }

    double objective_value() const {
        double v = 0.0;
        for (int j = 0; j < f_.total; ++j) v += f_.cost[j] * value_of(j);
        return v;
    }

    void track_progress(double merit, double& last) {
        if (merit < last - 1e-12) {
            last = merit;
            stall_ = 0;
            bland_ = false;
        } else if (++stall_ > 500) {
            bland_ = true;
        }
    }

    void repair_tiny_infeasibility() {
        for (int i = 0; i < f_.m; ++i) {
            int j = basic_[i];
            if (xB_[i] < f_.lb[j]) xB_[i] = f_.lb[j];
            else if (xB_[i] > f_.ub[j]) xB_[i] = f_.ub[j];
        }
    }

    void build_ray(int q, int sigma, const Eigen::VectorXd& d) {
        ray_.assign(f_.n, 0.0);
        if (q < f_.n) ray_[q] = sigma;
        for (int i = 0; i < f_.m; ++i)
            if (basic_[i] < f_.n) ray_[basic_[i]] = -sigma * d(i);
    }
};

}  // namespace

LpSolution solve_lp_relaxation(const Milp& model, const SimplexOptions& options) {
    std::vector<double> lo(model.variables.size()), hi(model.variables.size());
    for (size_t j = 0; j < model.variables.size(); ++j) {
        lo[j] = model.variables[j].lower;
        hi[j] = model.variables[j].upper;
    }
    return solve_lp_relaxation(model, lo, hi, options, nullptr, nullptr);
}

LpSolution solve_lp_relaxation(const Milp& model, const std::vector<double>& lower,
                               const std::vector<double>& upper, const SimplexOptions& options,
                               const Basis* warm_start, Basis* final_basis) {
    for (size_t j = 0; j < model.variables.size(); ++j)
        if (lower[j] > upper[j] + 1e-12) {
            LpSolution sol;
            sol.status = LpStatus::Infeasible;
            return sol;
        }
    StdForm f = build_std_form(model, lower, upper);
    Simplex splx(f, options);
    LpSolution sol;
    sol.status = splx.run(warm_start);
    sol.iterations = splx.iterations();
    if (final_basis) final_basis->col_status = splx.statuses();
    sol.primal.resize(f.n);
    for (int j = 0; j < f.n; ++j) sol.primal[j] = splx.value_of(j);
    if (sol.status != LpStatus::Optimal) return sol;

    Eigen::VectorXd y = splx.duals();
    sol.duals.assign(f.m, 0.0);
    for (int i = 0; i < f.m; ++i) sol.duals[i] = y(i);
    sol.reduced_costs.assign(f.n, 0.0);
    sol.objective = model.constant_offset;
    for (int j = 0; j < f.n; ++j) sol.objective += f.cost[j] * sol.primal[j];
    // dual objective: y'b plus bound contributions of nonbasic columns
    sol.dual_objective = model.constant_offset;
    for (int i = 0; i < f.m; ++i) sol.dual_objective += y(i) * f.b[i];
    const auto& stat = splx.statuses();
    for (int j = 0; j < f.total; ++j) {
        if (stat[j] == kBasic) continue;
        double d = f.cost[j];
        for (const auto& [i, a] : f.cols[j]) d -= y(i) * a;
        if (j < f.n) sol.reduced_costs[j] = d;
        double v = stat[j] == kAtLower ? f.lb[j] : stat[j] == kAtUpper ? f.ub[j] : 0.0;
        if (v != 0.0) sol.dual_objective += d * v;
    }
    sol.degenerate = splx.degenerate(options.feas_tol);
    return sol;
}

}  // namespace psh
