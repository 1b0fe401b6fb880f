#include "psh/solver.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <queue>

namespace psh {

LpSolution builtin_solve_lp(const Milp& model, const SimplexOptions& options) {
    return solve_lp_relaxation(model, options);
}

namespace {

struct Node {
    long id = 0;
    double bound = -kInf;
    std::vector<double> lower, upper;
    Basis basis;
    bool has_basis = false;
};

struct NodeOrder {
    // best bound first; FIFO on ties
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.id > b.id;
    }
};

double relative_gap(double incumbent, double bound) {
    return (incumbent - bound) / std::max(1e-10, std::abs(incumbent));
}

}  // namespace

MipSolution builtin_solve_mip(const Milp& model, const MipOptions& options) {
    if (options.rel_gap < 0.0)
        throw make_error("ValueOutOfBounds", "rel_gap must be >= 0");
    std::vector<int> binaries;
    for (int j = 0; j < (int)model.variables.size(); ++j)
        if (model.variables[j].integrality == Integrality::Binary) binaries.push_back(j);

    MipSolution sol;
    sol.objective = kInf;
    sol.best_bound = -kInf;

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    Node root;
    root.lower.resize(model.variables.size());
    root.upper.resize(model.variables.size());
    for (size_t j = 0; j < model.variables.size(); ++j) {
        root.lower[j] = model.variables[j].lower;
        root.upper[j] = model.variables[j].upper;
    }
    open.push(std::move(root));

    long next_id = 1;
    bool have_incumbent = false;
    double reported_bound = -kInf;

    while (!open.empty()) {
        // the queue top is the weakest open bound, hence the global bound
        double open_bound = open.top().bound;
        double global_bound = have_incumbent ? std::min(sol.objective, open_bound) : open_bound;
        if (std::isfinite(global_bound))
            reported_bound = std::max(reported_bound, global_bound);  // monotone
        if (have_incumbent && relative_gap(sol.objective, reported_bound) <= options.rel_gap)
            break;
        if (sol.nodes_explored >= options.node_limit) {
            sol.status = MipStatus::NodeLimit;
            sol.best_bound = reported_bound;
            sol.gap = have_incumbent ? relative_gap(sol.objective, reported_bound) : kInf;
            return sol;
        }

        Node node = open.top();
        open.pop();
        if (have_incumbent && node.bound >= sol.objective - 1e-12 * (1.0 + std::abs(sol.objective)))
            continue;  // pruned by bound

        ++sol.nodes_explored;
        LpSolution lp = solve_lp_relaxation(model, node.lower, node.upper, options.lp,
                                            node.has_basis ? &node.basis : nullptr, &node.basis);
        if (lp.status == LpStatus::Infeasible) continue;
        if (lp.status == LpStatus::Unbounded)
            throw make_error("NumericalBreakdown", "MIP relaxation is unbounded");
        double node_obj = std::max(lp.objective, node.bound);
        if (have_incumbent && node_obj >= sol.objective - 1e-12 * (1.0 + std::abs(sol.objective)))
            continue;

        // most fractional binary, ties by lowest index
        int branch_var = -1;
        double best_frac = options.int_tol;
        for (int j : binaries) {
            double x = lp.primal[j];
            double frac = std::min(x - std::floor(x), std::ceil(x) - x);
            if (frac > best_frac + 1e-15) {
                best_frac = frac;
                branch_var = j;
            }
        }

        if (branch_var < 0) {
            // integral incumbent
            if (!have_incumbent || lp.objective < sol.objective - 1e-12) {
                sol.objective = lp.objective;
                sol.incumbent = lp.primal;
                for (int j : binaries) sol.incumbent[j] = std::round(sol.incumbent[j]);
                have_incumbent = true;
            }
            continue;
        }

        for (int side = 0; side < 2; ++side) {
            Node child = node;
            child.id = next_id++;
            child.bound = node_obj;
            child.has_basis = true;
            if (side == 0) child.upper[branch_var] = 0.0;
            else child.lower[branch_var] = 1.0;
            open.push(std::move(child));
        }
    }

    if (!have_incumbent) {
        sol.status = MipStatus::Infeasible;
        sol.incumbent.clear();
        sol.objective = 0.0;
        sol.best_bound = 0.0;
        sol.gap = 0.0;
        return sol;
    }
    if (open.empty()) reported_bound = std::max(reported_bound, sol.objective);
    sol.best_bound = std::min(reported_bound, sol.objective);
    sol.gap = relative_gap(sol.objective, sol.best_bound);
    sol.status = (open.empty() || sol.gap <= 1e-12) ? MipStatus::Optimal : MipStatus::GapReached;
    return sol;
}

double solution_violation(const Milp& model, const std::vector<double>& x) {
    double worst = 0.0;
    for (size_t j = 0; j < model.variables.size(); ++j) {
        const Variable& v = model.variables[j];
        worst = std::max(worst, v.lower - x[j]);
        worst = std::max(worst, x[j] - v.upper);
        if (v.integrality == Integrality::Binary)
            worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
    }
    for (const auto& row : model.rows) {
        double lhs = 0.0;
        for (const auto& [j, a] : row.terms) lhs += a * x[j];
        switch (row.sense) {
            case RowSense::LessEqual: worst = std::max(worst, lhs - row.rhs); break;
            case RowSense::GreaterEqual: worst = std::max(worst, row.rhs - lhs); break;
            case RowSense::Equal: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
        }
    }
    return worst;
}

namespace {
std::mutex g_backend_mutex;
std::shared_ptr<SolverBackend> g_backend;
}  // namespace

SolverHandle register_backend(std::shared_ptr<SolverBackend> backend) {
    std::lock_guard<std::mutex> lock(g_backend_mutex);
    g_backend = backend;
    return SolverHandle(backend);
}

std::shared_ptr<SolverBackend> active_backend() {
    std::lock_guard<std::mutex> lock(g_backend_mutex);
    return g_backend;
}

LpSolution solve_lp(const Milp& model, const SimplexOptions& options) {
    if (auto b = active_backend()) return b->solve_lp(model, options);
    return builtin_solve_lp(model, options);
}

MipSolution solve_mip(const Milp& model, const MipOptions& options) {
    auto b = active_backend();
    if (!b) return builtin_solve_mip(model, options);
    MipSolution sol = b->solve_mip(model, options);
    if (!sol.incumbent.empty()) {
        if (sol.incumbent.size() != model.variables.size() ||
            solution_violation(model, sol.incumbent) > 1e-6)
            throw make_error("BackendUnavailable",
                             "backend '" + b->name() + "' returned an infeasible incumbent");
    }
    return sol;
}

}  // namespace psh
