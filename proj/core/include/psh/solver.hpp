#pragma once

#include <memory>
#include <string>
#include <vector>

#include "psh/milp.hpp"
#include "psh/simplex.hpp"

namespace psh {

enum class MipStatus { Optimal, GapReached, Infeasible, NodeLimit };

struct MipSolution {
    MipStatus status = MipStatus::Infeasible;
    std::vector<double> incumbent;  // per variable; empty when Infeasible
    double objective = 0.0;
    double best_bound = 0.0;
    double gap = 0.0;  // (objective - best_bound) / max(1e-10, |objective|)
    long nodes_explored = 0;
};

struct MipOptions {
    double rel_gap = 1e-6;
    long node_limit = 1000000;
    double int_tol = 1e-6;
    SimplexOptions lp;
};

// Built-in branch and bound: most-fractional branching (ties by lowest
// variable index), best-bound node selection (ties by node id). Deterministic.
MipSolution builtin_solve_mip(const Milp& model, const MipOptions& options = {});
LpSolution builtin_solve_lp(const Milp& model, const SimplexOptions& options = {});

// Pluggable backend. A registered backend handles solves in place of the
// built-in implementations; its MIP incumbents are re-checked against the
// model and rejected (BackendUnavailable) if they violate any row or
// integrality by more than 1e-6.
class SolverBackend {
public:
    virtual ~SolverBackend() = default;
    virtual std::string name() const = 0;
    virtual LpSolution solve_lp(const Milp& model, const SimplexOptions& options) = 0;
    virtual MipSolution solve_mip(const Milp& model, const MipOptions& options) = 0;
};

class SolverHandle {
public:
    SolverHandle() = default;
    explicit SolverHandle(std::shared_ptr<SolverBackend> b) : backend_(std::move(b)) {}
    const std::shared_ptr<SolverBackend>& backend() const { return backend_; }

private:
    std::shared_ptr<SolverBackend> backend_;
};

// Registers (or, with nullptr, clears) the process-wide backend.
SolverHandle register_backend(std::shared_ptr<SolverBackend> backend);
std::shared_ptr<SolverBackend> active_backend();

// Routed entry points: use the registered backend when present, otherwise the
// built-in solver.
LpSolution solve_lp(const Milp& model, const SimplexOptions& options = {});
MipSolution solve_mip(const Milp& model, const MipOptions& options = {});

// Max violation of rows, variable bounds and binary integrality.
double solution_violation(const Milp& model, const std::vector<double>& x);

}  // namespace psh
