#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "psh/errors.hpp"

namespace psh {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Integrality { Continuous, Binary };

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
    Integrality integrality = Integrality::Continuous;
    double objective_coeff = 0.0;
};

enum class RowSense { LessEqual, Equal, GreaterEqual };

struct ConstraintRow {
    std::string name;
    std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
    RowSense sense = RowSense::LessEqual;
    double rhs = 0.0;
};

// Solver-agnostic sparse MILP. Append-only during construction; immutable once
// handed to a solver. Minimization is the only objective sense.
struct Milp {
    std::vector<Variable> variables;
    std::vector<ConstraintRow> rows;
    double constant_offset = 0.0;

    int add_variable(std::string name, double lower, double upper, Integrality integrality,
                     double objective_coeff) {
        if (lower > upper)
            throw make_error("BoundViolation", "variable " + name + ": lower > upper");
        if (integrality == Integrality::Binary && (lower < 0.0 || upper > 1.0))
            throw make_error("BoundViolation",
                             "binary variable " + name + ": bounds must lie in [0,1]");
        variables.push_back({std::move(name), lower, upper, integrality, objective_coeff});
        return (int)variables.size() - 1;
    }

    int add_row(std::string name, std::vector<std::pair<int, double>> terms, RowSense sense,
                double rhs);
};

struct ModelStats {
    int n_variables = 0;
    int n_binaries = 0;
    int n_constraints = 0;
    long n_nonzeros = 0;

    bool operator==(const ModelStats&) const = default;
};

ModelStats model_stats(const Milp& model);

// Returns a copy with variable `index` fixed to `value` (lower = upper = value).
// Throws ValueOutOfBounds if the value is outside the variable's bounds or not
// integral for a Binary variable.
Milp fix_variable(const Milp& model, int index, double value);

// CPLEX-style LP text export for cross-checking against external solvers.
void write_lp_file(const Milp& model, std::ostream& os);

// Minimal LP text reader; understands the subset write_lp_file emits.
// Round-trips model_stats counts; coefficient formatting is not bit-exact.
Milp read_lp_file(std::istream& is);

}  // namespace psh
