#pragma once

#include <string>
#include <utility>
#include <vector>

// Small dense linear-programming solver: bounded variables (0 <= x <= ub),
// range rows (lo <= a.x <= hi), two-phase simplex with an explicit basis
// inverse. Deterministic given its input; sized for a few thousand
// variables and a few hundred rows.

namespace qcc::lp {

struct Row {
    std::vector<std::pair<int, double>> coeffs;  // (variable index, coefficient)
    double lo = 0.0;
    double hi = 0.0;
    std::string name;
};

struct Problem {
    int num_vars = 0;
    bool maximize = false;
    std::vector<double> objective;   // size num_vars
    std::vector<double> var_upper;   // size num_vars; +inf allowed
    std::vector<Row> rows;
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
    Status status = Status::Infeasible;
    double objective_value = 0.0;
    std::vector<double> solution;            // structural variables
    std::vector<std::string> violated_rows;  // populated when infeasible
};

Result solve(const Problem& p);

}  // namespace qcc::lp
