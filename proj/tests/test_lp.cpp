#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "qcc/lp.hpp"

using namespace qcc;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("textbook 2d maximization") {
    // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x,y >= 0 -> (4,0), value 12.
    lp::Problem p;
    p.num_vars = 2;
    p.maximize = true;
    p.objective = {3, 2};
    p.var_upper = {kInf, kInf};
    p.rows.push_back({{{0, 1}, {1, 1}}, -kInf, 4, "r1"});
    p.rows.push_back({{{0, 1}, {1, 3}}, -kInf, 6, "r2"});
    const auto r = lp::solve(p);
    REQUIRE(r.status == lp::Status::Optimal);
    CHECK(r.objective_value == doctest::Approx(12.0));
    CHECK(r.solution[0] == doctest::Approx(4.0));
    CHECK(r.solution[1] == doctest::Approx(0.0));
}

TEST_CASE("equality rows and minimization") {
    // min x + y s.t. x + 2y = 3, 0 <= x,y <= 2 -> y=1.5? x=0,y=1.5 value 1.5.
    lp::Problem p;
    p.num_vars = 2;
    p.maximize = false;
    p.objective = {1, 1};
    p.var_upper = {2, 2};
    p.rows.push_back({{{0, 1}, {1, 2}}, 3, 3, "eq"});
    const auto r = lp::solve(p);
    REQUIRE(r.status == lp::Status::Optimal);
    CHECK(r.objective_value == doctest::Approx(1.5));
}

TEST_CASE("variable upper bounds bind") {
    // max x + y s.t. x + y <= 10, x <= 1, y <= 2 via var bounds -> 3.
    lp::Problem p;
    p.num_vars = 2;
    p.maximize = true;
    p.objective = {1, 1};
    p.var_upper = {1, 2};
    p.rows.push_back({{{0, 1}, {1, 1}}, -kInf, 10, "cap"});
    const auto r = lp::solve(p);
    REQUIRE(r.status == lp::Status::Optimal);
    CHECK(r.objective_value == doctest::Approx(3.0));
}

TEST_CASE("range rows constrain from both sides") {
    // min y s.t. 2 <= x + y <= 5, x <= 1 -> y = 1.
    lp::Problem p;
    p.num_vars = 2;
    p.maximize = false;
    p.objective = {0, 1};
    p.var_upper = {1, kInf};
    p.rows.push_back({{{0, 1}, {1, 1}}, 2, 5, "range"});
    const auto r = lp::solve(p);
    REQUIRE(r.status == lp::Status::Optimal);
    CHECK(r.objective_value == doctest::Approx(1.0));
}

TEST_CASE("infeasible problems name a violated row") {
    lp::Problem p;
    p.num_vars = 1;
    p.maximize = true;
    p.objective = {1};
    p.var_upper = {1};
    p.rows.push_back({{{0, 1}}, 2, 3, "impossible"});
    const auto r = lp::solve(p);
    REQUIRE(r.status == lp::Status::Infeasible);
    REQUIRE(r.violated_rows.size() == 1);
    CHECK(r.violated_rows[0] == "impossible");
}

TEST_CASE("unbounded rays are detected") {
    lp::Problem p;
    p.num_vars = 2;
    p.maximize = true;
    p.objective = {1, 0};
    p.var_upper = {kInf, kInf};
    p.rows.push_back({{{1, 1}}, -kInf, 5, "only y"});
    const auto r = lp::solve(p);
    CHECK(r.status == lp::Status::Unbounded);
}

TEST_CASE("degenerate and redundant rows do not cycle") {
    lp::Problem p;
    p.num_vars = 3;
    p.maximize = true;
    p.objective = {1, 1, 1};
    p.var_upper = {1, 1, 1};
    for (int i = 0; i < 6; ++i) p.rows.push_back({{{0, 1}, {1, 1}, {2, 1}}, 0, 2, "dup"});
    p.rows.push_back({{{0, 1}}, 0, 0, "pin x"});
    const auto r = lp::solve(p);
    REQUIRE(r.status == lp::Status::Optimal);
    CHECK(r.objective_value == doctest::Approx(2.0));
    CHECK(r.solution[0] == doctest::Approx(0.0));
}

TEST_CASE("solver is deterministic") {
    lp::Problem p;
    p.num_vars = 4;
    p.maximize = true;
    p.objective = {1, 2, 3, 4};
    p.var_upper = {1, 1, 1, 1};
    p.rows.push_back({{{0, 1}, {1, 1}, {2, 1}, {3, 1}}, 0.5, 2, "a"});
    p.rows.push_back({{{0, 3}, {2, 1}}, -kInf, 1.5, "b"});
    const auto r1 = lp::solve(p);
    const auto r2 = lp::solve(p);
    REQUIRE(r1.status == lp::Status::Optimal);
    CHECK(r1.objective_value == r2.objective_value);
    CHECK(r1.solution == r2.solution);
}

TEST_CASE("random box LPs: solution is feasible and unbeaten by sampling") {
    std::mt19937_64 gen(31337);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int rep = 0; rep < 60; ++rep) {
        const int n = 2 + static_cast<int>(gen() % 5);
        const int m = 1 + static_cast<int>(gen() % 4);
        lp::Problem p;
        p.num_vars = n;
        p.maximize = true;
        p.objective.resize(n);
        p.var_upper.assign(n, 1.0);
        for (auto& c : p.objective) c = coeff(gen);
        for (int i = 0; i < m; ++i) {
            lp::Row row;
            row.name = "r" + std::to_string(i);
            for (int j = 0; j < n; ++j) row.coeffs.emplace_back(j, coeff(gen));
            // Anchor feasibility at an interior point so the instance is
            // never empty.
            double mid = 0.0;
            for (const auto& [j, v] : row.coeffs) mid += 0.5 * v;
            row.lo = mid - 0.1 - unit(gen);
            row.hi = mid + 0.1 + unit(gen);
            p.rows.push_back(row);
        }
        const auto r = lp::solve(p);
        REQUIRE(r.status == lp::Status::Optimal);

        for (const auto& row : p.rows) {
            double v = 0.0;
            for (const auto& [j, c] : row.coeffs) v += c * r.solution[j];
            CHECK(v >= row.lo - 1e-7);
            CHECK(v <= row.hi + 1e-7);
        }
        for (double x : r.solution) {
            CHECK(x >= -1e-9);
            CHECK(x <= 1.0 + 1e-9);
        }

        // Random feasible points never beat the reported optimum.
        for (int trial = 0; trial < 2000; ++trial) {
            std::vector<double> x(n);
            for (auto& v : x) v = unit(gen);
            bool ok = true;
            for (const auto& row : p.rows) {
                double v = 0.0;
                for (const auto& [j, c] : row.coeffs) v += c * x[j];
                ok = ok && v >= row.lo - 1e-12 && v <= row.hi + 1e-12;
            }
            if (!ok) continue;
            double obj = 0.0;
            for (int j = 0; j < n; ++j) obj += p.objective[j] * x[j];
            CHECK(obj <= r.objective_value + 1e-6);
        }
    }
}
