#include "nskey/lp.hpp"

#include <random>

#include "doctest.h"
#include "nskey/polytope.hpp"
#include "test_support.hpp"

using namespace nskey;

TEST_CASE("simple one dimensional programs") {
    LinearProgram<Rat> lp;
    lp.num_vars = 1;
    lp.objective = {Rat(1)};
    lp.ineq_matrix = {{Rat(1)}};
    lp.ineq_rhs = {Rat(1)};
    auto sol = solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.point[0] == Rat(1));
    CHECK(sol.objective == Rat(1));

    LinearProgram<Rat> bad;
    bad.num_vars = 1;
    bad.objective = {Rat(0)};
    bad.ineq_matrix = {{Rat(-1)}, {Rat(1)}};  // x >= 1 and x <= 0
    bad.ineq_rhs = {Rat(-1), Rat(0)};
    CHECK(solve(bad).status == LpStatus::Infeasible);

    LinearProgram<Rat> unbounded;
    unbounded.num_vars = 1;
    unbounded.objective = {Rat(1)};
    CHECK(solve(unbounded).status == LpStatus::Unbounded);
}

TEST_CASE("convex combination certificates") {
    SUBCASE("a vertex certifies itself") {
        std::vector<std::vector<Rat>> gens = {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
        std::vector<Rat> point = {Rat(1), Rat(0)};
        auto w = convex_combination_on_support(point, gens);
        REQUIRE(w.has_value());
        Rat x = (*w)[0] * gens[0][0] + (*w)[1] * gens[1][0];
        Rat y = (*w)[0] * gens[0][1] + (*w)[1] * gens[1][1];
        CHECK(x == Rat(1));
        CHECK(y == Rat(0));
    }

    SUBCASE("midpoint of affinely independent generators") {
        std::vector<std::vector<Rat>> gens = {{Rat(0)}, {Rat(1)}};
        std::vector<Rat> point = {Rat(1, 2)};
        auto w = convex_combination_on_support(point, gens);
        REQUIRE(w.has_value());
        CHECK((*w)[0] == Rat(1, 2));
        CHECK((*w)[1] == Rat(1, 2));
    }

    SUBCASE("points outside the hull are rejected") {
        std::vector<std::vector<Rat>> gens = {{Rat(0)}, {Rat(1)}};
        std::vector<Rat> outside = {Rat(2)};
        CHECK_FALSE(convex_combination_on_support(outside, gens).has_value());
        std::vector<Rat> origin = {Rat(0)};
        CHECK_THROWS(convex_combination_on_support(origin, std::vector<std::vector<Rat>>{}));
    }
}

TEST_CASE("membership of the quarter-noise isotropic box in the local polytope") {
    auto iso = make_isotropic<Rat>(Rat(1, 4));
    std::vector<std::vector<Rat>> gens;
    for (int i = 0; i < 16; ++i) gens.push_back(chsh_vertices()[i].device.probabilities);
    auto w = convex_combination_on_support(iso.probabilities, gens);
    REQUIRE(w.has_value());
    std::vector<Rat> rebuilt(iso.probabilities.size(), Rat(0));
    for (int i = 0; i < 16; ++i)
        for (std::size_t k = 0; k < rebuilt.size(); ++k) rebuilt[k] += (*w)[i] * gens[i][k];
    CHECK(rebuilt == iso.probabilities);
}

TEST_CASE("hrw minimal ensemble weights come out exactly") {
    const Rat delta(3, 100), ep(-7, 100);
    auto box = make_hrw({delta, ep});
    const std::vector<std::string> support = {"B000",  "L0000", "L0010", "L0101", "L0111",
                                              "L1000", "L1101", "L1011", "L1110"};
    std::vector<std::vector<Rat>> gens;
    for (const auto& label : support)
        gens.push_back(chsh_vertices()[vertex_index(label)].device.probabilities);

    auto w = convex_combination_on_support(box.probabilities, gens);
    REQUIRE(w.has_value());
    const Rat member = (1 + 4 * ep) / 8;
    CHECK((*w)[0] == Rat(1, 4) - delta - 3 * ep);
    for (int i = 1; i <= 6; ++i) CHECK((*w)[i] == member);
    CHECK((*w)[7] == delta / 2);
    CHECK((*w)[8] == delta / 2);
}

TEST_CASE("rational solutions satisfy constraints exactly") {
    std::mt19937_64 rng(37);
    std::uniform_int_distribution<long> coef(-5, 5);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 4, m = 3;
        // Build a feasible system around a known nonnegative point.
        std::vector<Rat> x0(n);
        for (auto& v : x0) v = make_rat(std::uniform_int_distribution<long>(0, 9)(rng), 3);
        LinearProgram<Rat> lp;
        lp.num_vars = n;
        lp.objective.assign(n, Rat(0));
        for (int j = 0; j < n; ++j) lp.objective[j] = Rat(coef(rng));
        for (int i = 0; i < m; ++i) {
            std::vector<Rat> row(n);
            Rat rhs{0};
            for (int j = 0; j < n; ++j) {
                row[j] = Rat(coef(rng));
                rhs += row[j] * x0[j];
            }
            lp.ineq_matrix.push_back(std::move(row));
            lp.ineq_rhs.push_back(rhs + Rat(std::uniform_int_distribution<long>(0, 4)(rng)));
        }
        auto sol = solve(lp);
        if (sol.status != LpStatus::Optimal) continue;
        for (int i = 0; i < m; ++i) {
            Rat lhs{0};
            for (int j = 0; j < n; ++j) lhs += lp.ineq_matrix[i][j] * sol.point[j];
            CHECK(lhs <= lp.ineq_rhs[i]);
        }
        for (int j = 0; j < n; ++j) CHECK(sol.point[j] >= 0);
    }
}

TEST_CASE("float and rational modes agree on status") {
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<long> coef(-9, 9);
    std::uniform_int_distribution<int> dims(2, 20);
    int optimal = 0, infeasible = 0, unbounded = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = dims(rng);
        const int m = dims(rng);
        LinearProgram<Rat> er;
        LinearProgram<double> ed;
        er.num_vars = ed.num_vars = n;
        for (int j = 0; j < n; ++j) {
            long c = coef(rng);
            er.objective.push_back(Rat(c));
            ed.objective.push_back(static_cast<double>(c));
        }
        for (int i = 0; i < m; ++i) {
            std::vector<Rat> rr(n);
            std::vector<double> rd(n);
            for (int j = 0; j < n; ++j) {
                long c = coef(rng);
                rr[j] = Rat(c);
                rd[j] = static_cast<double>(c);
            }
            long b = coef(rng);
            er.ineq_matrix.push_back(std::move(rr));
            er.ineq_rhs.push_back(Rat(b));
            ed.ineq_matrix.push_back(std::move(rd));
            ed.ineq_rhs.push_back(static_cast<double>(b));
        }
        auto sr = solve(er);
        auto sd = solve(ed);
        CHECK(sr.status == sd.status);
        if (sr.status == LpStatus::Optimal) {
            ++optimal;
            CHECK(to_double(sr.objective) == doctest::Approx(sd.objective).epsilon(1e-7));
        } else if (sr.status == LpStatus::Infeasible) {
            ++infeasible;
        } else {
            ++unbounded;
        }
    }
    // The generator should exercise every status.
    CHECK(optimal > 0);
    CHECK(infeasible > 0);
    CHECK(unbounded > 0);
}

TEST_CASE("solver is deterministic") {
    std::mt19937_64 rng(43);
    std::uniform_int_distribution<long> coef(-5, 5);
    LinearProgram<Rat> lp;
    lp.num_vars = 6;
    for (int j = 0; j < 6; ++j) lp.objective.push_back(Rat(coef(rng)));
    for (int i = 0; i < 4; ++i) {
        std::vector<Rat> row(6);
        for (auto& v : row) v = Rat(coef(rng));
        lp.ineq_matrix.push_back(row);
        lp.ineq_rhs.push_back(Rat(10));
    }
    auto a = solve(lp);
    auto b = solve(lp);
    CHECK(a.status == b.status);
    if (a.status == LpStatus::Optimal) {
        CHECK(a.point == b.point);
        CHECK(a.basis == b.basis);
    }
}
