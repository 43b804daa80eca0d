#include <doctest.h>

#include <random>

#include "dasee/lp.hpp"
#include "support.hpp"

using namespace dasee;

namespace {

LinearProgram make(const MatrixXd& A, const VectorXd& b, std::vector<RowSense> sense, const VectorXd& c) {
    return {A, b, std::move(sense), c};
}

double max_violation(const LinearProgram& lp, const VectorXd& x) {
    double v = std::max(0.0, -x.minCoeff());
    VectorXd ax = lp.A * x;
    for (int r = 0; r < lp.A.rows(); ++r) {
        double d = ax(r) - lp.b(r);
        if (lp.sense[r] == RowSense::le) v = std::max(v, d);
        if (lp.sense[r] == RowSense::ge) v = std::max(v, -d);
        if (lp.sense[r] == RowSense::eq) v = std::max(v, std::abs(d));
    }
    return v;
}

}  // namespace

TEST_CASE("textbook maximization") {
    MatrixXd A(3, 2);
    A << 1, 0, 0, 2, 3, 2;
    VectorXd b(3), c(2);
    b << 4, 12, 18;
    c << 3, 5;
    auto r = solve_lp(make(A, b, {RowSense::le, RowSense::le, RowSense::le}, c));
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.value == doctest::Approx(36.0));
    CHECK(r.x(0) == doctest::Approx(2.0));
    CHECK(r.x(1) == doctest::Approx(6.0));
}

TEST_CASE("ge and eq rows need phase one") {
    // max -x - y  s.t. x + y >= 2, x - y = 1
    MatrixXd A(2, 2);
    A << 1, 1, 1, -1;
    VectorXd b(2), c(2);
    b << 2, 1;
    c << -1, -1;
    auto r = solve_lp(make(A, b, {RowSense::ge, RowSense::eq}, c));
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.value == doctest::Approx(-2.0));
    CHECK(r.x(0) == doctest::Approx(1.5));
}

TEST_CASE("negative right-hand sides") {
    // x - y <= -1 means y >= x + 1; max x - 2y with y <= 3
    MatrixXd A(2, 2);
    A << 1, -1, 0, 1;
    VectorXd b(2), c(2);
    b << -1, 3;
    c << 1, -2;
    auto r = solve_lp(make(A, b, {RowSense::le, RowSense::le}, c));
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.value == doctest::Approx(-2.0));
}

TEST_CASE("infeasible and unbounded") {
    MatrixXd A(2, 1);
    A << 1, 1;
    VectorXd b(2), c(1);
    b << 1, 2;
    c << 1;
    CHECK(solve_lp(make(A, b, {RowSense::le, RowSense::ge}, c)).status == LpStatus::infeasible);

    MatrixXd B(1, 2);
    B << 1, -1;
    VectorXd bb(1), cc(2);
    bb << 1;
    cc << 1, 1;
    CHECK(solve_lp(make(B, bb, {RowSense::le}, cc)).status == LpStatus::unbounded);
}

TEST_CASE("degenerate cycling example terminates") {
    // Beale's example cycles under naive Dantzig pricing.
    MatrixXd A(3, 4);
    A << 0.25, -60, -0.04, 9, 0.5, -90, -0.02, 3, 0, 0, 1, 0;
    VectorXd b(3), c(4);
    b << 0, 0, 1;
    c << 0.75, -150, 0.02, -6;
    auto r = solve_lp(make(A, b, {RowSense::le, RowSense::le, RowSense::le}, c));
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.value == doctest::Approx(0.05));
}

TEST_CASE("random LPs agree with vertex enumeration") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> dm(1, 5), dn(1, 4), ds(0, 2);
    int solved = 0;
    for (int t = 0; t < 300; ++t) {
        int m = dm(rng), n = dn(rng);
        LinearProgram lp;
        lp.A.resize(m + 1, n);
        lp.b.resize(m + 1);
        lp.c.resize(n);
        for (int r = 0; r < m; ++r) {
            for (int j = 0; j < n; ++j) lp.A(r, j) = u(rng);
            lp.b(r) = u(rng);
            lp.sense.push_back(static_cast<RowSense>(ds(rng)));
        }
        // bounded box
        lp.A.row(m).setOnes();
        lp.b(m) = 5.0;
        lp.sense.push_back(RowSense::le);
        for (int j = 0; j < n; ++j) lp.c(j) = u(rng);

        auto ref = test::lp_vertex_enum(lp);
        auto r = solve_lp(lp);
        if (!ref) {
            CHECK(r.status == LpStatus::infeasible);
            continue;
        }
        REQUIRE(r.status == LpStatus::optimal);
        CHECK(r.value == doctest::Approx(ref->value).epsilon(1e-9).scale(1.0));
        CHECK(max_violation(lp, r.x) <= 1e-9);
        ++solved;
    }
    CHECK(solved > 50);
}
