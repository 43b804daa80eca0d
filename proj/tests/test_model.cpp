#include <doctest.h>

#include <random>

#include "dasee/errors.hpp"
#include "dasee/model.hpp"
#include "support.hpp"

using namespace dasee;

TEST_CASE("ports sit on a centered lattice") {
    ScenarioParams p;
    p.num_ports = 4;
    p.num_users = 2;
    Scenario sc = generate_scenario(p, 3);
    REQUIRE(sc.port_positions.size() == 4);
    CHECK(sc.port_positions[0][0] == doctest::Approx(2.5));
    CHECK(sc.port_positions[0][1] == doctest::Approx(2.5));
    CHECK(sc.port_positions[3][0] == doctest::Approx(7.5));
    CHECK(sc.port_positions[3][1] == doctest::Approx(7.5));
    for (auto& u : sc.user_positions) {
        CHECK(u[0] >= 0.0);
        CHECK(u[0] <= 10.0);
        CHECK(u[1] >= 0.0);
        CHECK(u[1] <= 10.0);
    }
}

TEST_CASE("scalar parameters broadcast") {
    ScenarioParams p;
    p.num_ports = 3;
    p.num_users = 5;
    Scenario sc = generate_scenario(p, 1);
    CHECK(sc.weights.size() == 5);
    CHECK(sc.weights.isOnes());
    CHECK(sc.power_cap.size() == 3);
    CHECK(sc.power_cap(2) == 6.0);
    CHECK(sc.energy_req(4) == 1e-4);
    CHECK(sc.circuit_power(0) == 0.5);
    CHECK(sc.noise_power == doctest::Approx(3.981071705534973e-14));
}

TEST_CASE("invalid parameters are rejected") {
    ScenarioParams p;
    p.num_users = 0;
    CHECK_THROWS_AS(generate_scenario(p, 1), InvalidConfig);
    p = {};
    p.weights = {1.0, 2.0};
    CHECK_THROWS_AS(generate_scenario(p, 1), InvalidConfig);
    p = {};
    p.conversion_eff = 1.5;
    CHECK_THROWS_AS(generate_scenario(p, 1), InvalidConfig);
    p = {};
    p.power_cap = -1.0;
    CHECK_THROWS_AS(generate_scenario(p, 1), InvalidConfig);
}

TEST_CASE("generation is deterministic in the seed") {
    auto a = test::random_instance(7, 4, 99);
    auto b = test::random_instance(7, 4, 99);
    auto c = test::random_instance(7, 4, 100);
    CHECK(a.ch.h == b.ch.h);
    CHECK(a.sc.user_positions == b.sc.user_positions);
    CHECK(a.ch.h != c.ch.h);
}

TEST_CASE("pathloss without fading") {
    ScenarioParams p;
    p.num_ports = 1;
    p.num_users = 3;
    p.fading = false;
    Scenario sc = generate_scenario(p, 8);
    Channel ch = generate_channel(sc, 1);
    for (int k = 0; k < 3; ++k) {
        double d = std::max(0.5, distance(sc.port_positions[0], sc.user_positions[k]));
        CHECK(ch.h(0, k) == doctest::Approx(1e-3 / (d * d)));
    }
    sc.user_positions[0] = sc.port_positions[0];
    ch = generate_channel(sc, 1);
    CHECK(ch.h(0, 0) == doctest::Approx(1e-3 / 0.25));
}

TEST_CASE("rate in energy variables") {
    VectorXd h(2), p(2);
    h << 2e-12, 5e-13;
    p << 1.0, 3.0;
    double sig = 1e-13;
    CHECK(rate(0.0, VectorXd::Zero(2), h, sig) == 0.0);
    for (double tau : {0.1, 0.5, 1.0}) CHECK(rate(tau, tau * p, h, sig) == doctest::Approx(tau * rate_p(p, h, sig)));
    CHECK_THROWS(rate(-0.1, p, h, sig));
}

TEST_CASE("harvested energy excludes the own slot") {
    auto in = test::random_instance(3, 3, 4);
    MatrixXd s = MatrixXd::Zero(3, 3);
    s.col(1).setConstant(0.2);
    VectorXd e = harvested_energy(s, in.ch, 0.6);
    CHECK(e(1) == 0.0);
    CHECK(e(0) == doctest::Approx(0.6 * 0.2 * in.ch.h.col(0).sum()));
    for (int k = 0; k < 3; ++k) CHECK(harvested_energy(k, s, in.ch, 0.6) == doctest::Approx(e(k)));
    CHECK_THROWS_AS(harvested_energy(3, s, in.ch, 0.6), std::out_of_range);
}

TEST_CASE("power recovery") {
    VectorXd tau(2);
    tau << 0.5, 0.0;
    MatrixXd s(1, 2);
    s << 1.0, 0.0;
    bool bad = true;
    MatrixXd p = recover_power(tau, s, &bad);
    CHECK_FALSE(bad);
    CHECK(p(0, 0) == 2.0);
    s(0, 1) = 0.1;
    recover_power(tau, s, &bad);
    CHECK(bad);
}

TEST_CASE("UC-EE dominates NC-EE at any allocation") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        auto in = test::random_instance(4, 3, 1000 + t);
        VectorXd tau(3);
        for (int k = 0; k < 3; ++k) tau(k) = 0.01 + u(rng);
        tau /= tau.sum();
        MatrixXd s(4, 3);
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 4; ++i) s(i, k) = u(rng) * tau(k) * 6.0;
        Allocation a = make_allocation(tau, s);
        CHECK(uc_ee(a, in.ch, in.sc) >= network_ee(a, in.ch, in.sc) * (1.0 - 1e-12));
        auto m = metrics(a, in.ch, in.sc);
        CHECK(m.user_ee.dot(in.sc.weights) == doctest::Approx(uc_ee(a, in.ch, in.sc)));
    }
}

TEST_CASE("residuals") {
    auto in = test::random_instance(2, 2, 5);
    VectorXd tau(2);
    tau << 0.6, 0.6;
    MatrixXd s = MatrixXd::Zero(2, 2);
    s(0, 0) = 4.0;  // above 0.6 * 6
    auto r = residuals(make_allocation(tau, s), in.ch, in.sc);
    CHECK(r.time == doctest::Approx(0.2));
    CHECK(r.box == doctest::Approx(0.4));
    CHECK(r.energy == doctest::Approx(1e-4));
    CHECK(r.max() == doctest::Approx(0.4));
}

TEST_CASE("feasibility check") {
    auto in = test::random_instance(3, 3, 21);
    auto f = check_feasibility(in.sc, in.ch);
    REQUIRE(f.feasible);
    CHECK(f.slack >= 0.0);
    CHECK(residuals(f.alloc, in.ch, in.sc).max() <= 1e-12);

    // requirement above what full power over the whole frame can deliver
    Scenario hard = in.sc;
    double cap = 0.0;
    for (int k = 0; k < 3; ++k) cap = std::max(cap, hard.conversion_eff * in.ch.h.col(k).dot(hard.power_cap));
    hard.energy_req.setConstant(1.01 * cap);
    CHECK_FALSE(check_feasibility(hard, in.ch).feasible);

    VectorXd eq = VectorXd::Constant(3, 1.0 / 3);
    auto ff = check_feasibility(in.sc, in.ch, VectorXd::Zero(3), eq);
    if (ff.feasible) CHECK(ff.alloc.tau.isApprox(eq));
}
