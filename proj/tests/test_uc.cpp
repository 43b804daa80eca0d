#include <doctest.h>

#include "dasee/baselines.hpp"
#include "dasee/uc_solver.hpp"
#include "support.hpp"

using namespace dasee;

TEST_CASE("ratio parameters zero psi") {
    for (int t = 0; t < 20; ++t) {
        auto in = test::random_instance(3, 3, 60 + t);
        auto feas = check_feasibility(in.sc, in.ch);
        if (!feas.feasible) continue;
        RatioParams rp = ratio_params_at(feas.alloc, in.sc, in.ch);
        VectorXd ps = psi(feas.alloc, in.sc, in.ch, rp);
        CHECK(psi_norm(ps, feas.alloc, in.sc) <= 1e-12 * std::max(1.0, rp.beta.maxCoeff()));
    }
}

TEST_CASE("full Newton step lands on a fixed inner map") {
    auto in = test::random_instance(3, 2, 4);
    auto feas = check_feasibility(in.sc, in.ch);
    REQUIRE(feas.feasible);
    const Allocation& a = feas.alloc;
    RatioParams target = ratio_params_at(a, in.sc, in.ch);
    RatioParams rp{2.0 * target.alpha, 0.5 * target.beta, 0};
    InnerMap inner = [&](const RatioParams&) { return a; };
    NewtonStep st = newton_step(rp, a, in.sc, in.ch, {}, inner);
    CHECK(st.m == 0);
    CHECK(st.gamma == 1.0);
    CHECK(st.params.n == 1);
    CHECK(st.psi_norm <= 1e-9);
    for (int k = 0; k < 2; ++k) {
        CHECK(st.params.alpha(k) == doctest::Approx(target.alpha(k)));
        CHECK(st.params.beta(k) == doctest::Approx(target.beta(k)));
    }
}

TEST_CASE("damped step is taken when the full step overshoots") {
    auto in = test::random_instance(3, 2, 4);
    auto feas = check_feasibility(in.sc, in.ch);
    REQUIRE(feas.feasible);
    const Allocation& a = feas.alloc;
    RatioParams target = ratio_params_at(a, in.sc, in.ch);
    RatioParams rp{2.0 * target.alpha, 0.5 * target.beta, 0};
    double n0 = psi_norm(psi(a, in.sc, in.ch, rp), a, in.sc);
    // the map only reaches the target allocation once the step is small
    Allocation off = make_allocation(a.tau, 3.0 * a.s);
    InnerMap inner = [&](const RatioParams& p) {
        return (p.alpha - rp.alpha).norm() < 0.3 * (target.alpha - rp.alpha).norm() ? a : off;
    };
    NewtonConfig cfg;
    NewtonStep st = newton_step(rp, a, in.sc, in.ch, cfg, inner);
    CHECK(st.m >= 1);
    CHECK(st.psi_norm <= (1.0 - cfg.epsilon * st.gamma) * n0);
}

TEST_CASE("UC solutions are certified fixed points") {
    int solved = 0;
    for (int t = 0; t < 10; ++t) {
        auto in = test::random_instance(2, 2, 200 + t, 1e-5);
        auto rep = solve_uc(in.sc, in.ch);
        if (!rep.feasible) continue;
        ++solved;
        CHECK(rep.converged);
        CHECK(residuals(rep.alloc, in.ch, in.sc).max() <= 1e-8);
        CHECK(rep.objective == doctest::Approx(uc_ee(rep.alloc, in.ch, in.sc)).epsilon(1e-12));
        CHECK(rep.psi_norm <= 1e-6);
        RatioParams rp = ratio_params_at(rep.alloc, in.sc, in.ch);
        CHECK((rp.alpha - rep.alpha).norm() <= 1e-8 * rp.alpha.norm());
        CHECK((rp.beta - rep.beta).norm() <= 1e-8 * rp.beta.norm());
        CHECK(rep.gap <= 1e-6 * rep.objective);

        auto ft = solve_uc_ft(in.sc, in.ch);
        if (ft.feasible) CHECK(rep.objective >= ft.objective * (1.0 - 1e-6));
        auto fp = solve_uc_fp(in.sc, in.ch);
        if (fp.feasible) CHECK(rep.objective >= fp.objective * (1.0 - 1e-6));
    }
    CHECK(solved >= 5);
}

TEST_CASE("UC objective trace is nondecreasing") {
    auto in = test::random_instance(4, 3, 17, 1e-4);
    auto rep = solve_uc(in.sc, in.ch);
    REQUIRE(rep.feasible);
    for (size_t j = 1; j < rep.trace.size(); ++j) CHECK(rep.trace[j] >= rep.trace[j - 1] * (1.0 - 1e-12));
}
