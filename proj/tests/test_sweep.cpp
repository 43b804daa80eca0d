#include <doctest.h>

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

#include "dasee/errors.hpp"
#include "dasee/io.hpp"
#include "dasee/sweep.hpp"
#include "support.hpp"

using namespace dasee;

TEST_CASE("names round-trip") {
    for (Scheme s : all_schemes()) CHECK(parse_scheme(to_string(s)) == s);
    for (SweepVar v : {SweepVar::energy_req, SweepVar::power_cap, SweepVar::num_ports, SweepVar::num_users,
                       SweepVar::weight1})
        CHECK(parse_sweep_var(to_string(v)) == v);
    CHECK_THROWS(parse_scheme("uc-best"));
    CHECK_THROWS(parse_sweep_var("Q"));
    CHECK(is_uc(Scheme::uc_fp));
    CHECK_FALSE(is_uc(Scheme::nc_opt));
}

TEST_CASE("sweep variables map to scenario parameters") {
    ScenarioParams b;
    CHECK(apply_sweep(b, SweepVar::energy_req, 0.2).energy_req == doctest::Approx(2e-4));
    CHECK(apply_sweep(b, SweepVar::power_cap, 3.0).power_cap == 3.0);
    CHECK(apply_sweep(b, SweepVar::num_ports, 9).num_ports == 9);
    auto k = apply_sweep(b, SweepVar::num_users, 6);
    CHECK(k.num_users == 6);
    auto w = apply_sweep(b, SweepVar::weight1, 4.0);
    REQUIRE(w.weights.size() == static_cast<size_t>(b.num_users));
    CHECK(w.weights[0] == 4.0);
    CHECK(w.weights[1] == 1.0);
    CHECK_THROWS_AS(apply_sweep(b, SweepVar::num_ports, 2.5), InvalidConfig);
    CHECK_THROWS_AS(apply_sweep(b, SweepVar::num_users, 1), InvalidConfig);
    CHECK_THROWS_AS(apply_sweep(b, SweepVar::energy_req, -1.0), InvalidConfig);
}

TEST_CASE("trial seeds are distinct and stable") {
    std::set<std::uint64_t> seen;
    for (int t = 0; t < 1000; ++t) seen.insert(trial_seed(1, t));
    CHECK(seen.size() == 1000);
    CHECK(trial_seed(5, 3) == trial_seed(5, 3));
    CHECK(trial_seed(5, 3) != trial_seed(6, 3));
    CHECK(channel_seed(11) != 11);
}

TEST_CASE("config validation") {
    SweepConfig c;
    CHECK_THROWS_AS(c.validate(), InvalidConfig);
    c.values = {0.1};
    c.validate();
    c.trials = 0;
    CHECK_THROWS_AS(c.validate(), InvalidConfig);
    c.trials = 1;
    c.schemes.clear();
    CHECK_THROWS_AS(c.validate(), InvalidConfig);
}

TEST_CASE("sweep CSV is byte identical across runs") {
    SweepConfig c;
    c.var = SweepVar::energy_req;
    c.values = {0.05, 0.1};
    c.trials = 3;
    c.base.num_ports = 3;
    c.base.num_users = 2;
    c.seed = 42;
    std::ostringstream a, b;
    auto r1 = run_sweep(c);
    write_csv(a, r1);
    write_csv(b, run_sweep(c));
    CHECK(a.str() == b.str());
    CHECK(r1.records.size() == 2 * 3 * all_schemes().size());
    const std::string text = a.str();
    auto lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
    CHECK(lines == r1.records.size() + 1);
    // common random numbers: one channel draw per trial across points
    c.values = {0.05};
    std::ostringstream one;
    write_csv(one, run_sweep(c));
    std::string first_block = a.str().substr(0, one.str().size());
    CHECK(first_block == one.str());
}

TEST_CASE("monotone checks") {
    std::vector<double> m{5, 4, 4, 3}, se{0, 0, 0, 0};
    CHECK(check_monotone(m, se, Direction::nonincreasing).ok);
    auto v = check_monotone(m, se, Direction::nondecreasing);
    CHECK_FALSE(v.ok);
    CHECK(v.offending == 1);
    std::vector<double> bump{5, 4, 4.2, 3}, se2{0.3, 0.3, 0.3, 0.3};
    CHECK(check_monotone(bump, se2, Direction::nonincreasing).ok);
    CHECK(check_monotone(bump, se2, Direction::nonincreasing, 0.5).offending == 2);
    CHECK(decreasing_from(m, 2));
    CHECK_FALSE(decreasing_from(m, 0));
}

TEST_CASE("paired summaries use only trials feasible everywhere") {
    SweepResult r;
    r.config.values = {1.0, 2.0};
    r.config.trials = 3;
    r.config.schemes = {Scheme::uc_opt, Scheme::nc_opt};
    for (int p = 0; p < 2; ++p)
        for (int t = 0; t < 3; ++t)
            for (Scheme s : r.config.schemes) {
                TrialRecord rec;
                rec.point = p;
                rec.value = r.config.values[p];
                rec.trial = t;
                rec.scheme = s;
                rec.feasible = !(p == 1 && t == 2 && s == Scheme::nc_opt);
                rec.converged = true;
                rec.ee = 10.0 * (t + 1) - p;
                rec.per_user_ee = VectorXd::Constant(2, rec.ee / 2);
                r.records.push_back(rec);
            }
    auto open = summarize(r);
    auto pair = summarize(r, true);
    CHECK(pair.paired);
    CHECK(pair.trials_used == 2);
    const SchemeTrend* u = open.find(Scheme::uc_opt);
    REQUIRE(u);
    CHECK(u->mean[0] == doctest::Approx(20.0));
    CHECK(u->count[0] == 3);
    CHECK(open.find(Scheme::nc_opt)->infeasible[1] == 1);
    const SchemeTrend* up = pair.find(Scheme::uc_opt);
    CHECK(up->mean[0] == doctest::Approx(15.0));
    CHECK(up->mean[1] == doctest::Approx(14.0));
    CHECK(up->count[1] == 2);
    CHECK(up->stderr_[0] == doctest::Approx(5.0));
    CHECK(up->user_mean[0](1) == doctest::Approx(7.5));
    CHECK(up->user_stderr[0](0) == doctest::Approx(2.5));
    std::ostringstream os;
    write_verdicts(os, pair);
    CHECK(os.str().find("2 trials") != std::string::npos);
}

TEST_CASE("JSON round-trips") {
    auto in = test::random_instance(3, 2, 77);
    Scenario back = scenario_from_json(to_json(in.sc));
    CHECK(back.user_positions == in.sc.user_positions);
    CHECK(back.power_cap == in.sc.power_cap);
    CHECK(back.noise_power == in.sc.noise_power);
    Channel ch = channel_from_json(to_json(in.ch), back);
    CHECK(ch.h == in.ch.h);

    ScenarioParams p;
    p.num_ports = 5;
    p.weights = {1.0, 2.0, 3.0, 4.0};
    ScenarioParams q = params_from_json(to_json(p));
    CHECK(q.num_ports == 5);
    CHECK(q.weights == p.weights);
    CHECK_THROWS_AS(params_from_json(json{{"bogus", 1}}), InvalidConfig);
}

TEST_CASE("format_double round-trips") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    for (int t = 0; t < 2000; ++t) {
        double v = std::pow(10.0, u(rng)) * (t % 2 ? 1 : -1);
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
}
