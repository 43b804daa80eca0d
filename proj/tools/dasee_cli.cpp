#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dasee/errors.hpp"
#include "dasee/io.hpp"
#include "dasee/sweep.hpp"

using namespace dasee;

namespace {

constexpr int kExitConvergence = 2;
constexpr int kExitInvalid = 3;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

double parse_number(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size()) throw InvalidConfig("not a number: " + s);
    return v;
}

void apply_config(const json& j, SweepConfig& cfg) {
    if (!j.is_object()) throw InvalidConfig("config must be a JSON object");
    for (auto& [k, v] : j.items())
        if (k != "scenario" && k != "sweep" && k != "trials" && k != "seed" && k != "schemes")
            throw InvalidConfig("unknown config key: " + k);
    try {
        if (j.contains("scenario")) cfg.base = params_from_json(j.at("scenario"));
        if (j.contains("sweep")) {
            const json& s = j.at("sweep");
            cfg.var = parse_sweep_var(s.at("var").get<std::string>());
            cfg.values = s.at("values").get<std::vector<double>>();
        }
        if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("schemes")) {
            cfg.schemes.clear();
            for (auto& s : j.at("schemes")) cfg.schemes.push_back(parse_scheme(s.get<std::string>()));
        }
    } catch (const json::exception& e) {
        throw InvalidConfig(e.what());
    }
}

int solve_one(const std::string& path, const SweepConfig& cfg, const std::string& out) {
    json doc = read_json_file(path);
    json sj = doc.contains("scenario") ? doc.at("scenario") : doc;
    Scenario sc;
    if (sj.contains("user_positions")) {
        sc = scenario_from_json(sj);
    } else {
        // parameter form: layout drawn from the seed
        std::uint64_t s = sj.value("seed", cfg.seed);
        sj.erase("seed");
        sc = generate_scenario(params_from_json(sj), s);
    }
    Channel ch = doc.contains("channel") ? channel_from_json(doc.at("channel"), sc)
                                         : generate_channel(sc, channel_seed(sc.seed));
    json reports = json::array();
    bool failed = false;
    for (Scheme s : cfg.schemes) {
        SolveReport r;
        try {
            r = run_scheme(s, sc, ch, cfg.solver);
        } catch (const std::runtime_error& e) {
            r.scheme = to_string(s);
            r.message = e.what();
        }
        failed = failed || (r.feasible && !r.converged);
        reports.push_back(to_json(r));
    }
    json result = {{"scenario", to_json(sc)}, {"channel", to_json(ch)}, {"reports", reports}};
    if (out.empty()) {
        std::cout << result.dump(2) << "\n";
    } else {
        std::ofstream f(out);
        if (!f) throw InvalidConfig("cannot write " + out);
        f << result.dump(2) << "\n";
    }
    return failed ? kExitConvergence : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-efficiency resource allocation for TDMA distributed-antenna systems with power transfer"};
    std::string config_path, out_path, summary_path, scenario_path, schemes_arg, sweep_arg;
    std::uint64_t seed = 0;
    int trials = 0;
    bool timing = false, quiet = false;
    app.add_option("--config", config_path, "JSON config (scenario parameters, sweep, trials, seed, schemes)");
    app.add_option("--out", out_path, "output CSV (sweep) or JSON (--scenario); stdout if omitted");
    app.add_option("--summary", summary_path, "per-point mean/stderr CSV");
    app.add_option("--seed", seed, "base seed");
    app.add_option("--schemes", schemes_arg, "comma list of uc-opt,nc-opt,uc-ft,uc-fp,nc-ft,nc-fp");
    app.add_option("--trials", trials, "trials per sweep point")->check(CLI::PositiveNumber);
    app.add_option("--sweep", sweep_arg, "<var>=<comma list>, var in E (mW), P (W), N, K, w1");
    app.add_option("--scenario", scenario_path, "solve a single scenario JSON instead of sweeping");
    app.add_flag("--timing", timing, "add a wall-time column to the CSV");
    app.add_flag("--quiet", quiet, "no progress or trend output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInvalid;
    }

    try {
        SweepConfig cfg;
        cfg.values.clear();
        if (!config_path.empty()) apply_config(read_json_file(config_path), cfg);
        if (app.count("--seed")) cfg.seed = seed;
        if (app.count("--trials")) cfg.trials = trials;
        if (!schemes_arg.empty()) {
            cfg.schemes.clear();
            for (auto& s : split(schemes_arg, ',')) cfg.schemes.push_back(parse_scheme(s));
        }
        if (!sweep_arg.empty()) {
            auto eq = sweep_arg.find('=');
            if (eq == std::string::npos) throw InvalidConfig("--sweep expects <var>=<comma list>");
            cfg.var = parse_sweep_var(sweep_arg.substr(0, eq));
            cfg.values.clear();
            for (auto& v : split(sweep_arg.substr(eq + 1), ',')) cfg.values.push_back(parse_number(v));
        }
        if (cfg.values.empty()) {
            cfg.var = SweepVar::energy_req;
            cfg.values = {cfg.base.energy_req * 1e3};
        }
        cfg.timing = timing;
        cfg.out_path = out_path;

        if (!scenario_path.empty()) return solve_one(scenario_path, cfg, out_path);

        cfg.validate();
        const int total = static_cast<int>(cfg.values.size()) * cfg.trials;
        ProgressFn progress;
        if (!quiet)
            progress = [&](int p, int t) {
                std::cerr << "\r" << p * cfg.trials + t + 1 << "/" << total << std::flush;
            };
        SweepResult res = run_sweep(cfg, progress);
        if (!quiet) std::cerr << "\n";

        if (out_path.empty()) {
            write_csv(std::cout, res);
        } else {
            std::ofstream f(out_path, std::ios::binary);
            if (!f) throw InvalidConfig("cannot write " + out_path);
            write_csv(f, res);
        }
        TrendReport tr = summarize(res);
        if (!summary_path.empty()) {
            std::ofstream f(summary_path, std::ios::binary);
            if (!f) throw InvalidConfig("cannot write " + summary_path);
            write_summary_csv(f, tr);
        }
        if (!quiet && !out_path.empty()) write_verdicts(std::cout, summarize(res, true));
        return res.any_convergence_failure() ? kExitConvergence : 0;
    } catch (const InvalidConfig& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConvergence;
    }
}
