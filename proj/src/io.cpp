#include "dasee/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "dasee/errors.hpp"

namespace dasee {

namespace {

json vec(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat(const MatrixXd& m) {
    json out = json::array();
    for (int i = 0; i < m.rows(); ++i) out.push_back(vec(m.row(i).transpose()));
    return out;
}

json points(const std::vector<Point>& pts) {
    json out = json::array();
    for (auto& p : pts) out.push_back({p[0], p[1]});
    return out;
}

VectorXd read_vec(const json& j, const char* key) {
    auto v = j.at(key).get<std::vector<double>>();
    return Eigen::Map<VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<Point> read_points(const json& j, const char* key) {
    std::vector<Point> out;
    for (auto& p : j.at(key)) {
        if (p.size() != 2) throw InvalidConfig(std::string(key) + ": points must have two coordinates");
        out.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return out;
}

template <class F>
auto guarded(F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw InvalidConfig(e.what());
    }
}

}  // namespace

json to_json(const Scenario& sc) {
    return {{"num_ports", sc.num_ports},
            {"num_users", sc.num_users},
            {"side_length", sc.side_length},
            {"port_positions", points(sc.port_positions)},
            {"user_positions", points(sc.user_positions)},
            {"noise_power", sc.noise_power},
            {"pathloss_const", sc.pathloss_const},
            {"pathloss_exp", sc.pathloss_exp},
            {"conversion_eff", sc.conversion_eff},
            {"circuit_power", vec(sc.circuit_power)},
            {"weights", vec(sc.weights)},
            {"power_cap", vec(sc.power_cap)},
            {"energy_req", vec(sc.energy_req)},
            {"frame_length", sc.frame_length},
            {"min_distance", sc.min_distance},
            {"fading", sc.fading},
            {"seed", sc.seed}};
}

Scenario scenario_from_json(const json& j) {
    return guarded([&] {
        Scenario sc;
        sc.num_ports = j.at("num_ports").get<int>();
        sc.num_users = j.at("num_users").get<int>();
        sc.side_length = j.at("side_length").get<double>();
        sc.port_positions = read_points(j, "port_positions");
        sc.user_positions = read_points(j, "user_positions");
        sc.noise_power = j.at("noise_power").get<double>();
        sc.pathloss_const = j.at("pathloss_const").get<double>();
        sc.pathloss_exp = j.at("pathloss_exp").get<double>();
        sc.conversion_eff = j.at("conversion_eff").get<double>();
        sc.circuit_power = read_vec(j, "circuit_power");
        sc.weights = read_vec(j, "weights");
        sc.power_cap = read_vec(j, "power_cap");
        sc.energy_req = read_vec(j, "energy_req");
        sc.frame_length = j.value("frame_length", 1.0);
        if (sc.frame_length != 1.0) throw InvalidConfig("frame_length must be 1");
        sc.min_distance = j.value("min_distance", 0.5);
        sc.fading = j.value("fading", true);
        sc.seed = j.value("seed", std::uint64_t{0});
        sc.validate();
        return sc;
    });
}

json to_json(const ScenarioParams& p) {
    json j = {{"num_ports", p.num_ports},
              {"num_users", p.num_users},
              {"side_length", p.side_length},
              {"noise_power", p.noise_power},
              {"pathloss_const", p.pathloss_const},
              {"pathloss_exp", p.pathloss_exp},
              {"conversion_eff", p.conversion_eff},
              {"circuit_power", p.circuit_power},
              {"power_cap", p.power_cap},
              {"energy_req", p.energy_req},
              {"min_distance", p.min_distance},
              {"random_ports", p.random_ports},
              {"fading", p.fading}};
    if (!p.weights.empty()) j["weights"] = p.weights;
    return j;
}

ScenarioParams params_from_json(const json& j) {
    return guarded([&] {
        if (!j.is_object()) throw InvalidConfig("scenario parameters must be a JSON object");
        static const std::set<std::string> known = {
            "num_ports", "num_users", "side_length", "noise_power", "pathloss_const", "pathloss_exp",
            "conversion_eff", "circuit_power", "weights", "power_cap", "energy_req", "min_distance",
            "random_ports", "fading"};
        for (auto& [k, v] : j.items())
            if (!known.count(k)) throw InvalidConfig("unknown scenario key: " + k);
        ScenarioParams p;
        p.num_ports = j.value("num_ports", p.num_ports);
        p.num_users = j.value("num_users", p.num_users);
        p.side_length = j.value("side_length", p.side_length);
        p.noise_power = j.value("noise_power", p.noise_power);
        p.pathloss_const = j.value("pathloss_const", p.pathloss_const);
        p.pathloss_exp = j.value("pathloss_exp", p.pathloss_exp);
        p.conversion_eff = j.value("conversion_eff", p.conversion_eff);
        p.circuit_power = j.value("circuit_power", p.circuit_power);
        p.power_cap = j.value("power_cap", p.power_cap);
        p.energy_req = j.value("energy_req", p.energy_req);
        p.min_distance = j.value("min_distance", p.min_distance);
        p.random_ports = j.value("random_ports", p.random_ports);
        p.fading = j.value("fading", p.fading);
        if (j.contains("weights")) p.weights = j.at("weights").get<std::vector<double>>();
        if (p.num_ports < 1 || p.num_users < 2) throw InvalidConfig("need num_ports >= 1 and num_users >= 2");
        if (!(p.side_length > 0.0)) throw InvalidConfig("side_length must be > 0");
        if (!(p.noise_power > 0.0)) throw InvalidConfig("noise_power must be > 0");
        if (!(p.conversion_eff > 0.0 && p.conversion_eff <= 1.0))
            throw InvalidConfig("conversion_eff must be in (0,1]");
        if (p.circuit_power < 0 || p.power_cap < 0 || p.energy_req < 0 || p.min_distance <= 0)
            throw InvalidConfig("powers and requirements must be >= 0, min_distance > 0");
        if (!p.weights.empty() && static_cast<int>(p.weights.size()) != p.num_users)
            throw InvalidConfig("weights must have num_users entries");
        return p;
    });
}

json to_json(const Channel& ch) { return {{"h", mat(ch.h)}}; }

Channel channel_from_json(const json& j, const Scenario& sc) {
    return guarded([&] {
        Channel ch;
        ch.h.resize(sc.num_ports, sc.num_users);
        const json& h = j.at("h");
        if (static_cast<int>(h.size()) != sc.num_ports) throw InvalidConfig("h: wrong number of rows");
        for (int i = 0; i < sc.num_ports; ++i) {
            if (static_cast<int>(h[i].size()) != sc.num_users) throw InvalidConfig("h: wrong number of columns");
            for (int k = 0; k < sc.num_users; ++k) {
                double v = h[i][k].get<double>();
                if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidConfig("h must be finite and >= 0");
                ch.h(i, k) = v;
            }
        }
        return ch;
    });
}

json to_json(const SolveReport& r) {
    json j = {{"scheme", r.scheme},
              {"feasible", r.feasible},
              {"converged", r.converged},
              {"objective", r.objective},
              {"uc_ee", r.uc_ee},
              {"nc_ee", r.nc_ee},
              {"per_user_ee", vec(r.per_user_ee)},
              {"tau", vec(r.alloc.tau)},
              {"p", mat(r.alloc.p)},
              {"outer_iters", r.outer_iters},
              {"inner_iters", r.inner_iters},
              {"wall_time_s", r.wall_time_s}};
    if (r.scheme.rfind("uc", 0) == 0) {
        j["psi_norm"] = r.psi_norm;
        j["gap"] = r.gap;
    } else {
        j["t_residual"] = r.t_residual;
        j["q_iters"] = r.outer_iters;
    }
    if (!r.message.empty()) j["message"] = r.message;
    return j;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidConfig(path + ": " + e.what());
    }
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace dasee
