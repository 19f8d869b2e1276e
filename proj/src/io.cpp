#include "dyonlab/io.hpp"

#include <array>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace dyonlab {

void write_profiles_csv(const std::string& path, const Profile& F,
                        const Profile& h, const Profile& J) {
    if (F.grid != h.grid || F.grid != J.grid)
        throw ConfigError("write_profiles_csv: profiles must share one grid");
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ConfigError("write_profiles_csv: cannot open " + path);
    std::fputs("rho,F,dF,h,dh,J,dJ\n", f);
    const RadialGrid& g = *F.grid;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                     g.nodes(i), F.values(i), F.derivs(i), h.values(i),
                     h.derivs(i), J.values(i), J.derivs(i));
    }
    std::fclose(f);
}

LoadedProfiles read_profiles_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("read_profiles_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("read_profiles_csv: empty file " + path);
    if (line.rfind("rho,F,dF,h,dh,J,dJ", 0) != 0)
        throw ConfigError("read_profiles_csv: bad header in " + path);

    std::vector<std::array<double, 7>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::array<double, 7> row{};
        std::istringstream ss(line);
        std::string field;
        int k = 0;
        while (std::getline(ss, field, ',')) {
            if (k >= 7)
                throw ConfigError("read_profiles_csv: too many fields at line " +
                                  std::to_string(lineno));
            try {
                row[k] = std::stod(field);
            } catch (const std::exception&) {
                throw ConfigError("read_profiles_csv: bad number at line " +
                                  std::to_string(lineno));
            }
            ++k;
        }
        if (k != 7)
            throw ConfigError("read_profiles_csv: expected 7 fields at line " +
                              std::to_string(lineno));
        rows.push_back(row);
    }
    if (rows.size() < 3)
        throw ConfigError("read_profiles_csv: need at least 3 rows");

    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    Eigen::ArrayXd nodes(n), Fv(n), dF(n), hv(n), dh(n), Jv(n), dJ(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        nodes(i) = rows[i][0];
        Fv(i) = rows[i][1];
        dF(i) = rows[i][2];
        hv(i) = rows[i][3];
        dh(i) = rows[i][4];
        Jv(i) = rows[i][5];
        dJ(i) = rows[i][6];
    }
    LoadedProfiles out;
    out.grid = make_shared_grid(grid_from_nodes(std::move(nodes)));
    out.F = Profile(out.grid, std::move(Fv), std::move(dF));
    out.h = Profile(out.grid, std::move(hv), std::move(dh));
    out.J = Profile(out.grid, std::move(Jv), std::move(dJ));
    return out;
}

std::string input_hash(const std::string& canonical) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

nlohmann::json manifest_json(const DyonSolution& sol, const SolveOptions& opts,
                             double wall_time_s,
                             const std::string& input_hash_hex) {
    const RadialGrid& g = *sol.F.grid;
    nlohmann::json j;
    j["version"] = kToolVersion;
    j["params"] = {{"beta", sol.params.beta},
                   {"C", sol.params.bigC},
                   {"g", sol.params.g},
                   {"nu", sol.params.nu()},
                   {"mode", sol.params.mode == RunMode::monopole ? "monopole"
                                                                 : "dyon"}};
    j["grid"] = {{"rho0", g.rho0()},
                 {"rho_max", g.rho_max()},
                 {"n_geo", g.n_geo},
                 {"n_uni", g.n_uni},
                 {"nodes", g.size()}};
    j["tolerances"] = {{"fp_tol", opts.fp_tol},
                       {"ode_tol", opts.ode_tol},
                       {"bisect_tol", opts.bisect_tol},
                       {"relax", opts.relax},
                       {"residual_acceptance", opts.residual_acceptance}};
    j["results"] = {
        {"a_star", sol.a_star},
        {"b_star", sol.b_star},
        {"c_star", sol.c_star},
        {"iterations", sol.iterations},
        {"residuals",
         {{"F", sol.residuals.f_eq},
          {"h", sol.residuals.h_eq},
          {"J", sol.residuals.j_eq}}},
        {"charges", {{"q_m", sol.q_m}, {"q_e", sol.q_e}}},
        {"decay_fits",
         {{"F", sol.rate_F}, {"one_minus_h", sol.rate_h}, {"Jpp", sol.rate_Jpp}}},
        {"residual_warning", sol.residual_warning},
        {"boundary_warning", sol.boundary_warning}};
    j["wall_time_s"] = wall_time_s;
    j["input_hash"] = input_hash_hex;
    return j;
}

nlohmann::json report_json(const PropertyReport& rep) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : rep.checks) {
        checks.push_back({{"name", c.name},
                          {"pass", c.pass},
                          {"measured", c.measured},
                          {"tolerance", c.tolerance},
                          {"informational", c.informational}});
    }
    return nlohmann::json{
        {"version", kToolVersion}, {"overall", rep.overall}, {"checks", checks}};
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_json: cannot open " + path);
    out << j.dump(2) << "\n";
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("read_json: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

}  // namespace dyonlab
