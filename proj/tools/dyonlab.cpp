// dyonlab: construct Julia-Zee dyon and 't Hooft-Polyakov monopole profile
// functions by classification shooting plus an outer fixed-point iteration,
// then verify their qualitative properties and compute the charges.

#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dyonlab/fixedpoint.hpp"
#include "dyonlab/io.hpp"
#include "dyonlab/observables.hpp"
#include "dyonlab/verify.hpp"

namespace {

using namespace dyonlab;
using clock_type = std::chrono::steady_clock;

struct RunFlags {
    double beta = 1.0;
    double bigC = 0.0;
    double g = 1.0;
    double rho0 = 1.0e-4;
    double rho_max = 0.0;  // 0: 25/nu default
    double fp_tol = 1.0e-8;
    double ode_tol = 1.0e-10;
    double bisect_tol = 1.0e-12;
    double relax = 0.7;
    double residual_acceptance = 1.0e-6;
    std::string out;
    std::string manifest;
    std::string plot_data;
    bool oracle_check = false;
};

void add_common_flags(CLI::App* cmd, RunFlags& f, bool with_C) {
    cmd->add_option("--beta", f.beta, "coupling beta = sqrt(2 lambda)/g");
    if (with_C)
        cmd->add_option("--C", f.bigC, "asymptotic electric slope, 0 <= C < 1");
    cmd->add_option("--g", f.g, "gauge coupling");
    cmd->add_option("--rho0", f.rho0, "inner cutoff radius");
    cmd->add_option("--rho-max", f.rho_max, "outer cutoff (default 25/nu)");
    cmd->add_option("--fp-tol", f.fp_tol, "outer fixed-point tolerance");
    cmd->add_option("--ode-tol", f.ode_tol, "integrator local tolerance");
    cmd->add_option("--bisect-tol", f.bisect_tol, "bisection bracket width");
    cmd->add_option("--relax", f.relax, "under-relaxation weight");
    cmd->add_option("--residual-acceptance", f.residual_acceptance,
                    "acceptance threshold for equation residuals");
    cmd->add_option("--out", f.out, "profile CSV output path");
    cmd->add_option("--manifest", f.manifest, "run manifest JSON path");
    cmd->add_option("--plot-data", f.plot_data,
                    "prefix for two-column plot files");
    cmd->add_flag("--oracle-check", f.oracle_check,
                  "compare against the closed form (beta = 0 only)");
}

SolveOptions solve_options(const RunFlags& f) {
    SolveOptions o;
    o.fp_tol = f.fp_tol;
    o.ode_tol = f.ode_tol;
    o.bisect_tol = f.bisect_tol;
    o.relax = f.relax;
    o.rho0 = f.rho0;
    o.rho_max = f.rho_max;
    o.residual_acceptance = f.residual_acceptance;
    return o;
}

std::string canonical_string(const RunFlags& f, const char* mode) {
    std::ostringstream os;
    os.precision(17);
    os << mode << ";beta=" << f.beta << ";C=" << f.bigC << ";g=" << f.g
       << ";rho0=" << f.rho0 << ";rho_max=" << f.rho_max
       << ";fp_tol=" << f.fp_tol << ";ode_tol=" << f.ode_tol
       << ";bisect_tol=" << f.bisect_tol << ";relax=" << f.relax;
    return os.str();
}

void write_plot_files(const std::string& prefix, const DyonSolution& sol) {
    const RadialGrid& g = *sol.F.grid;
    auto two_col = [&](const std::string& path, const Eigen::ArrayXd& v) {
        std::FILE* fp = std::fopen(path.c_str(), "w");
        if (!fp) throw ConfigError("cannot open " + path);
        for (Eigen::Index i = 0; i < g.size(); ++i)
            std::fprintf(fp, "%.17g %.17g\n", g.nodes(i), v(i));
        std::fclose(fp);
    };
    two_col(prefix + "_F.dat", sol.F.values);
    two_col(prefix + "_h.dat", sol.h.values);
    two_col(prefix + "_J.dat", sol.J.values);

    // log-scale tail sheet for decay inspection over the outer half
    std::FILE* fp = std::fopen((prefix + "_tail.dat").c_str(), "w");
    if (!fp) throw ConfigError("cannot open " + prefix + "_tail.dat");
    auto log10_or_nan = [](double v) {
        return v > 0.0 ? std::log10(v) : std::nan("");
    };
    for (Eigen::Index i = g.size() / 2; i < g.size(); ++i) {
        const double rho = g.nodes(i);
        const double jpp = 2.0 * sol.J.values(i) * sol.F.values(i) *
                           sol.F.values(i) / (rho * rho);
        std::fprintf(fp, "%.17g %.17g %.17g %.17g\n", rho,
                     log10_or_nan(sol.F.values(i)),
                     log10_or_nan(1.0 - sol.h.values(i)), log10_or_nan(jpp));
    }
    std::fclose(fp);
}

int run_solve(const RunFlags& f, RunMode mode) {
    ModelParameters params;
    params.beta = f.beta;
    params.bigC = mode == RunMode::monopole ? 0.0 : f.bigC;
    params.g = f.g;
    params.mode = mode;
    try {
        params.validate();
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    if (f.oracle_check && f.beta != 0.0) {
        std::fprintf(stderr, "error: --oracle-check requires beta = 0 (the "
                             "closed form exists only there)\n");
        return 1;
    }

    SolveOptions opts = solve_options(f);

    // optional outer-iteration seed from the environment
    IterationState seed;
    const IterationState* seed_ptr = nullptr;
    if (const char* sp = std::getenv("DYONLAB_SEED_PROFILE");
        sp != nullptr && *sp != '\0') {
        try {
            LoadedProfiles lp = read_profiles_csv(sp);
            seed.J = std::move(lp.J);
            seed.h = std::move(lp.h);
            seed_ptr = &seed;
            std::fprintf(stderr, "seeding outer iteration from %s\n", sp);
        } catch (const Error& e) {
            std::fprintf(stderr, "error: bad seed profile: %s\n", e.what());
            return 1;
        }
    }

    const auto t0 = clock_type::now();
    DyonSolution sol;
    try {
        sol = solve_dyon(params, opts, seed_ptr);
    } catch (const ConvergenceError& e) {
        std::fprintf(stderr, "convergence failure: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 2;
    }
    const double wall =
        std::chrono::duration<double>(clock_type::now() - t0).count();

    std::printf("converged in %d sweeps: a* = %.12g  b* = %.12g  c* = %.12g\n",
                sol.iterations, sol.a_star, sol.b_star, sol.c_star);
    std::printf("residuals: F %.3e  h %.3e  J %.3e%s\n", sol.residuals.f_eq,
                sol.residuals.h_eq, sol.residuals.j_eq,
                sol.residual_warning ? "  (above acceptance)" : "");
    std::printf("charges: q_m = %.9g  q_e = %.9g\n", sol.q_m, sol.q_e);
    if (sol.boundary_warning)
        std::printf("warning: boundary values off target; consider a larger "
                    "--rho-max\n");

    nlohmann::json manifest = manifest_json(
        sol, opts, wall,
        input_hash(canonical_string(
            f, mode == RunMode::monopole ? "monopole" : "solve")));

    if (f.oracle_check) {
        const OracleDistance d =
            compare_to_oracle(sol, bps_oracle(params.bigC));
        manifest["results"]["oracle_supnorm"] = d.max();
        std::printf("oracle sup-norm distance: %.3e\n", d.max());
    }

    try {
        if (!f.out.empty()) write_profiles_csv(f.out, sol.F, sol.h, sol.J);
        if (!f.manifest.empty()) write_json(f.manifest, manifest);
        if (!f.plot_data.empty()) write_plot_files(f.plot_data, sol);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            vals.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError(std::string("bad ") + what +
                              " list entry: " + item);
        }
    }
    if (vals.empty()) throw ConfigError(std::string(what) + " list is empty");
    return vals;
}

int run_sweep(const RunFlags& f, const std::string& beta_list,
              const std::string& c_list, int jobs) {
    std::vector<double> betas, cs;
    try {
        betas = parse_list(beta_list, "beta");
        cs = parse_list(c_list, "C");
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }

    struct Row {
        double beta = 0.0, C = 0.0;
        bool ok = false;
        DyonSolution sol;
    };
    std::vector<Row> rows;
    for (double b : betas)
        for (double c : cs) {
            Row r;
            r.beta = b;
            r.C = c;
            rows.push_back(std::move(r));
        }

    const SolveOptions opts = solve_options(f);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= rows.size()) return;
            try {
                ModelParameters p =
                    ModelParameters::dyon(rows[i].beta, rows[i].C, f.g);
                rows[i].sol = solve_dyon(p, opts);
                rows[i].ok = true;
            } catch (const std::exception& e) {
                std::fprintf(stderr, "point (beta=%g, C=%g) failed: %s\n",
                             rows[i].beta, rows[i].C, e.what());
            }
        }
    };
    jobs = std::max(1, jobs);
    std::vector<std::thread> pool;
    for (int t = 0; t + 1 < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::FILE* fp = f.out.empty() ? stdout : std::fopen(f.out.c_str(), "w");
    if (!fp) {
        std::fprintf(stderr, "error: cannot open %s\n", f.out.c_str());
        return 1;
    }
    std::fprintf(fp,
                 "beta,C,g,status,a_star,b_star,c_star,q_m,q_e,rate_F,rate_h,"
                 "rate_Jpp,iterations\n");
    bool any_failed = false;
    for (const Row& r : rows) {
        if (r.ok) {
            std::fprintf(fp,
                         "%.17g,%.17g,%.17g,ok,%.17g,%.17g,%.17g,%.17g,%.17g,"
                         "%.17g,%.17g,%.17g,%d\n",
                         r.beta, r.C, f.g, r.sol.a_star, r.sol.b_star,
                         r.sol.c_star, r.sol.q_m, r.sol.q_e, r.sol.rate_F,
                         r.sol.rate_h, r.sol.rate_Jpp, r.sol.iterations);
        } else {
            std::fprintf(fp, "%.17g,%.17g,%.17g,failed,,,,,,,,,\n", r.beta,
                         r.C, f.g);
            any_failed = true;
        }
    }
    if (fp != stdout) std::fclose(fp);
    return any_failed ? 2 : 0;
}

int run_verify(const std::string& csv_path, const std::string& manifest_in,
               double beta, double bigC, double g,
               const std::string& report_path) {
    LoadedProfiles lp;
    try {
        lp = read_profiles_csv(csv_path);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }

    if (!manifest_in.empty()) {
        try {
            const nlohmann::json m = read_json(manifest_in);
            beta = m.at("params").at("beta").get<double>();
            bigC = m.at("params").at("C").get<double>();
            g = m.at("params").at("g").get<double>();
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: bad manifest: %s\n", e.what());
            return 1;
        }
    }

    DyonSolution sol;
    try {
        sol.params = ModelParameters::dyon(beta, bigC, g);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    sol.F = std::move(lp.F);
    sol.h = std::move(lp.h);
    sol.J = std::move(lp.J);
    // shooting constants re-fitted from the innermost node
    const double r0 = sol.F.rho0();
    sol.a_star = (sol.F.values(0) - 1.0) / (r0 * r0);
    sol.b_star = sol.h.values(0) / r0;
    sol.c_star = sol.J.values(0) / (r0 * r0);
    sol.residuals = residual(sol.params, sol.F, sol.h, sol.J);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto safe_fit = [&](DecayTarget t) {
        try {
            return fit_decay(sol, t);
        } catch (const Error&) {
            return nan;
        }
    };
    sol.rate_F = safe_fit(DecayTarget::F);
    sol.rate_h = beta > 0.0 ? safe_fit(DecayTarget::one_minus_h) : nan;
    sol.rate_Jpp = bigC > 0.0 ? safe_fit(DecayTarget::Jpp) : nan;

    const PropertyReport rep = check_theorem(sol);
    for (const auto& c : rep.checks) {
        std::printf("%-42s %s  measured %.3e  tolerance %.3e%s\n",
                    c.name.c_str(), c.pass ? "pass" : "FAIL", c.measured,
                    c.tolerance, c.informational ? "  [informational]" : "");
    }
    std::printf("overall: %s\n", rep.overall ? "pass" : "FAIL");
    if (!report_path.empty()) {
        try {
            write_json(report_path, report_json(rep));
        } catch (const Error& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 1;
        }
    }
    return rep.overall ? 0 : 3;
}

int run_oracle(double bigC, const std::string& out, double rho0,
               double rho_max) {
    OracleSolution o;
    try {
        o = bps_oracle(bigC);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    if (rho_max <= 0.0) rho_max = 25.0 / o.nu;
    auto grid = make_shared_grid(default_grid(rho0, rho_max));
    const Profile F = o.sample_F(grid);
    const Profile h = o.sample_h(grid);
    const Profile J = o.sample_J(grid);

    double worst = 0.0;
    for (double rho : {0.1, 1.0, 5.0, 10.0})
        worst = std::max(worst, o.equation_residual(rho).max());
    std::printf("closed form at C = %g (nu = %.12g): max analytic residual "
                "%.3e\n",
                bigC, o.nu, worst);
    if (!out.empty()) {
        try {
            write_profiles_csv(out, F, h, J);
        } catch (const Error& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 1;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Julia-Zee dyon / 't Hooft-Polyakov monopole profile solver"};
    app.require_subcommand(1);

    RunFlags solve_flags;
    CLI::App* solve_cmd =
        app.add_subcommand("solve", "solve the dyon boundary value problem");
    add_common_flags(solve_cmd, solve_flags, true);

    RunFlags mono_flags;
    CLI::App* mono_cmd = app.add_subcommand(
        "monopole", "solve with C = 0 and the electric profile frozen at 0");
    add_common_flags(mono_cmd, mono_flags, false);

    RunFlags sweep_flags;
    std::string sweep_betas = "1.0", sweep_cs = "0.0";
    int sweep_jobs = 1;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "solve a grid of (beta, C) points");
    sweep_cmd->add_option("--beta", sweep_betas, "comma-separated beta list");
    sweep_cmd->add_option("--C", sweep_cs, "comma-separated C list");
    sweep_cmd->add_option("--g", sweep_flags.g, "gauge coupling");
    sweep_cmd->add_option("--rho0", sweep_flags.rho0, "inner cutoff");
    sweep_cmd->add_option("--rho-max", sweep_flags.rho_max, "outer cutoff");
    sweep_cmd->add_option("--fp-tol", sweep_flags.fp_tol, "fixed-point tol");
    sweep_cmd->add_option("--ode-tol", sweep_flags.ode_tol, "integrator tol");
    sweep_cmd->add_option("--bisect-tol", sweep_flags.bisect_tol,
                          "bisection tol");
    sweep_cmd->add_option("--relax", sweep_flags.relax, "relaxation weight");
    sweep_cmd->add_option("--jobs", sweep_jobs, "concurrent solves");
    sweep_cmd->add_option("--out", sweep_flags.out, "sweep table CSV path");

    std::string verify_csv, verify_manifest, verify_report;
    double verify_beta = 1.0, verify_C = 0.0, verify_g = 1.0;
    CLI::App* verify_cmd = app.add_subcommand(
        "verify", "run the qualitative property suite on a profile CSV");
    verify_cmd->add_option("csv", verify_csv, "profile CSV path")->required();
    verify_cmd->add_option("--manifest", verify_manifest,
                           "manifest JSON to read beta, C, g from");
    verify_cmd->add_option("--beta", verify_beta, "coupling beta");
    verify_cmd->add_option("--C", verify_C, "asymptotic electric slope");
    verify_cmd->add_option("--g", verify_g, "gauge coupling");
    verify_cmd->add_option("--report", verify_report, "report JSON path");

    double oracle_C = 0.0, oracle_rho0 = 1.0e-4, oracle_rho_max = 0.0;
    std::string oracle_out;
    CLI::App* oracle_cmd =
        app.add_subcommand("oracle", "emit the lambda = 0 closed-form profiles");
    oracle_cmd->add_option("--C", oracle_C, "asymptotic electric slope");
    oracle_cmd->add_option("--out", oracle_out, "profile CSV path");
    oracle_cmd->add_option("--rho0", oracle_rho0, "inner cutoff");
    oracle_cmd->add_option("--rho-max", oracle_rho_max, "outer cutoff");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (solve_cmd->parsed()) return run_solve(solve_flags, RunMode::dyon);
        if (mono_cmd->parsed()) return run_solve(mono_flags, RunMode::monopole);
        if (sweep_cmd->parsed())
            return run_sweep(sweep_flags, sweep_betas, sweep_cs, sweep_jobs);
        if (verify_cmd->parsed())
            return run_verify(verify_csv, verify_manifest, verify_beta,
                              verify_C, verify_g, verify_report);
        if (oracle_cmd->parsed())
            return run_oracle(oracle_C, oracle_out, oracle_rho0,
                              oracle_rho_max);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
