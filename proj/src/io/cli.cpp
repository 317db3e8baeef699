#include "dgmd/io/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "dgmd/core/errors.hpp"
#include "dgmd/integrators/convergence.hpp"
#include "dgmd/io/config.hpp"
#include "dgmd/io/format.hpp"
#include "dgmd/io/output.hpp"

namespace dgmd {

namespace {

struct Overrides {
    std::string config;
    std::optional<std::string> integrator;
    std::optional<std::string> variant;
    std::optional<double> tau;
    std::optional<double> t_max;
    std::optional<int> ranks;
    std::optional<std::string> out_prefix;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("config", o.config, "Experiment file (TOML)")->required();
    cmd->add_option("--integrator", o.integrator, "dg, verlet or midpoint")
        ->check(CLI::IsMember({"dg", "verlet", "midpoint"}));
    cmd->add_option("--dg-variant", o.variant, "DG variant for angle and dihedral terms")
        ->check(CLI::IsMember({"left", "right", "symmetric"}));
    cmd->add_option("--tau", o.tau, "Step size");
    cmd->add_option("--tmax", o.t_max, "Final time");
    cmd->add_option("--ranks", o.ranks, "Number of simulated ranks")->check(CLI::PositiveNumber);
    cmd->add_option("--out-prefix", o.out_prefix, "Prefix for output files");
}

std::unique_ptr<Experiment> load(const Overrides& o) {
    auto e = load_experiment(o.config);
    if (o.integrator) e->run.integrator.method = parse_method(*o.integrator);
    if (o.variant) e->run.integrator.scheme.angle = e->run.integrator.scheme.dihedral = parse_dg_variant(*o.variant);
    if (o.t_max) {
        e->t_max = *o.t_max;
        e->convergence.t_max = *o.t_max;
    }
    e->set_tau(o.tau.value_or(e->run.tau));
    if (o.ranks) e->ranks = *o.ranks;
    if (o.out_prefix) e->output_prefix = *o.out_prefix;
    return e;
}

double relative_deviation(const std::vector<DiagnosticsRecord>& recs) {
    const double h0 = recs.front().total_energy;
    double dev = 0.0;
    for (const auto& r : recs) dev = std::max(dev, std::abs(r.total_energy - h0));
    return dev / std::max(std::abs(h0), 1e-300);
}

double momentum_drift(const std::vector<DiagnosticsRecord>& recs, bool angular) {
    const auto& first = recs.front();
    double drift = 0.0;
    for (const auto& r : recs) {
        const Vec3 d = angular ? r.angular_momentum - first.angular_momentum
                               : r.linear_momentum - first.linear_momentum;
        drift = std::max(drift, norm(d));
    }
    return drift;
}

int cmd_run(const Overrides& o, std::ostream& out) {
    auto e = load(o);
    auto forces = make_forces(*e, e->ranks);

    RunConfig cfg = e->run;
    if (cfg.trajectory_interval == 0) cfg.trajectory_interval = std::max<long>(cfg.steps, 1);
    const std::string xyz_path = e->output_prefix + ".xyz";
    const std::string csv_path = e->output_prefix + ".csv";
    std::ofstream xyz(xyz_path);
    if (!xyz) throw IoError("cannot open " + xyz_path);
    const auto labels = e->species_labels();
    const Box box = e->box;
    const auto recs = run_simulation(e->system, cfg, *forces, [&](long n, double t, const ParticleSystem& s) {
        write_xyz_frame(xyz, n, t, s, box, labels);
    });
    std::ofstream csv(csv_path);
    if (!csv) throw IoError("cannot open " + csv_path);
    write_diagnostics_csv(csv, recs);

    long newton = 0, cg = 0;
    for (const auto& r : recs) {
        newton += r.newton_iterations;
        cg += r.cg_iterations_total;
    }
    out << e->name << ": " << to_string(e->run.integrator.method) << ", tau " << format_double(cfg.tau)
        << ", " << cfg.steps << " steps, " << e->system.size() << " particles, " << e->ranks
        << " rank(s)\n";
    out << "  max relative energy deviation " << std::scientific << std::setprecision(3)
        << relative_deviation(recs) << "\n  linear momentum drift " << momentum_drift(recs, false)
        << "\n  angular momentum drift " << momentum_drift(recs, true) << std::defaultfloat
        << "\n  newton iterations " << newton << ", cg iterations " << cg << "\n  wrote " << csv_path
        << " and " << xyz_path << "\n";
    return 0;
}

int cmd_convergence(const Overrides& o, std::ostream& out) {
    auto e = load(o);
    if (e->convergence.taus.empty()) throw ConfigError("the config has no [convergence] table");
    std::vector<Method> methods;
    if (o.integrator) methods.push_back(parse_method(*o.integrator));
    else methods = {Method::velocity_dg, Method::verlet, Method::implicit_midpoint};

    const std::string csv_path = e->output_prefix + "_convergence.csv";
    std::ofstream csv(csv_path);
    if (!csv) throw IoError("cannot open " + csv_path);
    csv << "method,tau,error\n";
    const Experiment& ex = *e;
    const int ranks = e->ranks;
    for (const auto m : methods) {
        RunConfig base = e->run;
        base.integrator.method = m;
        const auto res = convergence_study(ex.system, ex.box, [&] { return make_forces(ex, ranks); }, base,
                                           ex.convergence.taus, ex.convergence.t_max,
                                           ex.convergence.reference_divisor);
        out << to_string(m) << " (reference tau " << format_double(res.reference_tau) << ")\n";
        for (const auto& p : res.points) {
            out << "  tau " << std::setw(10) << format_double(p.tau) << "  error " << std::scientific
                << std::setprecision(4) << p.error << std::defaultfloat << '\n';
            csv << to_string(m) << ',' << format_double(p.tau) << ',' << format_double(p.error) << '\n';
        }
        out << "  order " << std::fixed << std::setprecision(3) << res.order << std::defaultfloat << '\n';
    }
    return 0;
}

int cmd_check(const Overrides& o, std::ostream& out) {
    auto e = load(o);
    auto& sys = e->system;
    auto forces = make_forces(*e, e->ranks);
    const auto scheme = e->run.integrator.scheme;
    bool ok = true;
    auto report = [&](const std::string& what, bool pass, double value) {
        out << (pass ? "PASS " : "FAIL ") << what << " (" << std::scientific << std::setprecision(3)
            << value << std::defaultfloat << ")\n";
        ok = ok && pass;
    };

    double length = 1.0;
    for (const auto& s : e->forcefield.species) length = std::min(length, s.sigma);
    forces->prepare(sys);

    std::mt19937_64 rng(e->seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<Vec3> qp = sys.q;
    for (auto& x : qp) x += 1e-2 * length * Vec3{unit(rng), unit(rng), unit(rng)};

    const auto dg = forces->discrete_gradient(sys.q, qp, scheme);
    double lhs = 0.0;
    for (std::size_t i = 0; i < sys.size(); ++i) lhs += dot(dg.gradient[i], qp[i] - sys.q[i]);
    const double dv = dg.potential_at_qprime - dg.potential_at_q;
    const double scale = 1.0 + std::abs(dg.potential_at_q) + std::abs(dg.potential_at_qprime);
    report("discrete gradient property", std::abs(lhs - dv) <= 1e-10 * scale, std::abs(lhs - dv) / scale);

    const auto same = forces->discrete_gradient(sys.q, sys.q, scheme);
    const auto grad = forces->gradient(sys.q);
    double gmax = 0.0, gdiff = 0.0;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        gmax = std::max(gmax, norm(grad.gradient[i]));
        gdiff = std::max(gdiff, norm(same.gradient[i] - grad.gradient[i]));
    }
    report("discrete gradient at equal arguments equals the gradient", gdiff <= 1e-10 * (1.0 + gmax),
           gdiff / (1.0 + gmax));

    double fd_err = 0.0;
    const double h = 1e-5 * length;
    for (std::size_t i = 0; i < std::min<std::size_t>(sys.size(), 4); ++i)
        for (int d = 0; d < 3; ++d) {
            auto x = sys.q;
            x[i][d] += h;
            const double up = forces->gradient(x).potential;
            x[i][d] -= 2 * h;
            const double down = forces->gradient(x).potential;
            const double fd = (up - down) / (2 * h);
            fd_err = std::max(fd_err, std::abs(fd - grad.gradient[i][d]) / (1.0 + std::abs(grad.gradient[i][d])));
        }
    report("gradient against central differences", fd_err <= 1e-6, fd_err);

    RunConfig cfg = e->run;
    cfg.steps = std::min<long>(cfg.steps, 200);
    cfg.diagnostics_interval = 1;
    cfg.trajectory_interval = 0;
    auto run_forces = make_forces(*e, e->ranks);
    const auto recs = run_simulation(sys, cfg, *run_forces);
    double p_scale = 1.0;
    for (const auto& p : sys.p) p_scale += norm(p);
    const double dev = relative_deviation(recs);
    if (cfg.integrator.method == Method::velocity_dg)
        report("energy over " + std::to_string(cfg.steps) + " steps", dev <= 1e-9, dev);
    else
        out << "INFO energy deviation over " << cfg.steps << " steps " << std::scientific << dev << std::defaultfloat << '\n';
    const double pdrift = momentum_drift(recs, false);
    report("linear momentum", pdrift <= 1e-10 * p_scale, pdrift);
    if (!e->box.is_periodic()) {
        const double ldrift = momentum_drift(recs, true);
        report("angular momentum", ldrift <= 1e-9 * p_scale, ldrift);
    }
    return ok ? 0 : 1;
}

} // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Energy-preserving molecular dynamics with discrete gradients"};
    app.require_subcommand(1);
    Overrides run_o, conv_o, check_o;
    auto* run = app.add_subcommand("run", "Simulate and write <prefix>.csv and <prefix>.xyz");
    auto* conv = app.add_subcommand("convergence", "Step-size sweep with fitted orders");
    auto* check = app.add_subcommand("check", "Invariant checks on the configured system");
    add_common(run, run_o);
    add_common(conv, conv_o);
    add_common(check, check_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }
    try {
        if (run->parsed()) return cmd_run(run_o, out);
        if (conv->parsed()) return cmd_convergence(conv_o, out);
        return cmd_check(check_o, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const StepFailure& e) {
        err << "step failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace dgmd
