// Command-line front end. Subcommands either tabulate library quantities
// (phi, cfun, kernel, wave-norms, exponent-fit, atoms) or run validation
// suites (validate). Exit codes: 0 success, 1 a validation check failed,
// 2 usage or configuration error.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drs/suite.hpp"

namespace {

using namespace drs;

json load_config(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open config '" + path + "'");
    return json::parse(in);
}

void emit(const RunConfig& cfg, const std::string& kind, const CsvTable& table,
          json data) {
    std::string text;
    if (cfg.format == "csv") {
        text = write_csv(table);
    } else {
        json doc = artifact_envelope(kind, cfg);
        doc["data"] = std::move(data);
        text = doc.dump(2);
        text += '\n';
    }
    if (cfg.out.empty())
        std::fputs(text.c_str(), stdout);
    else
        write_text_file(cfg.out, text);
}

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> xs;
    for (int i = 0; i < count; ++i)
        xs.push_back(lo + (hi - lo) * double(i) / (count - 1));
    return xs;
}

int cmd_validate(const RunConfig& cfg, const std::vector<std::string>& suite_flags) {
    std::vector<std::string> selection;
    if (!suite_flags.empty()) {
        if (!(suite_flags.size() == 1 && suite_flags[0] == "none"))
            selection = suite_flags;
    } else if (cfg.suites_given) {
        selection = cfg.suites;
    } else {
        selection = all_suite_names();
    }
    for (const std::string& name : selection)
        require(std::find(all_suite_names().begin(), all_suite_names().end(), name) !=
                    all_suite_names().end(),
                "unknown suite '" + name + "'");

    std::vector<SuiteResult> results;
    if (selection.empty()) {
        // explicit empty selection: report the no-op, succeed
        SuiteResult r;
        r.suite = "validate";
        CheckResult c;
        c.criterion = "-";
        c.name = "no-suites-selected";
        c.status = CheckStatus::info;
        c.cmp = "";
        r.checks.push_back(c);
        results.push_back(std::move(r));
    } else {
        results = run_suites(selection, cfg);
    }
    emit(cfg, "validate", suite_report_to_csv(results), suite_report_to_json(results));
    return !selection.empty() && any_failure(results) ? 1 : 0;
}

int cmd_phi(const RunConfig& cfg) {
    const SpaceDims d = space_from_json(cfg.space).dims();
    const std::vector<double> rs = linspace(0.0, cfg.grid.r_max, cfg.phi_r_count);
    const PhiProfile base = spherical_phi_profile(d, SpectralParam::real_axis(0.0), rs);

    CsvTable t;
    t.header = {"r", "phi0"};
    json data;
    data["r"] = rs;
    data["phi0"] = base.phi;
    data["profiles"] = json::array();
    std::vector<PhiProfile> profiles;
    for (double lam : cfg.phi_lambda_values) {
        t.header.push_back("phi_" + format_double(lam));
        profiles.push_back(spherical_phi_profile(d, SpectralParam::real_axis(lam), rs));
        data["profiles"].push_back({{"lambda", lam}, {"phi", profiles.back().phi}});
    }
    for (std::size_t j = 0; j < rs.size(); ++j) {
        std::vector<std::string> row = {format_double(rs[j]), format_double(base.phi[j])};
        for (const PhiProfile& p : profiles) row.push_back(format_double(p.phi[j]));
        t.rows.push_back(std::move(row));
    }
    emit(cfg, "phi", t, std::move(data));
    return 0;
}

int cmd_cfun(const RunConfig& cfg) {
    const SpaceDims d = space_from_json(cfg.space).dims();
    const std::vector<double> lams =
        linspace(cfg.cfun_lambda_min, cfg.cfun_lambda_max, cfg.cfun_count);

    CsvTable t;
    t.header = {"lambda", "abs_c", "plancherel"};
    json data;
    data["lambda"] = lams;
    std::vector<double> abs_c, dens;
    for (double l : lams) {
        abs_c.push_back(std::abs(c_function(d, l)));
        dens.push_back(plancherel_density(d, l));
        t.rows.push_back({format_double(l), format_double(abs_c.back()),
                          format_double(dens.back())});
    }
    data["abs_c"] = abs_c;
    data["plancherel"] = dens;
    emit(cfg, "cfun", t, std::move(data));
    return 0;
}

int cmd_kernel(const RunConfig& cfg) {
    const SpaceDims d = space_from_json(cfg.space).dims();
    TransformOptions opts = cfg.grid;
    opts.t_max = std::max(opts.t_max, cfg.wave_t);

    std::function<double(double)> psi;
    if (cfg.kernel_symbol == "heat") {
        const double t = cfg.wave_t;
        psi = [t](double l) { return std::exp(-t * l * l); };
    } else {
        const WaveKind kind =
            cfg.kernel_symbol == "wave-cosine" ? WaveKind::cosine : WaveKind::sinc;
        psi = wave_symbol(kind, cfg.wave_t, cfg.wave_alpha);
    }
    const KernelReport rep = kernel_kappa(d, psi, opts);

    CsvTable t;
    t.header = {"r", "re", "im"};
    for (std::size_t j = 0; j < rep.kappa.r_grid.size(); ++j)
        t.rows.push_back({format_double(rep.kappa.r_grid[j]),
                          format_double(rep.kappa.values[j].real()),
                          format_double(rep.kappa.values[j].imag())});
    json data;
    data["kernel"] = radial_samples_to_json(rep.kappa);
    data["weighted_l1"] = rep.weighted_l1;
    data["taper_sensitivity"] = rep.taper_sensitivity;
    emit(cfg, "kernel", t, std::move(data));
    return 0;
}

WaveSolutionReport run_wave_report(const RunConfig& cfg) {
    const SpaceDims d = space_from_json(cfg.space).dims();
    TransformOptions opts = cfg.grid;
    opts.t_max = std::max(opts.t_max, cfg.wave_t_hi);
    const TransformPlan plan = build_transform_plan(d, opts);
    const double w = cfg.data_width;
    const RadialSamples f = radial_samples_from(
        plan, [w](double r) { return std::exp(-r * r / (2.0 * w * w)); });
    std::vector<double> ts;
    for (int i = 0; i < cfg.wave_t_count; ++i)
        ts.push_back(cfg.wave_t_lo * std::pow(cfg.wave_t_hi / cfg.wave_t_lo,
                                              double(i) / (cfg.wave_t_count - 1)));
    return wave_lp_growth_report(plan, f, cfg.wave_p, cfg.wave_alpha, ts);
}

int cmd_wave_norms(const RunConfig& cfg) {
    const WaveSolutionReport rep = run_wave_report(cfg);
    CsvTable t;
    t.header = {"t", "norm"};
    for (std::size_t i = 0; i < rep.t_values.size(); ++i)
        t.rows.push_back({format_double(rep.t_values[i]), format_double(rep.norms[i])});
    emit(cfg, "wave-norms", t, wave_report_to_json(rep));
    return 0;
}

int cmd_exponent_fit(const RunConfig& cfg) {
    const WaveSolutionReport rep = run_wave_report(cfg);
    emit(cfg, "exponent-fit", wave_report_to_csv(rep), wave_report_to_json(rep));
    return 0;
}

int cmd_atoms(const RunConfig& cfg) {
    const SpaceDims d = space_from_json(cfg.space).dims();
    const TransformPlan plan = build_transform_plan(d, cfg.grid);
    const double radii[] = {1.0, 0.7, 0.55, 0.4};

    CsvTable t;
    t.header = {"atom", "radius", "kind", "cancellation", "size", "l1"};
    json data = json::array();
    for (int j = 0; j < cfg.atom_count; ++j) {
        const double radius = radii[j % 4];
        const Atom atom = make_twisted_atom(plan, radius, AtomKind::standard,
                                            cfg.seed + static_cast<std::uint64_t>(j));
        const double cancel = atom_cancellation(plan, atom);
        const double size = lp_norm_twisted(plan, atom.profile, 2.0) *
                            std::sqrt(ball_volume(plan.dims, radius));
        const double l1 = twisted_l1_norm(plan, atom.profile);
        t.rows.push_back({std::to_string(j), format_double(radius), "standard",
                          format_double(cancel), format_double(size),
                          format_double(l1)});
        data.push_back({{"atom", j},
                        {"radius", radius},
                        {"kind", "standard"},
                        {"cancellation", cancel},
                        {"size", size},
                        {"l1", l1}});
    }
    emit(cfg, "atoms", t, std::move(data));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spherical analysis of Damek-Ricci spaces"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string space_flag, config_flag, out_flag, format_flag;
    std::uint64_t seed_flag = 0;
    const auto* space_opt =
        app.add_option("--space", space_flag,
                       "space shorthand, e.g. heisenberg or quaternionic:k=2");
    const auto* config_opt = app.add_option("--config", config_flag, "JSON config file");
    const auto* seed_opt = app.add_option("--seed", seed_flag, "Monte Carlo seed");
    const auto* out_opt = app.add_option("--out", out_flag, "output path (default stdout)");
    const auto* format_opt =
        app.add_option("--format", format_flag, "output format: csv or json");

    auto* validate = app.add_subcommand("validate", "run validation suites");
    std::vector<std::string> suite_flags;
    validate->add_option("--suite", suite_flags,
                         "suite name (repeatable); 'none' selects nothing");
    auto* phi = app.add_subcommand("phi", "tabulate spherical function profiles");
    auto* cfun = app.add_subcommand("cfun", "tabulate |c| and the Plancherel density");
    auto* kernel = app.add_subcommand("kernel", "tabulate a multiplier kernel");
    auto* wave_norms =
        app.add_subcommand("wave-norms", "twisted Lp norms of a wave solution over time");
    auto* exponent_fit =
        app.add_subcommand("exponent-fit", "growth exponent fit for wave norms");
    auto* atoms = app.add_subcommand("atoms", "generate atoms and their diagnostics");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        RunConfig cfg;
        if (config_opt->count()) cfg = run_config_from_json(load_config(config_flag));
        if (space_opt->count()) {
            cfg.space = space_shorthand_to_json(space_flag);
            space_from_json(cfg.space);
        }
        if (seed_opt->count()) cfg.seed = seed_flag;
        if (out_opt->count()) cfg.out = out_flag;
        if (format_opt->count()) {
            require(format_flag == "csv" || format_flag == "json",
                    "format must be 'csv' or 'json'");
            cfg.format = format_flag;
        }

        if (validate->parsed()) return cmd_validate(cfg, suite_flags);
        if (phi->parsed()) return cmd_phi(cfg);
        if (cfun->parsed()) return cmd_cfun(cfg);
        if (kernel->parsed()) return cmd_kernel(cfg);
        if (wave_norms->parsed()) return cmd_wave_norms(cfg);
        if (exponent_fit->parsed()) return cmd_exponent_fit(cfg);
        if (atoms->parsed()) return cmd_atoms(cfg);
        return 2;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
