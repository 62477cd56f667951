#include "dunesim/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "dunesim/errors.hpp"
#include "dunesim/render.hpp"
#include "dunesim/trajectory_io.hpp"
#include "dunesim/verify.hpp"

namespace dunesim {

namespace fs = std::filesystem;

namespace {

// Error with the category used in the "error[<category>]:" prefix and an exit code.
struct CliError : std::runtime_error {
    CliError(std::string cat, int code, const std::string& msg) : std::runtime_error(msg), category(std::move(cat)), exit_code(code) {}
    std::string category;
    int exit_code;
};

std::string read_text(const fs::path& path, const std::string& category) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError(category, kExitValidation, fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig parse_or_throw(const std::string& text, const std::string& origin, const std::string& base_dir) {
    ParseResult r = parse_config(text, base_dir);
    if (!r.ok()) {
        std::string msg = fmt::format("{}: {} error(s)", origin, r.errors.size());
        for (const auto& e : r.errors) msg += fmt::format("\n  {}:{}", origin, to_string(e));
        throw CliError("config", kExitValidation, msg);
    }
    return *r.config;
}

RunConfig load_config(const std::string& path) {
    const std::string text = read_text(path, "io");
    const fs::path parent = fs::path(path).parent_path();
    return parse_or_throw(text, path, parent.empty() ? "." : parent.string());
}

// Re-parses the config with some "section.key" entries replaced, so overrides get the same validation.
RunConfig with_overrides(const RunConfig& base, const std::vector<std::pair<std::string, std::string>>& overrides) {
    auto entries = config_entries(base);
    for (const auto& [name, value] : overrides) {
        const auto dot = name.find('.');
        const std::string section = dot == std::string::npos ? "" : name.substr(0, dot);
        const std::string key = dot == std::string::npos ? name : name.substr(dot + 1);
        const auto& valid = valid_config_keys();
        if (std::find(valid.begin(), valid.end(), name) == valid.end()) {
            std::string best;
            std::size_t best_d = std::string::npos;
            for (const auto& v : valid) {
                const std::size_t d = edit_distance(name, v);
                if (d < best_d) {
                    best_d = d;
                    best = v;
                }
            }
            throw CliError("usage", kExitValidation, fmt::format("unknown key '{}'; did you mean '{}'?", name, best));
        }
        entries[section][key] = value;
    }
    std::string text;
    for (const auto& [section, keys] : entries) {
        if (!section.empty()) text += fmt::format("[{}]\n", section);
        for (const auto& [k, v] : keys) {
            if (!v.empty()) text += fmt::format("{} = {}\n", k, v);
        }
    }
    return parse_or_throw(text, "override", base.base_dir);
}

struct CommonFlags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool strict = false;
    bool lenient = false;
    std::optional<int> snapshot_every;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool need_config) {
    auto* c = cmd->add_option("--config", f.config, "run configuration file");
    if (need_config) c->required();
    cmd->add_option("--out", f.out, "output directory (overrides config and $" + std::string(kOutDirEnv) + ")");
    cmd->add_option("--seed", f.seed, "rng seed");
    auto* s = cmd->add_flag("--strict", f.strict, "abort on non-converged projections");
    auto* l = cmd->add_flag("--lenient", f.lenient, "record non-converged projections and continue");
    s->excludes(l);
    cmd->add_option("--snapshot-every", f.snapshot_every, "snapshot cadence in steps")->check(CLI::PositiveNumber);
}

void apply_common(RunConfig& cfg, const CommonFlags& f) {
    if (const char* env = std::getenv(kOutDirEnv); env && *env) cfg.output_dir = env;
    if (!f.out.empty()) cfg.output_dir = f.out;
    if (f.seed) cfg.seed = *f.seed;
    if (f.strict) cfg.model.solver.strict = true;
    if (f.lenient) cfg.model.solver.strict = false;
    if (f.snapshot_every) cfg.snapshot_every = *f.snapshot_every;
}

PreparedRun prepare_or_throw(const RunConfig& cfg) {
    try {
        return prepare_run(cfg);
    } catch (const std::invalid_argument& e) {
        throw CliError("config", kExitValidation, e.what());
    } catch (const std::runtime_error& e) {
        throw CliError("io", kExitValidation, e.what());
    }
}

std::string checks_json(const std::vector<CheckResult>& checks) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        j.push_back({{"check", c.name}, {"value", c.value}, {"tol", c.tol}, {"pass", c.pass}, {"note", c.note}});
    }
    return j.dump(2) + "\n";
}

void print_checks(const std::vector<CheckResult>& checks, std::ostream& out) {
    for (const auto& c : checks) {
        out << fmt::format("check {} {} value={:.6e} tol={:.6e}{}\n", c.name, c.pass ? "pass" : "FAIL", c.value, c.tol,
                           c.note.empty() ? "" : " (" + c.note + ")");
    }
}

bool all_pass(const std::vector<CheckResult>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream o(path, std::ios::binary);
    if (!o || !(o << text)) throw CliError("io", kExitValidation, fmt::format("cannot write '{}'", path.string()));
}

// Runs one config to completion and writes it; returns the exit code.
int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    PreparedRun prep = prepare_or_throw(cfg);
    Trajectory traj;
    try {
        traj = run(prep.params, prep.u0, cfg.snapshot_every);
    } catch (const std::invalid_argument& e) {
        throw CliError("config", kExitValidation, e.what());
    } catch (const NumericalError& e) {
        throw CliError("numerical", kExitNumerical, e.what());
    }
    try {
        write_trajectory(traj, cfg.output_dir, &cfg);
    } catch (const std::runtime_error& e) {
        throw CliError("io", kExitValidation, e.what());
    }
    for (const auto& w : traj.warnings) err << "warning[run]: " << w << "\n";
    out << fmt::format("run: {} steps, {} snapshots, t = {:.6g}, output '{}'\n", traj.steps.size(), traj.snapshots.size(),
                       traj.snapshots.empty() ? 0.0 : traj.snapshots.back().t, cfg.output_dir);
    int code = kExitOk;
    if (traj.failed) {
        err << "error[numerical]: " << traj.failure << "\n";
        code = kExitNumerical;
    }
    if (cfg.verify.enabled) {
        const auto checks = verify_suite(traj, cfg);
        print_checks(checks, out);
        write_text(fs::path(cfg.output_dir) / "verify_report.json", checks_json(checks));
        if (!all_pass(checks) && code == kExitOk) {
            err << "error[verify]: verification checks failed\n";
            code = kExitNumerical;
        }
    }
    return code;
}

int cmd_run(const CommonFlags& f, std::ostream& out, std::ostream& err) {
    RunConfig cfg = load_config(f.config);
    apply_common(cfg, f);
    return execute(cfg, out, err);
}

int cmd_project(const CommonFlags& f, const std::string& input, std::ostream& out, std::ostream& err) {
    RunConfig cfg = load_config(f.config);
    apply_common(cfg, f);
    cfg.initial.preset = InitialSpec::Preset::file;
    cfg.initial.file = fs::absolute(input).string();
    PreparedRun prep = prepare_or_throw(cfg);
    ProjectionOptions opts;
    opts.tol = cfg.model.solver.tol;
    opts.max_iter = cfg.model.solver.max_iter;
    const ProjectionResult r = project_pdhg(prep.u0, prep.params.lambda, opts);
    fs::path target = f.out.empty() ? fs::path("projected.csv") : fs::path(f.out);
    if (!target.has_extension()) {
        fs::create_directories(target);
        target /= "projected.csv";
    }
    write_text(target, snapshot_csv(r.u, r.m));
    out << fmt::format("project: {} iterations, gap {:.3e}, violation {:.3e}, output '{}'\n", r.iterations,
                       r.primal_dual_gap, r.constraint_violation, target.string());
    if (!r.converged) {
        err << "error[numerical]: projection did not converge within " << opts.max_iter << " iterations\n";
        return cfg.model.solver.strict ? kExitNumerical : kExitOk;
    }
    return kExitOk;
}

Trajectory load_trajectory(const std::string& dir, RunConfig& cfg) {
    try {
        return read_trajectory(dir, &cfg);
    } catch (const std::runtime_error& e) {
        throw CliError("io", kExitValidation, e.what());
    }
}

int cmd_verify(const std::string& dir, const CommonFlags& f, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    const Trajectory traj = load_trajectory(dir, cfg);
    if (f.seed) cfg.seed = *f.seed;
    const auto checks = verify_suite(traj, cfg);
    print_checks(checks, out);
    const fs::path report = f.out.empty() ? fs::path(dir) / "verify_report.json" : fs::path(f.out);
    write_text(report, checks_json(checks));
    if (!all_pass(checks)) {
        err << "error[verify]: verification checks failed\n";
        return kExitNumerical;
    }
    return kExitOk;
}

int cmd_render(const std::string& dir, const std::string& out_dir, std::ostream& out) {
    RunConfig cfg;
    const Trajectory traj = load_trajectory(dir, cfg);
    const fs::path target = out_dir.empty() ? fs::path(dir) / "images" : fs::path(out_dir);
    fs::create_directories(target);
    const char* ext = traj.grid.dim() == 2 ? "pgm" : "svg";
    for (std::size_t n = 0; n < traj.snapshots.size(); ++n) {
        const fs::path p = target / fmt::format("snapshot_{:05d}.{}", n, ext);
        try {
            render_heightmap(traj.snapshots[n].u, traj.params.lambda, p);
        } catch (const std::runtime_error& e) {
            throw CliError("io", kExitValidation, e.what());
        }
    }
    out << fmt::format("render: {} images in '{}'\n", traj.snapshots.size(), target.string());
    return kExitOk;
}

struct Axis {
    std::string key;
    std::vector<std::string> values;
};

Axis parse_axis(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
        throw CliError("usage", kExitValidation, fmt::format("--vary expects section.key=v1,v2,..., got '{}'", spec));
    }
    Axis a{spec.substr(0, eq), {}};
    std::stringstream ss(spec.substr(eq + 1));
    std::string v;
    while (std::getline(ss, v, ',')) {
        if (v.empty()) throw CliError("usage", kExitValidation, fmt::format("empty value in --vary '{}'", spec));
        a.values.push_back(v);
    }
    return a;
}

int cmd_sweep(const CommonFlags& f, const std::vector<std::string>& vary, int jobs, std::ostream& out, std::ostream& err) {
    RunConfig base = load_config(f.config);
    apply_common(base, f);
    std::vector<Axis> axes;
    for (const auto& s : vary) axes.push_back(parse_axis(s));
    if (axes.empty()) throw CliError("usage", kExitValidation, "sweep needs at least one --vary");

    // Cartesian product, first axis slowest.
    std::vector<std::vector<std::pair<std::string, std::string>>> combos{{}};
    for (const Axis& a : axes) {
        std::vector<std::vector<std::pair<std::string, std::string>>> next;
        for (const auto& c : combos) {
            for (const auto& v : a.values) {
                auto e = c;
                e.emplace_back(a.key, v);
                next.push_back(std::move(e));
            }
        }
        combos = std::move(next);
    }

    struct Job {
        RunConfig cfg;
        std::string label;
    };
    std::vector<Job> work;
    for (std::size_t n = 0; n < combos.size(); ++n) {
        Job j{with_overrides(base, combos[n]), fmt::format("run_{:03d}", n)};
        for (const auto& [k, v] : combos[n]) j.label += fmt::format("_{}={}", k.substr(k.find('.') + 1), v);
        j.cfg.output_dir = (fs::path(base.output_dir) / j.label).string();
        prepare_or_throw(j.cfg);  // validate everything before starting
        work.push_back(std::move(j));
    }

    std::vector<int> codes(work.size(), kExitOk);
    std::vector<std::string> logs(work.size()), errs(work.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t n = next++; n < work.size(); n = next++) {
            std::ostringstream o, e;
            try {
                codes[n] = execute(work[n].cfg, o, e);
            } catch (const CliError& ex) {
                e << "error[" << ex.category << "]: " << ex.what() << "\n";
                codes[n] = ex.exit_code;
            } catch (const std::exception& ex) {
                e << "error[internal]: " << ex.what() << "\n";
                codes[n] = kExitNumerical;
            }
            logs[n] = o.str();
            errs[n] = e.str();
        }
    };
    const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(work.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    int code = kExitOk;
    for (std::size_t n = 0; n < work.size(); ++n) {
        out << work[n].label << ": " << logs[n];
        err << errs[n];
        code = std::max(code, codes[n]);
    }
    return code;
}

}  // namespace

std::vector<CheckResult> verify_suite(const Trajectory& traj, const RunConfig& config) {
    std::vector<CheckResult> checks;
    const double lambda = traj.params.lambda;

    double worst = 0.0;
    for (const Snapshot& s : traj.snapshots) worst = std::max(worst, constraint_violation(s.u, lambda));
    checks.push_back({"admissible", worst, kTolConstraint, worst <= kTolConstraint, ""});

    bool increasing = true;
    for (std::size_t n = 1; n < traj.snapshots.size(); ++n) increasing &= traj.snapshots[n].t > traj.snapshots[n - 1].t;
    checks.push_back({"times_increasing", increasing ? 0.0 : 1.0, 0.0, increasing, ""});

    const ComplementarityReport comp = complementarity_report(traj, config.verify.comp_tol);
    checks.push_back({"complementarity", comp.worst, comp.tol, comp.pass, ""});

    if (traj.snapshots.size() < 2) {
        checks.push_back({"vi_residual", 0.0, 0.0, true, "single snapshot"});
        return checks;
    }
    if (traj.snapshots.size() != traj.steps.size() + 1) {
        checks.push_back({"vi_residual", 0.0, 0.0, false, "needs snapshot_every = 1"});
        return checks;
    }
    double dt = 0.0;
    for (const auto& d : traj.steps) dt = std::max(dt, d.dt);
    const double tol = config.verify.vi_constant * (dt + traj.grid.dx()) + 1e-10;
    const TestFunctionSet tests = make_test_functions(traj.grid, lambda, config.verify.test_functions, config.seed);
    const VIReport vi = vi_report(traj, tests, tol);
    checks.push_back({"vi_residual", vi.worst, tol, vi.pass, fmt::format("{} pairings", vi.records.size())});
    return checks;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"dunesim: constrained sand transport simulator"};
    app.require_subcommand(1);

    CommonFlags run_f, proj_f, ver_f, sweep_f;
    std::string proj_input, ver_dir, render_dir, render_out;
    std::vector<std::string> vary;
    int jobs = 1;

    auto* run_cmd = app.add_subcommand("run", "run a configuration and write its trajectory");
    add_common(run_cmd, run_f, true);

    auto* proj_cmd = app.add_subcommand("project", "project a CSV field onto the admissible set");
    add_common(proj_cmd, proj_f, true);
    proj_cmd->add_option("--input", proj_input, "CSV with columns x[,y],u")->required();

    auto* ver_cmd = app.add_subcommand("verify", "run the verification suite on a stored trajectory");
    ver_cmd->add_option("dir", ver_dir, "trajectory directory")->required();
    ver_cmd->add_option("--out", ver_f.out, "report path");
    ver_cmd->add_option("--seed", ver_f.seed, "test function seed");

    auto* sweep_cmd = app.add_subcommand("sweep", "run a cartesian parameter grid");
    add_common(sweep_cmd, sweep_f, true);
    sweep_cmd->add_option("--vary", vary, "section.key=v1,v2,...")->required();
    sweep_cmd->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);

    auto* render_cmd = app.add_subcommand("render", "render stored snapshots (SVG in 1D, PGM in 2D)");
    render_cmd->add_option("dir", render_dir, "trajectory directory")->required();
    render_cmd->add_option("--out", render_out, "image directory");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error[usage]: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        if (*run_cmd) return cmd_run(run_f, out, err);
        if (*proj_cmd) return cmd_project(proj_f, proj_input, out, err);
        if (*ver_cmd) return cmd_verify(ver_dir, ver_f, out, err);
        if (*sweep_cmd) return cmd_sweep(sweep_f, vary, jobs, out, err);
        if (*render_cmd) return cmd_render(render_dir, render_out, out);
    } catch (const CliError& e) {
        err << "error[" << e.category << "]: " << e.what() << "\n";
        return e.exit_code;
    } catch (const NumericalError& e) {
        err << "error[numerical]: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "error[config]: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error[io]: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cli_main(args, std::cout, std::cerr);
}

}  // namespace dunesim
