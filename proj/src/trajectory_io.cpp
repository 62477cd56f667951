#include "dunesim/trajectory_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace dunesim {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string snapshot_file_name(std::size_t index) { return fmt::format("snapshot_{:05d}.csv", index); }

std::string snapshot_csv(const HeightField& u, const MultiplierField& m) {
    const Grid& g = u.grid;
    const bool two_d = g.dim() == 2;
    std::string out = two_d ? "x,y,u,m\n" : "x,u,m\n";
    const int j0 = two_d ? -1 : 0;
    for (int j = j0; j < g.ny(); ++j) {
        for (int i = -1; i < g.nx(); ++i) {
            const double x = (i + 1) * g.dx();
            const double val = u.at(i, j);
            const double mv = m.values.empty() ? 0.0 : m.values[g.edge_index(i, j)];
            if (two_d) {
                out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", x, (j + 1) * g.dy(), val, mv);
            } else {
                out += fmt::format("{:.17g},{:.17g},{:.17g}\n", x, val, mv);
            }
        }
    }
    return out;
}

namespace {

double parse_cell(const std::string& s, const std::string& origin, int line) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw std::runtime_error(fmt::format("{}:{}: bad number '{}'", origin, line, s));
    }
    return v;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    out << text;
    if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", path.string()));
}

const char* norm_name(GradientNorm n) { return n == GradientNorm::anisotropic ? "anisotropic" : "isotropic"; }

}  // namespace

Snapshot parse_snapshot_csv(const std::string& text, const Grid& grid, const std::string& origin) {
    const bool two_d = grid.dim() == 2;
    const std::size_t ncol = two_d ? 4 : 3;
    Snapshot s{0.0, HeightField(grid), MultiplierField(grid)};
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1) {
            const std::string want = two_d ? "x,y,u,m" : "x,u,m";
            if (line != want) throw std::runtime_error(fmt::format("{}: expected header '{}', got '{}'", origin, want, line));
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != ncol) {
            throw std::runtime_error(fmt::format("{}:{}: expected {} columns, got {}", origin, line_no, ncol, cells.size()));
        }
        if (row >= grid.edge_size()) throw std::runtime_error(fmt::format("{}:{}: too many rows", origin, line_no));
        const int i = static_cast<int>(row % grid.edge_nx()) - 1;
        const int j = static_cast<int>(row / grid.edge_nx()) - (two_d ? 1 : 0);
        const double u = parse_cell(cells[ncol - 2], origin, line_no);
        s.m.values[grid.edge_index(i, j)] = parse_cell(cells[ncol - 1], origin, line_no);
        if (i >= 0 && j >= 0) s.u(i, j) = u;
        ++row;
    }
    if (row != grid.edge_size()) {
        throw std::runtime_error(fmt::format("{}: expected {} rows, got {}", origin, grid.edge_size(), row));
    }
    return s;
}

void write_trajectory(const Trajectory& traj, const fs::path& dir, const RunConfig* config) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

    const Grid& g = traj.grid;
    json manifest;
    manifest["format"] = "dunesim-trajectory-1";
    manifest["grid"] = {{"dim", g.dim()},
                        {"extent_x", g.extent_x()},
                        {"extent_y", g.dim() == 2 ? g.extent_y() : 0.0},
                        {"count_x", g.nx()},
                        {"count_y", g.ny()},
                        {"norm", norm_name(g.norm())}};
    RunConfig cfg = config ? *config : config_from_model(traj.params, g);
    if (traj.params.source.kind == SourceSpec::Kind::tabulated && cfg.source_file.empty()) cfg.source_file = "embedded";
    json sections = json::object();
    for (const auto& [section, keys] : config_entries(cfg)) {
        json& target = section.empty() ? sections["top"] : sections[section];
        for (const auto& [k, v] : keys) target[k] = v;
    }
    manifest["config"] = sections;
    if (traj.params.source.kind == SourceSpec::Kind::tabulated) {
        json frames = json::array();
        for (const auto& f : traj.params.source.frames) frames.push_back({{"start_time", f.start_time}, {"values", f.values}});
        manifest["source_frames"] = frames;
    }

    json times = json::array();
    json files = json::array();
    for (std::size_t n = 0; n < traj.snapshots.size(); ++n) {
        times.push_back(traj.snapshots[n].t);
        files.push_back(snapshot_file_name(n));
    }
    manifest["times"] = times;
    manifest["snapshots"] = files;

    json steps = json::array();
    for (const StepDiagnostics& d : traj.steps) {
        steps.push_back({{"t", d.t},
                         {"dt", d.dt},
                         {"mass", d.mass},
                         {"max_slope", d.max_slope},
                         {"crest_x", d.crest_x},
                         {"projection_iterations", d.projection_iterations},
                         {"primal_dual_gap", d.primal_dual_gap},
                         {"constraint_violation", d.constraint_violation},
                         {"cfl_number", d.cfl_number},
                         {"picard_sweeps", d.picard_sweeps},
                         {"source_mass", d.source_mass},
                         {"transport_outflow", d.transport_outflow},
                         {"avalanche_change", d.avalanche_change},
                         {"converged", d.converged}});
    }
    manifest["diagnostics"] = steps;
    manifest["warnings"] = traj.warnings;
    manifest["failed"] = traj.failed;
    manifest["failure"] = traj.failure;

    for (std::size_t n = 0; n < traj.snapshots.size(); ++n) {
        write_file(dir / snapshot_file_name(n), snapshot_csv(traj.snapshots[n].u, traj.snapshots[n].m));
    }
    // nlohmann prints doubles with enough digits to round-trip.
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

Trajectory read_trajectory(const fs::path& dir, RunConfig* config) {
    const fs::path mpath = dir / "manifest.json";
    json manifest;
    try {
        manifest = json::parse(read_file(mpath));
    } catch (const json::parse_error& e) {
        throw std::runtime_error(fmt::format("{}: {}", mpath.string(), e.what()));
    }
    try {
        const json& gj = manifest.at("grid");
        const int dim = gj.at("dim").get<int>();
        const Grid grid = Grid::make(dim, {gj.at("extent_x").get<double>(), gj.at("extent_y").get<double>()},
                                     {gj.at("count_x").get<int>(), gj.at("count_y").get<int>()},
                                     gj.at("norm").get<std::string>() == "anisotropic" ? GradientNorm::anisotropic
                                                                                      : GradientNorm::isotropic);
        std::string text;
        for (const auto& [section, keys] : manifest.at("config").items()) {
            if (section != "top") text += fmt::format("[{}]\n", section);
            for (const auto& [k, v] : keys.items()) {
                const std::string value = v.get<std::string>();
                if (!value.empty()) text += fmt::format("{} = {}\n", k, value);
            }
        }
        // File references are irrelevant once the data is loaded.
        ParseResult parsed = parse_config(text, dir.string());
        if (!parsed.ok()) {
            std::string msg;
            for (const auto& e : parsed.errors) msg += "\n  " + to_string(e);
            throw std::runtime_error(fmt::format("{}: embedded config is invalid:{}", mpath.string(), msg));
        }
        if (config) *config = *parsed.config;
        Trajectory traj;
        traj.grid = grid;
        traj.params = parsed.config->model;
        if (manifest.contains("source_frames")) {
            for (const json& f : manifest["source_frames"]) {
                traj.params.source.frames.push_back({f.at("start_time").get<double>(), f.at("values").get<std::vector<double>>()});
            }
        }
        const auto times = manifest.at("times").get<std::vector<double>>();
        const auto files = manifest.at("snapshots").get<std::vector<std::string>>();
        if (times.size() != files.size()) throw std::runtime_error(fmt::format("{}: times/snapshots length mismatch", mpath.string()));
        for (std::size_t n = 0; n < files.size(); ++n) {
            const fs::path p = dir / files[n];
            Snapshot s = parse_snapshot_csv(read_file(p), grid, p.string());
            s.t = times[n];
            traj.snapshots.push_back(std::move(s));
        }
        for (const json& d : manifest.at("diagnostics")) {
            StepDiagnostics s;
            s.t = d.at("t").get<double>();
            s.dt = d.at("dt").get<double>();
            s.mass = d.at("mass").get<double>();
            s.max_slope = d.at("max_slope").get<double>();
            s.crest_x = d.at("crest_x").get<double>();
            s.projection_iterations = d.at("projection_iterations").get<int>();
            s.primal_dual_gap = d.at("primal_dual_gap").get<double>();
            s.constraint_violation = d.at("constraint_violation").get<double>();
            s.cfl_number = d.at("cfl_number").get<double>();
            s.picard_sweeps = d.at("picard_sweeps").get<int>();
            s.source_mass = d.at("source_mass").get<double>();
            s.transport_outflow = d.at("transport_outflow").get<double>();
            s.avalanche_change = d.at("avalanche_change").get<double>();
            s.converged = d.at("converged").get<bool>();
            traj.steps.push_back(s);
        }
        traj.warnings = manifest.at("warnings").get<std::vector<std::string>>();
        traj.failed = manifest.at("failed").get<bool>();
        traj.failure = manifest.at("failure").get<std::string>();
        return traj;
    } catch (const json::exception& e) {
        throw std::runtime_error(fmt::format("{}: {}", mpath.string(), e.what()));
    }
}

}  // namespace dunesim
