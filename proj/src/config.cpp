#include "dunesim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace dunesim {

std::string to_string(const ConfigError& e) {
    if (e.line > 0) return fmt::format("line {}:{}: {}", e.line, e.column, e.message);
    return e.message;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

namespace {

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

std::optional<double> parse_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

template <typename Int>
std::optional<Int> parse_int(const std::string& s) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<bool> parse_bool(const std::string& s) {
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    return std::nullopt;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Intermediate values that only become domain objects once every key is read.
struct Draft {
    RunConfig cfg;
    std::string h_kind = "zero";
    double h_epsilon = 0.05;
    double h_constant = 1.0;
    std::string gamma_kind = "identity";
    double gamma_a = 1.0;
    double gamma_b = 1.0;
    std::string source_kind = "zero";
};

using Setter = std::function<std::optional<std::string>(Draft&, const std::string&)>;
using Getter = std::function<std::string(const Draft&)>;

struct KeyDef {
    std::string section;
    std::string key;
    Setter set;
    Getter get;
};

Setter real(double Draft::*field, std::function<bool(double)> ok, std::string range) {
    return [field, ok, range](Draft& d, const std::string& v) -> std::optional<std::string> {
        const auto x = parse_double(v);
        if (!x) return fmt::format("expected a number, got '{}'", v);
        if (!ok(*x)) return fmt::format("must be {} (got {})", range, v);
        d.*field = *x;
        return std::nullopt;
    };
}

template <typename Fn>
Setter real_into(Fn assign, std::function<bool(double)> ok, std::string range) {
    return [assign, ok, range](Draft& d, const std::string& v) -> std::optional<std::string> {
        const auto x = parse_double(v);
        if (!x) return fmt::format("expected a number, got '{}'", v);
        if (!ok(*x)) return fmt::format("must be {} (got {})", range, v);
        assign(d, *x);
        return std::nullopt;
    };
}

template <typename Fn>
Setter int_into(Fn assign, int min_value) {
    return [assign, min_value](Draft& d, const std::string& v) -> std::optional<std::string> {
        const auto x = parse_int<long long>(v);
        if (!x) return fmt::format("expected an integer, got '{}'", v);
        if (*x < min_value || *x > 100000000LL) return fmt::format("must be >= {} (got {})", min_value, v);
        assign(d, static_cast<int>(*x));
        return std::nullopt;
    };
}

template <typename Fn>
Setter bool_into(Fn assign) {
    return [assign](Draft& d, const std::string& v) -> std::optional<std::string> {
        const auto x = parse_bool(v);
        if (!x) return fmt::format("expected true or false, got '{}'", v);
        assign(d, *x);
        return std::nullopt;
    };
}

template <typename Fn>
Setter choice_into(Fn assign, std::vector<std::string> options) {
    return [assign, options](Draft& d, const std::string& v) -> std::optional<std::string> {
        if (std::find(options.begin(), options.end(), v) == options.end()) {
            std::string list;
            for (const auto& o : options) list += (list.empty() ? "" : ", ") + o;
            return fmt::format("must be one of {{{}}} (got '{}')", list, v);
        }
        assign(d, v);
        return std::nullopt;
    };
}

auto positive = [](double x) { return x > 0.0; };
auto nonnegative = [](double x) { return x >= 0.0; };
auto any_real = [](double) { return true; };

const std::vector<KeyDef>& schema() {
    static const std::vector<KeyDef> defs = [] {
        std::vector<KeyDef> k;
        // top level
        k.push_back({"", "seed",
                     [](Draft& d, const std::string& v) -> std::optional<std::string> {
                         const auto x = parse_int<std::uint64_t>(v);
                         if (!x) return fmt::format("expected a non-negative integer, got '{}'", v);
                         d.cfg.seed = *x;
                         return std::nullopt;
                     },
                     [](const Draft& d) { return std::to_string(d.cfg.seed); }});
        // grid
        k.push_back({"grid", "dim",
                     [](Draft& d, const std::string& v) -> std::optional<std::string> {
                         const auto x = parse_int<int>(v);
                         if (!x) return fmt::format("expected an integer, got '{}'", v);
                         if (*x != 1 && *x != 2) return fmt::format("must be 1 or 2 (got {})", v);
                         d.cfg.grid.dim = *x;
                         return std::nullopt;
                     },
                     [](const Draft& d) { return std::to_string(d.cfg.grid.dim); }});
        k.push_back({"grid", "extent_x", real_into([](Draft& d, double x) { d.cfg.grid.extents[0] = x; }, positive, "> 0"),
                     [](const Draft& d) { return fmt_double(d.cfg.grid.extents[0]); }});
        k.push_back({"grid", "extent_y", real_into([](Draft& d, double x) { d.cfg.grid.extents[1] = x; }, positive, "> 0"),
                     [](const Draft& d) { return fmt_double(d.cfg.grid.extents[1]); }});
        k.push_back({"grid", "count_x", int_into([](Draft& d, int x) { d.cfg.grid.counts[0] = x; }, 3),
                     [](const Draft& d) { return std::to_string(d.cfg.grid.counts[0]); }});
        k.push_back({"grid", "count_y", int_into([](Draft& d, int x) { d.cfg.grid.counts[1] = x; }, 3),
                     [](const Draft& d) { return std::to_string(d.cfg.grid.counts[1]); }});
        k.push_back({"grid", "norm",
                     choice_into([](Draft& d, const std::string& v) {
                         d.cfg.grid.norm = v == "anisotropic" ? GradientNorm::anisotropic : GradientNorm::isotropic;
                     }, {"isotropic", "anisotropic"}),
                     [](const Draft& d) {
                         return std::string(d.cfg.grid.norm == GradientNorm::anisotropic ? "anisotropic" : "isotropic");
                     }});
        // model
        k.push_back({"model", "lambda", real_into([](Draft& d, double x) { d.cfg.model.lambda = x; }, positive, "> 0"),
                     [](const Draft& d) { return fmt_double(d.cfg.model.lambda); }});
        k.push_back({"model", "h_profile",
                     choice_into([](Draft& d, const std::string& v) { d.h_kind = v; },
                                 {"zero", "constant", "smooth_ramp", "erf_smoothed"}),
                     [](const Draft& d) { return d.h_kind; }});
        k.push_back({"model", "h_epsilon", real(&Draft::h_epsilon, [](double x) { return x > 0.0 && x < 1.0; }, "in (0, 1)"),
                     [](const Draft& d) { return fmt_double(d.h_epsilon); }});
        k.push_back({"model", "h_constant", real(&Draft::h_constant, nonnegative, ">= 0"),
                     [](const Draft& d) { return fmt_double(d.h_constant); }});
        k.push_back({"model", "gamma_profile",
                     choice_into([](Draft& d, const std::string& v) { d.gamma_kind = v; },
                                 {"zero", "identity", "scaled_identity", "saturating"}),
                     [](const Draft& d) { return d.gamma_kind; }});
        k.push_back({"model", "gamma_a", real(&Draft::gamma_a, nonnegative, ">= 0"),
                     [](const Draft& d) { return fmt_double(d.gamma_a); }});
        k.push_back({"model", "gamma_b", real(&Draft::gamma_b, positive, "> 0"),
                     [](const Draft& d) { return fmt_double(d.gamma_b); }});
        k.push_back({"model", "kernel",
                     choice_into([](Draft& d, const std::string& v) { d.cfg.model.kernel.profile = kernel_profile_from_string(v); },
                                 {"box", "triangle", "cosine_bump"}),
                     [](const Draft& d) { return to_string(d.cfg.model.kernel.profile); }});
        k.push_back({"model", "kernel_radius",
                     real_into([](Draft& d, double x) { d.cfg.model.kernel.radius = x; }, positive, "> 0"),
                     [](const Draft& d) { return fmt_double(d.cfg.model.kernel.radius); }});
        k.push_back({"model", "final_time",
                     real_into([](Draft& d, double x) { d.cfg.model.final_time = x; }, nonnegative, ">= 0"),
                     [](const Draft& d) { return fmt_double(d.cfg.model.final_time); }});
        k.push_back({"model", "dt",
                     [](Draft& d, const std::string& v) -> std::optional<std::string> {
                         if (v == "auto") {
                             d.cfg.model.dt.reset();
                             return std::nullopt;
                         }
                         const auto x = parse_double(v);
                         if (!x) return fmt::format("expected a number or 'auto', got '{}'", v);
                         if (!(*x > 0.0)) return fmt::format("must be > 0 (got {})", v);
                         d.cfg.model.dt = *x;
                         return std::nullopt;
                     },
                     [](const Draft& d) { return d.cfg.model.dt ? fmt_double(*d.cfg.model.dt) : std::string("auto"); }});
        k.push_back({"model", "cfl",
                     real_into([](Draft& d, double x) { d.cfg.model.cfl_number = x; },
                               [](double x) { return x > 0.0 && x <= 1.0; }, "in (0, 1]"),
                     [](const Draft& d) { return fmt_double(d.cfg.model.cfl_number); }});
        k.push_back({"model", "dt_max", real_into([](Draft& d, double x) { d.cfg.model.dt_max = x; }, positive, "> 0"),
                     [](const Draft& d) { return fmt_double(d.cfg.model.dt_max); }});
        k.push_back({"model", "picard_iters", int_into([](Draft& d, int x) { d.cfg.model.picard_iters = x; }, 1),
                     [](const Draft& d) { return std::to_string(d.cfg.model.picard_iters); }});
        k.push_back({"model", "inner_tol", real_into([](Draft& d, double x) { d.cfg.model.inner_tol = x; }, positive, "> 0"),
                     [](const Draft& d) { return fmt_double(d.cfg.model.inner_tol); }});
        // source
        k.push_back({"source", "kind",
                     choice_into([](Draft& d, const std::string& v) { d.source_kind = v; },
                                 {"zero", "constant_patch", "tabulated"}),
                     [](const Draft& d) { return d.source_kind; }});
        k.push_back({"source", "rate", real_into([](Draft& d, double x) { d.cfg.model.source.rate = x; }, any_real, "finite"),
                     [](const Draft& d) { return fmt_double(d.cfg.model.source.rate); }});
        k.push_back({"source", "x0", real_into([](Draft& d, double x) { d.cfg.model.source.x0 = x; }, any_real, "finite"),
                     [](const Draft& d) { return fmt_double(d.cfg.model.source.x0); }});
        k.push_back({"source", "x1", real_into([](Draft& d, double x) { d.cfg.model.source.x1 = x; }, any_real, "finite"),
                     [](const Draft& d) { return fmt_double(d.cfg.model.source.x1); }});
        k.push_back({"source", "y0", real_into([](Draft& d, double x) { d.cfg.model.source.y0 = x; }, any_real, "finite"),
                     [](const Draft& d) { return fmt_double(d.cfg.model.source.y0); }});
        k.push_back({"source", "y1", real_into([](Draft& d, double x) { d.cfg.model.source.y1 = x; }, any_real, "finite"),
                     [](const Draft& d) { return fmt_double(d.cfg.model.source.y1); }});
        k.push_back({"source", "file",
                     [](Draft& d, const std::string& v) -> std::optional<std::string> {
                         d.cfg.source_file = v;
                         return std::nullopt;
                     },
                     [](const Draft& d) { return d.cfg.source_file; }});
        // initial
        k.push_back({"initial", "preset",
                     choice_into([](Draft& d, const std::string& v) {
                         using P = InitialSpec::Preset;
                         d.cfg.initial.preset = v == "hump"   ? P::hump
                                                : v == "dune" ? P::dune
                                                : v == "cone" ? P::cone
                                                : v == "flat" ? P::flat
                                                              : P::file;
                     }, {"hump", "dune", "cone", "flat", "file"}),
                     [](const Draft& d) {
                         switch (d.cfg.initial.preset) {
                             case InitialSpec::Preset::hump: return std::string("hump");
                             case InitialSpec::Preset::dune: return std::string("dune");
                             case InitialSpec::Preset::cone: return std::string("cone");
                             case InitialSpec::Preset::flat: return std::string("flat");
                             case InitialSpec::Preset::file: return std::string("file");
                         }
                         return std::string("hump");
                     }});
        k.push_back({"initial", "center", real_into([](Draft& d, double x) { d.cfg.initial.center = x; }, any_real, "finite"),
                     [](const Draft& d) { return fmt_double(d.cfg.initial.center); }});
        k.push_back({"initial", "center_y", real_into([](Draft& d, double x) { d.cfg.initial.center_y = x; }, any_real, "finite"),
                     [](const Draft& d) { return fmt_double(d.cfg.initial.center_y); }});
        k.push_back({"initial", "height", real_into([](Draft& d, double x) { d.cfg.initial.height = x; }, nonnegative, ">= 0"),
                     [](const Draft& d) { return fmt_double(d.cfg.initial.height); }});
        k.push_back({"initial", "width", real_into([](Draft& d, double x) { d.cfg.initial.width = x; }, positive, "> 0"),
                     [](const Draft& d) { return fmt_double(d.cfg.initial.width); }});
        k.push_back({"initial", "lee_width", real_into([](Draft& d, double x) { d.cfg.initial.lee_width = x; }, positive, "> 0"),
                     [](const Draft& d) { return fmt_double(d.cfg.initial.lee_width.value_or(d.cfg.initial.width)); }});
        k.push_back({"initial", "scale",
                     real_into([](Draft& d, double x) { d.cfg.initial.scale = x; },
                               [](double x) { return x >= 0.0 && x <= 1.0; }, "in [0, 1]"),
                     [](const Draft& d) { return fmt_double(d.cfg.initial.scale); }});
        k.push_back({"initial", "file",
                     [](Draft& d, const std::string& v) -> std::optional<std::string> {
                         d.cfg.initial.file = v;
                         return std::nullopt;
                     },
                     [](const Draft& d) { return d.cfg.initial.file; }});
        // solver
        k.push_back({"solver", "tol", real_into([](Draft& d, double x) { d.cfg.model.solver.tol = x; }, positive, "> 0"),
                     [](const Draft& d) { return fmt_double(d.cfg.model.solver.tol); }});
        k.push_back({"solver", "max_iter", int_into([](Draft& d, int x) { d.cfg.model.solver.max_iter = x; }, 1),
                     [](const Draft& d) { return std::to_string(d.cfg.model.solver.max_iter); }});
        k.push_back({"solver", "strict", bool_into([](Draft& d, bool x) { d.cfg.model.solver.strict = x; }),
                     [](const Draft& d) { return std::string(d.cfg.model.solver.strict ? "true" : "false"); }});
        // output
        k.push_back({"output", "dir",
                     [](Draft& d, const std::string& v) -> std::optional<std::string> {
                         if (v.empty()) return std::string("must not be empty");
                         d.cfg.output_dir = v;
                         return std::nullopt;
                     },
                     [](const Draft& d) { return d.cfg.output_dir; }});
        k.push_back({"output", "snapshot_every", int_into([](Draft& d, int x) { d.cfg.snapshot_every = x; }, 1),
                     [](const Draft& d) { return std::to_string(d.cfg.snapshot_every); }});
        // verify
        k.push_back({"verify", "enabled", bool_into([](Draft& d, bool x) { d.cfg.verify.enabled = x; }),
                     [](const Draft& d) { return std::string(d.cfg.verify.enabled ? "true" : "false"); }});
        k.push_back({"verify", "test_functions", int_into([](Draft& d, int x) { d.cfg.verify.test_functions = x; }, 1),
                     [](const Draft& d) { return std::to_string(d.cfg.verify.test_functions); }});
        k.push_back({"verify", "vi_constant",
                     real_into([](Draft& d, double x) { d.cfg.verify.vi_constant = x; }, nonnegative, ">= 0"),
                     [](const Draft& d) { return fmt_double(d.cfg.verify.vi_constant); }});
        k.push_back({"verify", "comp_tol", real_into([](Draft& d, double x) { d.cfg.verify.comp_tol = x; }, positive, "> 0"),
                     [](const Draft& d) { return fmt_double(d.cfg.verify.comp_tol); }});
        return k;
    }();
    return defs;
}

std::string qualified(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
}

Draft draft_from(const RunConfig& c) {
    Draft d;
    d.cfg = c;
    d.h_kind = c.model.h.name();
    if (c.model.h.kind == HProfile::Kind::erf_smoothed) d.h_epsilon = c.model.h.param;
    if (c.model.h.kind == HProfile::Kind::constant) d.h_constant = c.model.h.param;
    d.gamma_kind = c.model.gamma.name();
    if (c.model.gamma.kind == GammaProfile::Kind::scaled_identity) d.gamma_a = c.model.gamma.a;
    if (c.model.gamma.kind == GammaProfile::Kind::saturating) {
        d.gamma_a = c.model.gamma.a;
        d.gamma_b = c.model.gamma.b;
    }
    d.source_kind = c.model.source.name();
    return d;
}

struct Location {
    int line = 0;
    int column = 0;
};

}  // namespace

const std::vector<std::string>& valid_config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const KeyDef& k : schema()) out.push_back(qualified(k.section, k.key));
        return out;
    }();
    return keys;
}

ParseResult parse_config(std::string_view text, const std::string& base_dir) {
    ParseResult result;
    Draft d;
    d.cfg.base_dir = base_dir;

    std::set<std::string> sections;
    for (const KeyDef& k : schema()) sections.insert(k.section);

    std::map<std::string, Location> seen;
    std::string section;
    bool section_valid = true;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        std::string_view body = raw;
        if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        const std::string line = trim(body);
        if (line.empty()) continue;
        const int indent = static_cast<int>(raw.find_first_not_of(" \t")) + 1;

        if (line.front() == '[') {
            if (line.back() != ']') {
                result.errors.push_back({line_no, indent, "", fmt::format("malformed section header '{}'", line)});
                section_valid = false;
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            section_valid = sections.count(section) > 0 && !section.empty();
            if (!section_valid) {
                std::string best;
                std::size_t best_d = std::string::npos;
                for (const auto& s : sections) {
                    if (s.empty()) continue;
                    const std::size_t dist = edit_distance(section, s);
                    if (dist < best_d) {
                        best_d = dist;
                        best = s;
                    }
                }
                result.errors.push_back({line_no, indent, section,
                                         fmt::format("unknown section [{}]; did you mean [{}]?", section, best)});
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            result.errors.push_back({line_no, indent, "", fmt::format("expected 'key = value', got '{}'", line)});
            continue;
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        const int value_col = static_cast<int>(raw.find('=')) + 2 +
                              static_cast<int>(raw.substr(raw.find('=') + 1).find_first_not_of(" \t"));
        if (!section_valid) continue;  // already reported

        const std::string name = qualified(section, key);
        const auto def = std::find_if(schema().begin(), schema().end(),
                                      [&](const KeyDef& k) { return k.section == section && k.key == key; });
        if (def == schema().end()) {
            std::string best;
            std::size_t best_d = std::string::npos;
            for (const KeyDef& k : schema()) {
                if (k.section != section) continue;
                const std::size_t dist = edit_distance(key, k.key);
                if (dist < best_d) {
                    best_d = dist;
                    best = k.key;
                }
            }
            const std::string where = section.empty() ? "at top level" : fmt::format("in [{}]", section);
            result.errors.push_back({line_no, indent, name,
                                     best.empty() ? fmt::format("unknown key '{}' {}", key, where)
                                                  : fmt::format("unknown key '{}' {}; did you mean '{}'?", key, where, best)});
            continue;
        }
        if (seen.count(name)) {
            result.errors.push_back({line_no, indent, name,
                                     fmt::format("duplicate key '{}' (first set on line {})", name, seen[name].line)});
            continue;
        }
        seen[name] = {line_no, value_col};
        if (auto err = def->set(d, value)) {
            result.errors.push_back({line_no, value_col, name, fmt::format("{}: {}", name, *err)});
        }
    }

    auto loc = [&](const std::string& name) { return seen.count(name) ? seen[name] : Location{}; };
    auto cross = [&](const std::string& name, std::string message) {
        const Location l = loc(name);
        result.errors.push_back({l.line, l.column, name, fmt::format("{}: {}", name, message)});
    };

    RunConfig& c = d.cfg;
    if (c.grid.dim == 2 && !seen.count("grid.count_y")) c.grid.counts[1] = c.grid.counts[0];
    if (c.grid.dim == 2 && !seen.count("grid.extent_y")) c.grid.extents[1] = c.grid.extents[0];

    try {
        if (d.h_kind == "zero") c.model.h = HProfile::zero();
        else if (d.h_kind == "constant") c.model.h = HProfile::constant(d.h_constant);
        else if (d.h_kind == "smooth_ramp") c.model.h = HProfile::smooth_ramp();
        else c.model.h = HProfile::erf_smoothed(d.h_epsilon);
    } catch (const std::invalid_argument& e) {
        cross("model.h_profile", e.what());
    }
    try {
        if (d.gamma_kind == "zero") c.model.gamma = GammaProfile::zero();
        else if (d.gamma_kind == "identity") c.model.gamma = GammaProfile::identity();
        else if (d.gamma_kind == "scaled_identity") c.model.gamma = GammaProfile::scaled_identity(d.gamma_a);
        else c.model.gamma = GammaProfile::saturating(d.gamma_a, d.gamma_b);
    } catch (const std::invalid_argument& e) {
        cross("model.gamma_profile", e.what());
    }
    if (d.source_kind == "zero") c.model.source.kind = SourceSpec::Kind::zero;
    else if (d.source_kind == "constant_patch") c.model.source.kind = SourceSpec::Kind::constant_patch;
    else c.model.source.kind = SourceSpec::Kind::tabulated;

    const double dx = c.grid.extents[0] / (c.grid.counts[0] + 1);
    if (transport_active(c.model) && c.model.kernel.radius < dx * (1.0 - 1e-12)) {
        cross("model.kernel_radius", fmt::format("must be >= grid spacing {} (got {})", fmt_double(dx),
                                                 fmt_double(c.model.kernel.radius)));
    }
    if (c.model.source.kind == SourceSpec::Kind::constant_patch && c.model.source.x0 > c.model.source.x1) {
        cross("source.x1", "must be >= source.x0");
    }
    if (c.model.source.kind == SourceSpec::Kind::constant_patch && c.grid.dim == 2 &&
        c.model.source.y0 > c.model.source.y1) {
        cross("source.y1", "must be >= source.y0");
    }
    if (c.model.source.kind == SourceSpec::Kind::tabulated && c.source_file.empty()) {
        cross("source.file", "required when source.kind = tabulated");
    }
    if (c.initial.preset == InitialSpec::Preset::file && c.initial.file.empty()) {
        cross("initial.file", "required when initial.preset = file");
    }

    if (result.errors.empty()) result.config = std::move(c);
    return result;
}

std::map<std::string, std::map<std::string, std::string>> config_entries(const RunConfig& config) {
    const Draft d = draft_from(config);
    std::map<std::string, std::map<std::string, std::string>> out;
    for (const KeyDef& k : schema()) out[k.section][k.key] = k.get(d);
    return out;
}

std::string format_config(const RunConfig& config) {
    const Draft d = draft_from(config);
    std::string out;
    std::string section = "\x01";
    for (const KeyDef& k : schema()) {
        if (k.section != section) {
            section = k.section;
            if (!section.empty()) out += fmt::format("\n[{}]\n", section);
        }
        const std::string value = k.get(d);
        if (value.empty()) continue;  // unset file paths
        out += fmt::format("{} = {}\n", k.key, value);
    }
    return out;
}

RunConfig config_from_model(const ModelParams& params, const Grid& grid) {
    RunConfig c;
    c.grid.dim = grid.dim();
    c.grid.extents = {grid.extent_x(), grid.dim() == 2 ? grid.extent_y() : 1.0};
    c.grid.counts = {grid.nx(), grid.dim() == 2 ? grid.ny() : 64};
    c.grid.norm = grid.norm();
    c.model = params;
    if (params.source.kind == SourceSpec::Kind::tabulated) c.model.source.frames.clear();
    return c;
}

namespace {

std::filesystem::path resolve(const std::string& base, const std::string& file) {
    std::filesystem::path p(file);
    if (p.is_relative()) p = std::filesystem::path(base) / p;
    return p;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
    CsvTable t;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
        if (t.header.empty()) {
            t.header = cells;
            continue;
        }
        if (cells.size() != t.header.size()) {
            throw std::runtime_error(fmt::format("{}:{}: expected {} columns, got {}", path.string(), line_no,
                                                 t.header.size(), cells.size()));
        }
        std::vector<double> row;
        for (const auto& c : cells) {
            const auto v = parse_double(c);
            if (!v) throw std::runtime_error(fmt::format("{}:{}: bad number '{}'", path.string(), line_no, c));
            row.push_back(*v);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

int column(const CsvTable& t, const std::string& name, const std::filesystem::path& path) {
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) throw std::runtime_error(fmt::format("{}: missing column '{}'", path.string(), name));
    return static_cast<int>(it - t.header.begin());
}

// Interior node nearest to (x, y), or -1 when the point is a boundary node.
long node_at(const Grid& g, double x, double y) {
    const long i = std::lround(x / g.dx()) - 1;
    const long j = g.dim() == 2 ? std::lround(y / g.dy()) - 1 : 0;
    if (i < 0 || i >= g.nx() || j < 0 || j >= g.ny()) return -1;
    return static_cast<long>(g.index(static_cast<int>(i), static_cast<int>(j)));
}

}  // namespace

HeightField make_initial(const InitialSpec& spec, const Grid& grid, double lambda, const std::string& base_dir) {
    HeightField u(grid);
    switch (spec.preset) {
        case InitialSpec::Preset::hump: {
            const double lee = spec.lee_width.value_or(spec.width);
            for (int j = 0; j < grid.ny(); ++j) {
                for (int i = 0; i < grid.nx(); ++i) {
                    const double dxc = grid.x(i) - spec.center;
                    const double w = dxc < 0.0 ? spec.width : lee;
                    double r = std::abs(dxc) / w;
                    if (grid.dim() == 2) r = std::hypot(r, (grid.y(j) - spec.center_y) / spec.width);
                    if (r < 1.0) {
                        const double c = std::cos(0.5 * std::numbers::pi * r);
                        u(i, j) = spec.height * c * c;
                    }
                }
            }
            break;
        }
        case InitialSpec::Preset::dune: {
            // Piecewise linear: windward ramp up to a sharp crest, then the lee face.
            const double lee = spec.lee_width.value_or(spec.width);
            for (int j = 0; j < grid.ny(); ++j) {
                for (int i = 0; i < grid.nx(); ++i) {
                    const double dxc = grid.x(i) - spec.center;
                    double r = dxc < 0.0 ? -dxc / spec.width : dxc / lee;
                    if (grid.dim() == 2) r = std::max(r, std::abs(grid.y(j) - spec.center_y) / spec.width);
                    u(i, j) = spec.height * std::max(0.0, 1.0 - r);
                }
            }
            break;
        }
        case InitialSpec::Preset::cone: {
            u = dist_to_boundary(grid);
            for (double& v : u.values) v *= spec.scale * lambda;
            break;
        }
        case InitialSpec::Preset::flat: {
            for (double& v : u.values) v = spec.height;
            break;
        }
        case InitialSpec::Preset::file: {
            const auto path = resolve(base_dir, spec.file);
            const CsvTable t = read_csv(path);
            const int cx = column(t, "x", path);
            const int cu = column(t, "u", path);
            const int cy = grid.dim() == 2 ? column(t, "y", path) : -1;
            std::vector<bool> set(grid.size(), false);
            for (const auto& row : t.rows) {
                const long n = node_at(grid, row[static_cast<std::size_t>(cx)], cy >= 0 ? row[static_cast<std::size_t>(cy)] : 0.0);
                if (n < 0) continue;
                u.values[static_cast<std::size_t>(n)] = row[static_cast<std::size_t>(cu)];
                set[static_cast<std::size_t>(n)] = true;
            }
            if (std::find(set.begin(), set.end(), false) != set.end()) {
                throw std::runtime_error(fmt::format("{}: does not cover every interior node", path.string()));
            }
            break;
        }
    }
    return u;
}

PreparedRun prepare_run(const RunConfig& config) {
    const Grid grid = Grid::make(config.grid.dim, config.grid.extents, config.grid.counts, config.grid.norm);
    ModelParams params = config.model;
    if (params.source.kind == SourceSpec::Kind::tabulated && params.source.frames.empty()) {
        const auto path = resolve(config.base_dir, config.source_file);
        const CsvTable t = read_csv(path);
        const int ct = column(t, "t", path);
        const int cx = column(t, "x", path);
        const int cf = column(t, "f", path);
        const int cy = grid.dim() == 2 ? column(t, "y", path) : -1;
        std::map<double, std::vector<double>> frames;
        for (const auto& row : t.rows) {
            auto& values = frames[row[static_cast<std::size_t>(ct)]];
            if (values.empty()) values.assign(grid.size(), 0.0);
            const long n = node_at(grid, row[static_cast<std::size_t>(cx)], cy >= 0 ? row[static_cast<std::size_t>(cy)] : 0.0);
            if (n >= 0) values[static_cast<std::size_t>(n)] = row[static_cast<std::size_t>(cf)];
        }
        for (auto& [t0, values] : frames) params.source.frames.push_back({t0, std::move(values)});
    }
    params.validate();
    HeightField u0 = make_initial(config.initial, grid, params.lambda, config.base_dir);
    return {grid, std::move(params), std::move(u0)};
}

}  // namespace dunesim
