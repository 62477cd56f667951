#include "dunesim/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace dunesim {

std::string pgm_bytes(const HeightField& u, double lambda) {
    const Grid& g = u.grid;
    if (g.dim() != 2) throw std::invalid_argument("PGM output needs a 2D field");
    const double top = lambda * g.diameter();
    std::string out = fmt::format("P5\n{} {}\n255\n", g.nx(), g.ny());
    for (int j = g.ny() - 1; j >= 0; --j) {
        for (int i = 0; i < g.nx(); ++i) {
            const double level = std::clamp(std::round(255.0 * u(i, j) / top), 0.0, 255.0);
            out.push_back(static_cast<char>(static_cast<unsigned char>(level)));
        }
    }
    return out;
}

std::string svg_text(const HeightField& u, double lambda) {
    const Grid& g = u.grid;
    if (g.dim() != 1) throw std::invalid_argument("SVG output needs a 1D field");
    constexpr double w = 640.0, h = 240.0, pad = 32.0;
    const double top = std::max(lambda * g.diameter() * 0.5, 1e-300);
    auto px = [&](double x) { return pad + (w - 2 * pad) * x / g.extent_x(); };
    auto py = [&](double v) { return h - pad - (h - 2 * pad) * std::clamp(v / top, 0.0, 1.0); };

    std::string pts = fmt::format("{:.3f},{:.3f}", px(0.0), py(0.0));
    for (int i = 0; i < g.nx(); ++i) pts += fmt::format(" {:.3f},{:.3f}", px(g.x(i)), py(u(i)));
    pts += fmt::format(" {:.3f},{:.3f}", px(g.extent_x()), py(0.0));

    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n", w, h);
    out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", pad, h - pad, w - pad);
    out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", pad, h - pad, pad);
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\">x = {:.4g} m</text>\n", w - pad - 60, h - 8, g.extent_x());
    out += fmt::format("<text x=\"4\" y=\"{}\" font-size=\"10\">{:.4g} m</text>\n", pad - 4, top);
    out += fmt::format("<polyline fill=\"none\" stroke=\"#a0522d\" points=\"{}\"/>\n", pts);
    out += "</svg>\n";
    return out;
}

void render_heightmap(const HeightField& u, double lambda, const std::filesystem::path& path) {
    const std::string data = u.grid.dim() == 2 ? pgm_bytes(u, lambda) : svg_text(u, lambda);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    out << data;
    if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", path.string()));
}

}  // namespace dunesim
