#pragma once

#include <filesystem>
#include <string>

#include "dunesim/grid.hpp"

namespace dunesim {

/// 1D: SVG polyline with axes. 2D: binary PGM (P5), 0..lambda*diameter mapped to 0..255, clamped.
void render_heightmap(const HeightField& u, double lambda, const std::filesystem::path& path);

/// PGM bytes; the first image row is the top of the domain (j = ny - 1).
std::string pgm_bytes(const HeightField& u, double lambda);
std::string svg_text(const HeightField& u, double lambda);

}  // namespace dunesim
