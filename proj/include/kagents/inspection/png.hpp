#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "kagents/inspection/figure.hpp"

namespace kagents::inspection {

struct RenderOptions {
    int width = 800;
    int height = 600;
};

// Plain line/scatter plot with axes, encoded as PNG. No text is drawn.
std::vector<std::uint8_t> render_png(const FigureArtifact& figure, RenderOptions options = {});

// RGB8 image to PNG bytes.
std::vector<std::uint8_t> encode_png(const std::vector<std::uint8_t>& rgb, int width, int height);

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

} // namespace kagents::inspection
