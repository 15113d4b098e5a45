#pragma once

#include "vgaze/types.hpp"

#include <filesystem>

namespace vgaze {

/// Binary PGM (P5, maxval 255).
void write_pgm(const std::filesystem::path& path, const GrayImage& img);
GrayImage read_pgm(const std::filesystem::path& path);

}  // namespace vgaze
