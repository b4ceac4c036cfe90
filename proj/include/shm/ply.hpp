#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "shm/pointcloud.hpp"

namespace shm {

enum class PlyEncoding { Ascii, BinaryLittleEndian };

// Reads the PLY subset documented in docs/formats.md: one vertex element with
// x, y, z (float32 or float64) and optional red, green, blue (uint8). A face
// element, if present, is skipped.
PointCloud load_ply(std::string_view bytes);

// Coordinates are written at pc.precision. Binary output re-reads bit-exactly;
// ASCII output uses shortest round-trip decimal text.
std::string save_ply(const PointCloud& pc, PlyEncoding encoding);

PointCloud read_ply_file(const std::filesystem::path& path);
void write_ply_file(const std::filesystem::path& path, const PointCloud& pc, PlyEncoding encoding);

}  // namespace shm
