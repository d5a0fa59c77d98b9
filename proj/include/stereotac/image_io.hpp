// Readers and writers for the on-disk formats exchanged by the pipeline:
// binary PPM (P6, maxval 255) for camera frames, grayscale PFM for scalar
// maps (unit tag and optional invalid-pixel sentinel declared as a comment on
// the scale line) and ASCII PLY for point clouds. Payload round-trips are
// byte-exact; readers turn malformed input into structured errors instead of
// crashing.
#pragma once

#include <filesystem>
#include <string>

#include "stereotac/image.hpp"

namespace stereotac::io {

ImageRgb8 read_image(const std::filesystem::path& path);
void write_image(const ImageRgb8& image, const std::filesystem::path& path);

FloatMap read_floatmap(const std::filesystem::path& path);
void write_floatmap(const FloatMap& map, const std::filesystem::path& path);

void write_pointcloud(const PointCloud3& cloud, const std::filesystem::path& path);

/// Write-then-rename so partially written files never appear under the final
/// name.
void atomic_write_bytes(const std::filesystem::path& path, const std::string& bytes);

}  // namespace stereotac::io
