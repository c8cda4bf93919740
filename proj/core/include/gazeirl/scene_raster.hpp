// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gazeirl {

/// Per-pixel RGB lookup for the scene a gaze trace was recorded against.
/// Read-only after construction and shareable across threads.
class SceneRaster {
public:
    SceneRaster() = default;
    SceneRaster(int width, int height, std::array<std::uint8_t, 3> fill);

    int width() const { return width_; }
    int height() const { return height_; }

    const std::uint8_t* pixel(int x, int y) const {
        return data_.data() + 3 * (static_cast<std::size_t>(y) * width_ + x);
    }

    void set_pixel(int x, int y, std::array<std::uint8_t, 3> rgb);

    /// Painter-ordered primitives used by the synthetic layout format.
    void fill_rect(int x0, int y0, int x1, int y1, std::array<std::uint8_t, 3> rgb);
    void fill_disk(double cx, double cy, double radius, std::array<std::uint8_t, 3> rgb);

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Loads a binary (P6) or ASCII (P3) PPM image.
SceneRaster load_ppm(std::istream& in);
SceneRaster load_ppm_file(const std::string& path);

std::string serialize_ppm(const SceneRaster& raster);

/// Loads the synthetic layout JSON (background color plus a painter-ordered
/// list of colored rects and disks) and rasterizes it.
SceneRaster load_layout(std::istream& in);
SceneRaster load_layout_file(const std::string& path);

/// Dispatch on file extension: `.ppm` -> load_ppm_file, `.json` -> load_layout_file.
SceneRaster load_scene(const std::string& path);

} // namespace gazeirl
