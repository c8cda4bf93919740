// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "gazeirl/scene_raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gazeirl/errors.hpp"

namespace gazeirl {

SceneRaster::SceneRaster(int width, int height, std::array<std::uint8_t, 3> fill)
    : width_(width), height_(height) {
    if (width <= 0 || height <= 0)
        throw ValidationError("raster dimensions must be positive");
    data_.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i < data_.size(); i += 3) {
        data_[i] = fill[0];
        data_[i + 1] = fill[1];
        data_[i + 2] = fill[2];
    }
}

void SceneRaster::set_pixel(int x, int y, std::array<std::uint8_t, 3> rgb) {
    if (x < 0 || x >= width_ || y < 0 || y >= height_) return;
    auto* p = data_.data() + 3 * (static_cast<std::size_t>(y) * width_ + x);
    p[0] = rgb[0];
    p[1] = rgb[1];
    p[2] = rgb[2];
}

void SceneRaster::fill_rect(int x0, int y0, int x1, int y1,
                            std::array<std::uint8_t, 3> rgb) {
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    x1 = std::min(x1, width_ - 1);
    y1 = std::min(y1, height_ - 1);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) set_pixel(x, y, rgb);
}

void SceneRaster::fill_disk(double cx, double cy, double radius,
                            std::array<std::uint8_t, 3> rgb) {
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
    const int x1 = std::min(width_ - 1, static_cast<int>(std::ceil(cx + radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
    const int y1 = std::min(height_ - 1, static_cast<int>(std::ceil(cy + radius)));
    const double r2 = radius * radius;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            if (dx * dx + dy * dy <= r2) set_pixel(x, y, rgb);
        }
    }
}

namespace {

int next_pnm_int(std::istream& in) {
    // skips whitespace and `#` comments
    for (;;) {
        const int c = in.peek();
        if (c == '#') {
            std::string dummy;
            std::getline(in, dummy);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int v = 0;
    if (!(in >> v)) throw ParseError("ppm: expected integer");
    return v;
}

std::array<std::uint8_t, 3> json_color(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3)
        throw ParseError(where + ": color must be a 3-element array");
    std::array<std::uint8_t, 3> rgb{};
    for (int c = 0; c < 3; ++c) {
        const int v = j[c].get<int>();
        if (v < 0 || v > 255) throw ParseError(where + ": color channel out of [0,255]");
        rgb[c] = static_cast<std::uint8_t>(v);
    }
    return rgb;
}

} // namespace

SceneRaster load_ppm(std::istream& in) {
    std::string magic;
    in >> magic;
    if (magic != "P6" && magic != "P3") throw ParseError("ppm: expected P6 or P3 magic");
    const int w = next_pnm_int(in);
    const int h = next_pnm_int(in);
    const int maxval = next_pnm_int(in);
    if (maxval != 255) throw ParseError("ppm: only maxval 255 is supported");
    SceneRaster raster(w, h, {0, 0, 0});
    if (magic == "P6") {
        in.get(); // single whitespace after maxval
        std::vector<char> buf(static_cast<std::size_t>(w) * h * 3);
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() != static_cast<std::streamsize>(buf.size()))
            throw ParseError("ppm: truncated pixel data");
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const std::size_t i = 3 * (static_cast<std::size_t>(y) * w + x);
                raster.set_pixel(x, y,
                                 {static_cast<std::uint8_t>(buf[i]),
                                  static_cast<std::uint8_t>(buf[i + 1]),
                                  static_cast<std::uint8_t>(buf[i + 2])});
            }
    } else {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const int r = next_pnm_int(in);
                const int g = next_pnm_int(in);
                const int b = next_pnm_int(in);
                raster.set_pixel(x, y,
                                 {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                                  static_cast<std::uint8_t>(b)});
            }
    }
    return raster;
}

SceneRaster load_ppm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    return load_ppm(in);
}

std::string serialize_ppm(const SceneRaster& raster) {
    std::string out = "P6\n" + std::to_string(raster.width()) + " " +
                      std::to_string(raster.height()) + "\n255\n";
    out.reserve(out.size() + static_cast<std::size_t>(raster.width()) * raster.height() * 3);
    for (int y = 0; y < raster.height(); ++y)
        for (int x = 0; x < raster.width(); ++x) {
            const auto* p = raster.pixel(x, y);
            out.push_back(static_cast<char>(p[0]));
            out.push_back(static_cast<char>(p[1]));
            out.push_back(static_cast<char>(p[2]));
        }
    return out;
}

SceneRaster load_layout(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("layout: ") + e.what());
    }
    const int w = doc.at("width").get<int>();
    const int h = doc.at("height").get<int>();
    SceneRaster raster(w, h, json_color(doc.at("background"), "layout background"));
    std::size_t idx = 0;
    for (const auto& shape : doc.value("shapes", nlohmann::json::array())) {
        const auto where = "layout shape[" + std::to_string(idx) + "]";
        ++idx;
        const auto type = shape.at("type").get<std::string>();
        const auto rgb = json_color(shape.at("color"), where);
        if (type == "rect") {
            const auto& lo = shape.at("min");
            const auto& hi = shape.at("max");
            raster.fill_rect(lo[0].get<int>(), lo[1].get<int>(), hi[0].get<int>(),
                             hi[1].get<int>(), rgb);
        } else if (type == "disk") {
            const auto& c = shape.at("center");
            raster.fill_disk(c[0].get<double>(), c[1].get<double>(),
                             shape.at("radius").get<double>(), rgb);
        } else {
            throw ParseError(where + ": unknown type `" + type + "`");
        }
    }
    return raster;
}

SceneRaster load_layout_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    return load_layout(in);
}

SceneRaster load_scene(const std::string& path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".ppm")
        return load_ppm_file(path);
    return load_layout_file(path);
}

} // namespace gazeirl
