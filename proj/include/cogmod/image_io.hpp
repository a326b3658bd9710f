#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cogmod/errors.hpp"
#include "cogmod/grid.hpp"

namespace cogmod {

/// Grayscale raster, row-major, one byte per pixel.
struct gray_image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(int row, int col) const { return pixels[row * width + col]; }
};

// ---------------------------------------------------------------------------
// text grid format: one row per line, '#' = active cell, '.' = empty
// ---------------------------------------------------------------------------

inline grid_image parse_grid_text(std::istream& in, const std::string& name) {
    std::vector<std::string> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            if (in.peek() == EOF && !rows.empty()) break; // trailing newline
            throw parse_error(name, lineno, "blank row in grid");
        }
        if (!rows.empty() && line.size() != rows.front().size())
            throw parse_error(name, lineno,
                              "ragged row: expected " + std::to_string(rows.front().size()) +
                                  " cells, got " + std::to_string(line.size()));
        for (char ch : line)
            if (ch != '#' && ch != '.')
                throw parse_error(name, lineno, std::string("illegal grid character '") + ch +
                                                    "' (expected '#' or '.')");
        rows.push_back(line);
    }
    if (rows.empty()) throw parse_error(name, lineno == 0 ? 1 : lineno, "empty grid file");

    grid_image image(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
    for (int r = 0; r < image.height(); ++r)
        for (int c = 0; c < image.width(); ++c)
            if (rows[r][c] == '#') image.add({r, c});
    return image;
}

inline grid_image load_grid_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open grid file " + path.string());
    return parse_grid_text(in, path.string());
}

inline std::string grid_to_text(const grid_image& image) {
    std::string out;
    out.reserve(static_cast<std::size_t>(image.height()) * (image.width() + 1));
    for (int r = 0; r < image.height(); ++r) {
        for (int c = 0; c < image.width(); ++c)
            out += image.contains({r, c}) ? '#' : '.';
        out += '\n';
    }
    return out;
}

inline void save_grid_text(const grid_image& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write grid file " + path.string());
    out << grid_to_text(image);
    if (!out) throw error("failed writing grid file " + path.string());
}

// ---------------------------------------------------------------------------
// portable graymap (P2 ascii / P5 raw), values scaled to 0..255
// ---------------------------------------------------------------------------

namespace detail {

// skips whitespace and '#' comments; plain graymaps allow both anywhere
inline void skip_pgm_filler(std::istream& in) {
    for (;;) {
        const int ch = in.peek();
        if (ch == '#') {
            std::string comment;
            std::getline(in, comment);
            continue;
        }
        if (ch != EOF && std::isspace(ch)) {
            in.get();
            continue;
        }
        break;
    }
}

inline int next_pgm_token(std::istream& in, const std::string& name) {
    skip_pgm_filler(in);
    if (in.peek() == EOF) throw parse_error(name + ": truncated graymap header");
    long long value = 0;
    if (!(in >> value) || value < 0)
        throw parse_error(name + ": bad graymap header value");
    if (value > 1 << 30) throw parse_error(name + ": graymap value out of range");
    return static_cast<int>(value);
}

} // namespace detail

inline gray_image parse_pgm(std::istream& in, const std::string& name) {
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5'))
        throw parse_error(name + ": not a P2/P5 graymap");
    const bool raw = magic[1] == '5';

    gray_image img;
    img.width = detail::next_pgm_token(in, name);
    img.height = detail::next_pgm_token(in, name);
    const int maxval = detail::next_pgm_token(in, name);
    if (img.width <= 0 || img.height <= 0)
        throw parse_error(name + ": graymap dimensions must be positive");
    if (maxval < 1 || maxval > 255)
        throw parse_error(name + ": unsupported graymap maxval " + std::to_string(maxval));

    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    img.pixels.resize(n);
    if (raw) {
        in.get(); // single whitespace byte after maxval
        in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n)
            throw parse_error(name + ": truncated graymap pixel data");
        for (auto& p : img.pixels)
            if (p > maxval) throw parse_error(name + ": pixel above maxval");
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            detail::skip_pgm_filler(in);
            long long v;
            if (!(in >> v)) throw parse_error(name + ": truncated graymap pixel data");
            if (v < 0 || v > maxval)
                throw parse_error(name + ": pixel value " + std::to_string(v) +
                                  " outside [0, " + std::to_string(maxval) + "]");
            img.pixels[i] = static_cast<std::uint8_t>(v);
        }
    }
    if (maxval != 255)
        for (auto& p : img.pixels)
            p = static_cast<std::uint8_t>((p * 255 + maxval / 2) / maxval);
    return img;
}

inline gray_image load_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open graymap file " + path.string());
    return parse_pgm(in, path.string());
}

/// Dark ink on light paper: a cell is active iff its pixel value is
/// strictly below the cutoff.
inline grid_image binarize(const gray_image& gray, int cutoff) {
    if (cutoff < 0 || cutoff > 255)
        throw error("binarize cutoff must be in [0,255], got " + std::to_string(cutoff));
    grid_image image(gray.width, gray.height);
    for (int r = 0; r < gray.height; ++r)
        for (int c = 0; c < gray.width; ++c)
            if (gray.at(r, c) < cutoff) image.add({r, c});
    return image;
}

/// Crop to the bounding box of the active cells, then resample onto a
/// grid_width x grid_height grid. Each target cell covers an interval of
/// source cells and is active iff any covered cell is, so upscaling is plain
/// nearest-neighbour and downscaling never drops the ink entirely. Identity
/// when the image already fills the target grid exactly.
inline grid_image normalize_scale(const grid_image& image, int grid_width, int grid_height) {
    if (image.empty()) throw error("cannot scale an image with no active cells");
    if (grid_width <= 0 || grid_height <= 0)
        throw error("target grid dimensions must be positive");

    int rmin = image.height(), rmax = -1, cmin = image.width(), cmax = -1;
    for (const cell_index& c : image.active()) {
        rmin = std::min(rmin, c.row);
        rmax = std::max(rmax, c.row);
        cmin = std::min(cmin, c.col);
        cmax = std::max(cmax, c.col);
    }
    const int box_h = rmax - rmin + 1;
    const int box_w = cmax - cmin + 1;

    auto span = [](int target, int extent, int source) {
        int lo = target * source / extent;
        int hi = std::max(lo + 1, (target + 1) * source / extent);
        return std::pair<int, int>(lo, std::min(hi, source));
    };

    grid_image out(grid_width, grid_height);
    for (int r = 0; r < grid_height; ++r) {
        auto [r0, r1] = span(r, grid_height, box_h);
        for (int c = 0; c < grid_width; ++c) {
            auto [c0, c1] = span(c, grid_width, box_w);
            bool hit = false;
            for (int sr = r0; sr < r1 && !hit; ++sr)
                for (int sc = c0; sc < c1 && !hit; ++sc)
                    hit = image.contains({rmin + sr, cmin + sc});
            if (hit) out.add({r, c});
        }
    }
    return out;
}

/// Place a smaller image at the top-left of a larger grid, padding with
/// empty cells. Images already at the target size pass through unchanged.
inline grid_image embed_top_left(const grid_image& image, int grid_width, int grid_height) {
    if (image.width() == grid_width && image.height() == grid_height) return image;
    if (image.width() > grid_width || image.height() > grid_height)
        throw error("image " + std::to_string(image.width()) + "x" +
                    std::to_string(image.height()) + " does not fit the " +
                    std::to_string(grid_width) + "x" + std::to_string(grid_height) + " grid");
    grid_image out(grid_width, grid_height);
    for (const cell_index& c : image.active()) out.add(c);
    return out;
}

} // namespace cogmod
