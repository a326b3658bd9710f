#pragma once

#include <compare>
#include <set>
#include <string>
#include <utility>

#include "cogmod/errors.hpp"

namespace cogmod {

/// Position of one cell on a 2-D grid. Ordering is (row, col) lexicographic,
/// which fixes the iteration and tie-breaking order everywhere.
struct cell_index {
    int row = 0;
    int col = 0;

    auto operator<=>(const cell_index&) const = default;
};

inline std::string to_string(cell_index c) {
    return std::to_string(c.row) + "," + std::to_string(c.col);
}

/// A binary image: a width x height cell grid plus the set of active
/// ("black", pixel present) cells. Set semantics, no duplicates.
class grid_image {
public:
    grid_image(int width, int height) : width_(width), height_(height) {
        if (width <= 0 || height <= 0)
            throw error("grid dimensions must be positive, got " +
                        std::to_string(width) + "x" + std::to_string(height));
    }

    grid_image(int width, int height, std::set<cell_index> active)
        : grid_image(width, height) {
        for (const cell_index& c : active) check_bounds(c);
        active_ = std::move(active);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int cell_count() const { return width_ * height_; }

    const std::set<cell_index>& active() const { return active_; }
    bool contains(cell_index c) const { return active_.count(c) > 0; }
    bool empty() const { return active_.empty(); }

    void add(cell_index c) {
        check_bounds(c);
        active_.insert(c);
    }

    bool in_bounds(cell_index c) const {
        return c.row >= 0 && c.row < height_ && c.col >= 0 && c.col < width_;
    }

    bool same_dimensions(const grid_image& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    bool operator==(const grid_image&) const = default;

private:
    void check_bounds(cell_index c) const {
        if (!in_bounds(c))
            throw error("cell " + to_string(c) + " outside " +
                        std::to_string(width_) + "x" + std::to_string(height_) + " grid");
    }

    int width_;
    int height_;
    std::set<cell_index> active_;
};

} // namespace cogmod
