#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emt/errors.hpp"

namespace emt {

inline void require_strictly_increasing(std::span<const double> grid, std::string_view name) {
    if (grid.size() < 2) {
        throw ConfigError(std::string(name) + " needs at least two nodes");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i])) {
            throw ConfigError(std::string(name) + " has a non-finite node at index " + std::to_string(i));
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw ConfigError(std::string(name) + " is not strictly increasing at index " + std::to_string(i));
        }
    }
}

/// Cell index and fractional position of x inside a strictly increasing grid.
/// Grid nodes map to t == 0 (or t == 1 for the last node) so lookups there are exact.
struct Bracket {
    std::size_t lo = 0;
    double t = 0.0;
};

inline Bracket bracket(std::span<const double> grid, double x) {
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    std::size_t hi = static_cast<std::size_t>(it - grid.begin());
    if (hi >= grid.size()) {
        return {grid.size() - 2, 1.0};
    }
    if (hi == 0) hi = 1;
    const std::size_t lo = hi - 1;
    return {lo, (x - grid[lo]) / (grid[hi] - grid[lo])};
}

inline bool within(std::span<const double> grid, double x) {
    return x >= grid.front() && x <= grid.back();
}

/// Piecewise-linear y(x) over strictly increasing abscissae.
struct Curve1D {
    std::vector<double> xs;
    std::vector<double> ys;

    void validate(std::string_view name) const {
        require_strictly_increasing(xs, std::string(name) + " abscissa");
        if (ys.size() != xs.size()) {
            throw ConfigError(std::string(name) + ": abscissa and value counts differ");
        }
        for (double y : ys) {
            if (!std::isfinite(y)) throw ConfigError(std::string(name) + " has a non-finite value");
        }
    }

    double min_x() const { return xs.front(); }
    double max_x() const { return xs.back(); }

    /// Throws EnvelopeError outside [min_x, max_x].
    double at(double x, std::string_view what = "curve") const {
        if (!within(xs, x)) {
            throw EnvelopeError(std::string(what) + ": abscissa " + std::to_string(x) + " outside [" +
                                std::to_string(xs.front()) + ", " + std::to_string(xs.back()) + "]");
        }
        return at_clamped(x);
    }

    double at_clamped(double x) const {
        x = std::clamp(x, xs.front(), xs.back());
        const Bracket b = bracket(xs, x);
        return (1.0 - b.t) * ys[b.lo] + b.t * ys[b.lo + 1];
    }

    bool operator==(const Curve1D&) const = default;
};

/// Values on an (x, y) grid, stored row-major by y: value(ix, iy) = values[iy * nx + ix].
struct Table2D {
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> values;

    std::size_t nx() const { return xs.size(); }
    std::size_t ny() const { return ys.size(); }

    double node(std::size_t ix, std::size_t iy) const { return values[iy * xs.size() + ix]; }
    double& node(std::size_t ix, std::size_t iy) { return values[iy * xs.size() + ix]; }

    void validate(std::string_view name) const {
        require_strictly_increasing(xs, std::string(name) + " x grid");
        require_strictly_increasing(ys, std::string(name) + " y grid");
        if (values.size() != xs.size() * ys.size()) {
            throw ConfigError(std::string(name) + ": body size does not match grid");
        }
        for (double v : values) {
            if (!std::isfinite(v)) throw ConfigError(std::string(name) + " has a non-finite value");
        }
    }

    bool contains(double x, double y) const { return within(xs, x) && within(ys, y); }

    /// Bilinear interpolation; caller guarantees (x, y) is inside the grid hull.
    double bilinear(double x, double y) const {
        const Bracket bx = bracket(xs, x);
        const Bracket by = bracket(ys, y);
        const double v00 = node(bx.lo, by.lo);
        const double v10 = node(bx.lo + 1, by.lo);
        const double v01 = node(bx.lo, by.lo + 1);
        const double v11 = node(bx.lo + 1, by.lo + 1);
        return (1.0 - bx.t) * (1.0 - by.t) * v00 + bx.t * (1.0 - by.t) * v10 + (1.0 - bx.t) * by.t * v01 +
               bx.t * by.t * v11;
    }

    bool operator==(const Table2D&) const = default;
};

inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) out[i] = lo + step * static_cast<double>(i);
    out.back() = hi;
    return out;
}

}  // namespace emt
