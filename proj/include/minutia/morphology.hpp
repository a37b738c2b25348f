#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "minutia/image.hpp"

// Binary morphology on BinaryImage (values 0/1). Rectangular structuring
// elements use the reference-toolbox origin convention: for size k the origin
// sits at 0-based index (k-1)/2, so even sizes extend one pixel further to the
// right/bottom when eroding and to the left/top when dilating. Pixels outside
// the image read as 0 for dilation and as 1 for erosion.

namespace minutia::morph {

namespace detail {

// One separable pass along rows (axis 0) or columns (axis 1). For erosion the
// window is [p - before, p + after]; `outside` is the padding value.
inline BinaryImage pass(const BinaryImage& in, int before, int after, bool along_cols,
                        bool erode)
{
    BinaryImage out(in.width(), in.height());
    const std::uint8_t outside = erode ? 1 : 0;
    const int h = in.height();
    const int w = in.width();
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            std::uint8_t acc = erode ? 1 : 0;
            for (int d = -before; d <= after; ++d) {
                const int rr = along_cols ? r + d : r;
                const int cc = along_cols ? c : c + d;
                const std::uint8_t v = in.get_or(rr, cc, outside) != 0 ? 1 : 0;
                if (erode && v == 0) {
                    acc = 0;
                    break;
                }
                if (!erode && v == 1) {
                    acc = 1;
                    break;
                }
            }
            out(r, c) = acc;
        }
    }
    return out;
}

} // namespace detail

/// Erosion by a `size_h` x `size_w` rectangle of ones.
inline BinaryImage erode(const BinaryImage& in, int size_h, int size_w)
{
    const int oh = (size_h - 1) / 2;
    const int ow = (size_w - 1) / 2;
    auto tmp = detail::pass(in, ow, size_w - 1 - ow, false, true);
    return detail::pass(tmp, oh, size_h - 1 - oh, true, true);
}

/// Dilation by a `size_h` x `size_w` rectangle of ones (reflected element).
inline BinaryImage dilate(const BinaryImage& in, int size_h, int size_w)
{
    const int oh = (size_h - 1) / 2;
    const int ow = (size_w - 1) / 2;
    auto tmp = detail::pass(in, size_w - 1 - ow, ow, false, false);
    return detail::pass(tmp, size_h - 1 - oh, oh, true, false);
}

inline BinaryImage erode(const BinaryImage& in, int size) { return erode(in, size, size); }
inline BinaryImage dilate(const BinaryImage& in, int size) { return dilate(in, size, size); }

inline BinaryImage close(const BinaryImage& in, int size) { return erode(dilate(in, size), size); }
inline BinaryImage open(const BinaryImage& in, int size) { return dilate(erode(in, size), size); }

/// Eight neighbors starting north-west and running clockwise: NW, N, NE, E, SE, S, SW, W.
inline constexpr std::array<int, 8> kRingRow = {-1, -1, -1, 0, 1, 1, 1, 0};
inline constexpr std::array<int, 8> kRingCol = {-1, 0, 1, 1, 1, 0, -1, -1};

inline int count_neighbors(const BinaryImage& img, int r, int c)
{
    int n = 0;
    for (int k = 0; k < 8; ++k)
        n += img.get_or(r + kRingRow[k], c + kRingCol[k], 0) != 0 ? 1 : 0;
    return n;
}

/// Removes isolated foreground pixels (no 8-neighbor set).
inline BinaryImage clean(const BinaryImage& in)
{
    BinaryImage out = in;
    for (int r = 0; r < in.height(); ++r)
        for (int c = 0; c < in.width(); ++c)
            if (in(r, c) && count_neighbors(in, r, c) == 0)
                out(r, c) = 0;
    return out;
}

/// Removes the centre of H-shaped connections:
///   1 1 1      1 0 1
///   0 1 0  or  1 1 1
///   1 1 1      1 0 1
inline BinaryImage hbreak(const BinaryImage& in)
{
    BinaryImage out = in;
    auto v = [&](int r, int c) { return in.get_or(r, c, 0) != 0; };
    for (int r = 0; r < in.height(); ++r) {
        for (int c = 0; c < in.width(); ++c) {
            if (!in(r, c))
                continue;
            const bool top = v(r - 1, c - 1) && v(r - 1, c) && v(r - 1, c + 1);
            const bool bottom = v(r + 1, c - 1) && v(r + 1, c) && v(r + 1, c + 1);
            const bool left = v(r - 1, c - 1) && v(r, c - 1) && v(r + 1, c - 1);
            const bool right = v(r - 1, c + 1) && v(r, c + 1) && v(r + 1, c + 1);
            const bool horizontal_h = top && bottom && !v(r, c - 1) && !v(r, c + 1);
            const bool vertical_h = left && right && !v(r - 1, c) && !v(r + 1, c);
            if (horizontal_h || vertical_h)
                out(r, c) = 0;
        }
    }
    return out;
}

/// One parallel pass removing end points (pixels with exactly one 8-neighbor).
inline BinaryImage spur(const BinaryImage& in)
{
    BinaryImage out = in;
    for (int r = 0; r < in.height(); ++r)
        for (int c = 0; c < in.width(); ++c)
            if (in(r, c) && count_neighbors(in, r, c) == 1)
                out(r, c) = 0;
    return out;
}

/// Number of connected foreground components (connectivity 4 or 8).
inline int count_components(const BinaryImage& img, int connectivity = 8)
{
    const int h = img.height();
    const int w = img.width();
    std::vector<std::uint8_t> seen(img.size(), 0);
    std::vector<int> stack;
    int components = 0;
    for (int start = 0; start < h * w; ++start) {
        if (!img.pixels()[static_cast<std::size_t>(start)] || seen[static_cast<std::size_t>(start)])
            continue;
        ++components;
        stack.push_back(start);
        seen[static_cast<std::size_t>(start)] = 1;
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            const int r = p / w;
            const int c = p % w;
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    if ((dr == 0 && dc == 0) || (connectivity == 4 && dr != 0 && dc != 0))
                        continue;
                    const int rr = r + dr;
                    const int cc = c + dc;
                    if (!img.contains(rr, cc))
                        continue;
                    const int q = rr * w + cc;
                    if (img(rr, cc) && !seen[static_cast<std::size_t>(q)]) {
                        seen[static_cast<std::size_t>(q)] = 1;
                        stack.push_back(q);
                    }
                }
            }
        }
    }
    return components;
}

/// True if some 2x2 window is entirely foreground.
inline bool has_square(const BinaryImage& img)
{
    for (int r = 0; r + 1 < img.height(); ++r)
        for (int c = 0; c + 1 < img.width(); ++c)
            if (img(r, c) && img(r, c + 1) && img(r + 1, c) && img(r + 1, c + 1))
                return true;
    return false;
}

inline std::size_t count_ones(const BinaryImage& img)
{
    std::size_t n = 0;
    for (auto v : img.pixels())
        n += v != 0 ? 1 : 0;
    return n;
}

} // namespace minutia::morph
