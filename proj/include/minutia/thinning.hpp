#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "minutia/image.hpp"
#include "minutia/morphology.hpp"

namespace minutia {

/// 1-pixel-wide ridge map (1 = ridge).
using Skeleton = BinaryImage;

enum class BlockType : std::uint8_t { background = 0, type1 = 1, type2 = 2 };

/// Per-block ridge direction: type1 runs near-horizontal, type2 near-vertical.
struct BlockTypeMap {
    int block_size = 8;
    Image<std::uint8_t> types; // width = block columns, height = block rows

    int rows() const noexcept { return types.height(); }
    int cols() const noexcept { return types.width(); }
    std::uint8_t operator()(int r, int c) const noexcept { return types(r, c); }
    std::uint8_t& operator()(int r, int c) noexcept { return types(r, c); }

    friend bool operator==(const BlockTypeMap&, const BlockTypeMap&) = default;
};

inline constexpr int kDefaultBackgroundThreshold = 245;

/// Raw block typing without neighbour correction.
inline BlockType classify_block(const GrayImage& block, int background_threshold)
{
    bool foreground = false;
    for (auto v : block.pixels())
        foreground = foreground || v <= background_threshold;
    if (!foreground)
        return BlockType::background;
    long min_col = -1;
    for (int c = 0; c < block.width(); ++c) {
        long s = 0;
        for (int r = 0; r < block.height(); ++r)
            s += block(r, c);
        if (min_col < 0 || s < min_col)
            min_col = s;
    }
    long min_row = -1;
    for (int r = 0; r < block.height(); ++r) {
        long s = 0;
        for (int c = 0; c < block.width(); ++c)
            s += block(r, c);
        if (min_row < 0 || s < min_row)
            min_row = s;
    }
    return min_col > min_row ? BlockType::type1 : BlockType::type2;
}

/// Neighbour correction over interior blocks, applied in place in row-major order.
inline void correct_block_types(BlockTypeMap& map)
{
    for (int r = 1; r + 1 < map.rows(); ++r) {
        for (int c = 1; c + 1 < map.cols(); ++c) {
            const int t = map(r, c);
            const int L = map(r, c - 1), R = map(r, c + 1), T = map(r - 1, c), B = map(r + 1, c);
            auto flanked = [&](int k) {
                return (L == k && R == k) || (T == k && B == k) || (L == 0 && R == k) ||
                       (L == k && R == 0) || (T == 0 && B == k) || (T == k && B == 0);
            };
            const bool isolated = L == 0 && R == 0 && T == 0 && B == 0;
            if (t == 2) {
                if (flanked(1))
                    map(r, c) = 1;
                else if (isolated)
                    map(r, c) = 0;
            } else if (t == 1) {
                if (flanked(2))
                    map(r, c) = 2;
                else if (isolated)
                    map(r, c) = 0;
            }
        }
    }
}

inline BlockTypeMap classify_blocks(const GrayImage& img,
                                    int background_threshold = kDefaultBackgroundThreshold,
                                    int block_size = 8)
{
    const auto grid = block_grid(img, block_size);
    BlockTypeMap map{block_size, Image<std::uint8_t>(grid.cols, grid.rows, 0)};
    for (int r = 0; r < grid.rows; ++r)
        for (int c = 0; c < grid.cols; ++c)
            map(r, c) = static_cast<std::uint8_t>(
                classify_block(block_view(img, r, c, block_size), background_threshold));
    correct_block_types(map);
    return map;
}

/// Rectangle [row, row + height) x [col, col + width).
struct Rect {
    int row = 0;
    int col = 0;
    int height = 0;
    int width = 0;

    friend bool operator==(const Rect&, const Rect&) = default;
};

struct Segmentation {
    Rect blocks;
    Rect pixels;
    BlockTypeMap cropped;
};

/// Region of interest from the closed-then-opened foreground of a block map.
inline Segmentation segment(const BlockTypeMap& map)
{
    BinaryImage fg(map.cols(), map.rows(), 0);
    for (int r = 0; r < map.rows(); ++r)
        for (int c = 0; c < map.cols(); ++c)
            fg(r, c) = map(r, c) != 0 ? 1 : 0;
    if (morph::count_ones(fg) == 0)
        throw Error("segmentation: no foreground blocks");

    auto bbox = [](const BinaryImage& b) {
        int r0 = b.height(), r1 = -1, c0 = b.width(), c1 = -1;
        for (int r = 0; r < b.height(); ++r)
            for (int c = 0; c < b.width(); ++c)
                if (b(r, c)) {
                    r0 = std::min(r0, r);
                    r1 = std::max(r1, r);
                    c0 = std::min(c0, c);
                    c1 = std::max(c1, c);
                }
        return Rect{r0, c0, r1 - r0 + 1, c1 - c0 + 1};
    };

    // The perimeter of the opened region has the same extent as the region.
    const auto opened = morph::open(morph::close(fg, 3), 3);
    const Rect blocks = morph::count_ones(opened) > 0 ? bbox(opened) : bbox(fg);

    Segmentation s;
    s.blocks = blocks;
    s.pixels = Rect{blocks.row * map.block_size, blocks.col * map.block_size,
                    blocks.height * map.block_size, blocks.width * map.block_size};
    s.cropped = BlockTypeMap{map.block_size,
                             map.types.crop(blocks.row, blocks.col, blocks.height, blocks.width)};
    return s;
}

namespace detail {

// Neighbours x1..x8 counter-clockwise from east; index 0 is x1.
inline constexpr std::array<int, 8> kCcwRow = {0, -1, -1, -1, 0, 1, 1, 1};
inline constexpr std::array<int, 8> kCcwCol = {1, 1, 0, -1, -1, -1, 0, 1};

inline std::array<bool, 10> ccw_neighbors(const BinaryImage& img, int r, int c)
{
    std::array<bool, 10> x{}; // x[1..8], x[9] = x[1]
    for (int k = 0; k < 8; ++k)
        x[static_cast<std::size_t>(k + 1)] = img.get_or(r + kCcwRow[k], c + kCcwCol[k], 0) != 0;
    x[9] = x[1];
    return x;
}

inline int hilditch_crossing(const std::array<bool, 10>& x)
{
    int xh = 0;
    for (int i = 1; i <= 4; ++i)
        xh += (!x[2 * i - 1] && (x[2 * i] || x[2 * i + 1])) ? 1 : 0;
    return xh;
}

} // namespace detail

/// Breaks every 2x2 block of ones by removing one pixel, preferring a pixel whose
/// removal keeps local connectivity, then the one with fewest neighbours.
inline Skeleton break_squares(Skeleton skel)
{
    bool changed = true;
    while (changed) {
        changed = false;
        for (int r = 0; r + 1 < skel.height(); ++r) {
            for (int c = 0; c + 1 < skel.width(); ++c) {
                if (!(skel(r, c) && skel(r, c + 1) && skel(r + 1, c) && skel(r + 1, c + 1)))
                    continue;
                const std::array<std::array<int, 2>, 4> cand = {
                    {{r, c}, {r, c + 1}, {r + 1, c}, {r + 1, c + 1}}};
                int best = -1;
                int best_key = 1 << 20;
                for (int k = 0; k < 4; ++k) {
                    const auto [pr, pc] = cand[static_cast<std::size_t>(k)];
                    const auto x = detail::ccw_neighbors(skel, pr, pc);
                    const int key = (detail::hilditch_crossing(x) == 1 ? 0 : 100) +
                                    morph::count_neighbors(skel, pr, pc);
                    if (key < best_key) {
                        best_key = key;
                        best = k;
                    }
                }
                const auto [br, bc] = cand[static_cast<std::size_t>(best)];
                skel(br, bc) = 0;
                changed = true;
            }
        }
    }
    return skel;
}

/// Local-minimum ridge scan. Type1 runs are scanned down each pixel column,
/// type2 runs along each pixel row; a pixel is marked when strictly darker than
/// both neighbours along the scan, or when it starts a two-pixel flat minimum.
/// Only pixels inside a run are marked.
inline Skeleton thin_gray(const GrayImage& img, const BlockTypeMap& map)
{
    const int bs = map.block_size;
    const int h = img.height();
    const int w = img.width();
    if (map.rows() * bs > h || map.cols() * bs > w)
        throw Error("block map larger than image");
    Skeleton skel(w, h, 0);
    // a > b < c, or a two-sample flat bottom a > b == c < d (marks b).
    auto valley = [](int a, int b, int c, int d) { return a > b && (b < c || (b == c && c < d)); };

    for (int bc = 0; bc < map.cols(); ++bc) {
        for (int br = 0; br < map.rows();) {
            if (map(br, bc) != 1) {
                ++br;
                continue;
            }
            int end = br;
            while (end + 1 < map.rows() && map(end + 1, bc) == 1)
                ++end;
            const int first = br * bs;
            const int last = (end + 1) * bs - 1;
            for (int i = first; i + 1 <= last && i + 2 < h; ++i)
                for (int j = bc * bs; j < (bc + 1) * bs; ++j)
                    if (valley(img(i, j), img(i + 1, j), img(i + 2, j), i + 3 < h ? img(i + 3, j) : -1))
                        skel(i + 1, j) = 1;
            br = end + 1;
        }
    }

    for (int br = 0; br < map.rows(); ++br) {
        for (int bc = 0; bc < map.cols();) {
            if (map(br, bc) != 2) {
                ++bc;
                continue;
            }
            int end = bc;
            while (end + 1 < map.cols() && map(br, end + 1) == 2)
                ++end;
            const int first = bc * bs;
            const int last = (end + 1) * bs - 1;
            for (int i = br * bs; i < (br + 1) * bs; ++i)
                for (int j = first; j + 1 <= last && j + 2 < w; ++j)
                    if (valley(img(i, j), img(i, j + 1), img(i, j + 2), j + 3 < w ? img(i, j + 3) : -1))
                        skel(i, j + 1) = 1;
            bc = end + 1;
        }
    }
    return break_squares(morph::clean(skel));
}

/// Reconnects bifurcations broken by the scan: a dangling end is extended toward
/// its darkest neighbour when that neighbour already touches the skeleton.
/// Pixels within 3 px of the border are not visited.
inline Skeleton repair_bifurcations(Skeleton skel, const GrayImage& img)
{
    if (skel.width() != img.width() || skel.height() != img.height())
        throw Error("skeleton and image dimensions differ");
    auto sum3 = [&](int r, int c) {
        int s = 0;
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc)
                s += skel.get_or(r + dr, c + dc, 0) != 0 ? 1 : 0;
        return s;
    };
    for (int i = 3; i <= skel.height() - 5; ++i) {
        for (int j = 3; j <= skel.width() - 5; ++j) {
            if (!skel(i, j) || sum3(i, j) != 2)
                continue;
            // Column-major scan gives the first minimum by column, then row.
            int mr = 0, mc = 0, mv = 1 << 20;
            for (int dc = -1; dc <= 1; ++dc)
                for (int dr = -1; dr <= 1; ++dr) {
                    if (dr == 0 && dc == 0)
                        continue;
                    const int v = img(i + dr, j + dc);
                    if (v < mv) {
                        mv = v;
                        mr = i + dr;
                        mc = j + dc;
                    }
                }
            if (skel(mr, mc) != 0 || sum3(mr, mc) < 3)
                continue;
            skel(mr, mc) = 1;
            if (skel.get_or(mr, mc - 1, 0) == 1 && skel.get_or(mr, mc - 2, 0) == 0)
                skel(mr, mc - 1) = 0;
            else if (skel.get_or(mr, mc + 1, 0) == 1 && skel.get_or(mr, mc + 2, 0) == 0)
                skel(mr, mc + 1) = 0;
        }
    }
    return skel;
}

/// Two-subiteration parallel thinning of a binary image, run to a fixpoint.
/// Each subiteration tests every pixel against the same unmodified image.
inline Skeleton thin_binary_baseline(const BinaryImage& bin)
{
    Skeleton cur = bin;
    for (auto& v : cur.pixels())
        v = v != 0 ? 1 : 0;
    auto subiteration = [&](bool first) {
        std::vector<std::pair<int, int>> del;
        for (int r = 0; r < cur.height(); ++r)
            for (int c = 0; c < cur.width(); ++c) {
                if (!cur(r, c))
                    continue;
                const auto x = detail::ccw_neighbors(cur, r, c);
                if (detail::hilditch_crossing(x) != 1)
                    continue;
                int n1 = 0, n2 = 0;
                for (int k = 1; k <= 4; ++k) {
                    n1 += (x[2 * k - 1] || x[2 * k]) ? 1 : 0;
                    n2 += (x[2 * k] || x[2 * k + 1]) ? 1 : 0;
                }
                const int mn = std::min(n1, n2);
                if (mn < 2 || mn > 3)
                    continue;
                const bool g3 = first ? !((x[2] || x[3] || !x[8]) && x[1])
                                      : !((x[6] || x[7] || !x[4]) && x[5]);
                if (g3)
                    del.emplace_back(r, c);
            }
        for (auto [r, c] : del)
            cur(r, c) = 0;
        return !del.empty();
    };
    for (;;) {
        const bool a = subiteration(true);
        const bool b = subiteration(false);
        if (!a && !b)
            break;
    }
    return cur;
}

enum class ThinAlgorithm { gray, baseline };

inline ThinAlgorithm parse_thin_algorithm(const std::string& s)
{
    if (s == "gray")
        return ThinAlgorithm::gray;
    if (s == "baseline")
        return ThinAlgorithm::baseline;
    throw Error("unknown thinning algorithm '" + s + "'");
}

/// Full gray-scale route: typing, segmentation, local-minimum scan and repair.
/// The skeleton is returned in the coordinates of the input image.
inline Skeleton skeletonize_gray(const GrayImage& img,
                                 int background_threshold = kDefaultBackgroundThreshold)
{
    const auto map = classify_blocks(img, background_threshold);
    Skeleton out(img.width(), img.height(), 0);
    if (map.rows() == 0 || map.cols() == 0)
        return out;
    bool any = false;
    for (auto v : map.types.pixels())
        any = any || v != 0;
    if (!any)
        return out;
    const auto seg = segment(map);
    const auto roi = img.crop(seg.pixels.row, seg.pixels.col, seg.pixels.height, seg.pixels.width);
    auto skel = thin_gray(roi, seg.cropped);
    for (int pass = 0; pass < 16; ++pass) {
        auto next = repair_bifurcations(skel, roi);
        if (next == skel)
            break;
        skel = std::move(next);
    }
    skel = break_squares(std::move(skel));
    for (int r = 0; r < skel.height(); ++r)
        for (int c = 0; c < skel.width(); ++c)
            out(seg.pixels.row + r, seg.pixels.col + c) = skel(r, c);
    return out;
}

} // namespace minutia
