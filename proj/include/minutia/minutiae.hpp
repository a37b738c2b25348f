#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "minutia/corepoint.hpp"
#include "minutia/image.hpp"
#include "minutia/morphology.hpp"
#include "minutia/thinning.hpp"

namespace minutia {

enum class MinutiaKind : std::uint8_t { termination = 1, bifurcation = 3 };

struct Minutia {
    int x = 0; // column
    int y = 0; // row
    MinutiaKind kind = MinutiaKind::termination;

    friend bool operator==(const Minutia&, const Minutia&) = default;
};

/// Counts of terminations and bifurcations in one annular track.
struct TrackCounts {
    int term = 0;
    int bif = 0;

    friend bool operator==(const TrackCounts&, const TrackCounts&) = default;
};

struct MinutiaeTable {
    std::vector<TrackCounts> rows;
    int track_width = 10;

    std::size_t size() const noexcept { return rows.size(); }
    bool empty() const noexcept { return rows.empty(); }

    int total() const noexcept
    {
        int n = 0;
        for (const auto& r : rows)
            n += r.term + r.bif;
        return n;
    }

    /// First `n` rows (all rows if n exceeds the size).
    MinutiaeTable truncated(std::size_t n) const
    {
        MinutiaeTable t{{rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(std::min(n, rows.size()))},
                        track_width};
        return t;
    }

    friend bool operator==(const MinutiaeTable& a, const MinutiaeTable& b) { return a.rows == b.rows; }
};

/// Local mean threshold over `block` x `block` tiles; ridge (dark) pixels become 1.
inline BinaryImage binarize_adaptive(const GrayImage& img, int block = 32)
{
    if (block <= 0)
        throw Error("binarization block must be positive");
    BinaryImage out(img.width(), img.height(), 0);
    for (int r0 = 0; r0 < img.height(); r0 += block)
        for (int c0 = 0; c0 < img.width(); c0 += block) {
            const int r1 = std::min(r0 + block, img.height());
            const int c1 = std::min(c0 + block, img.width());
            double sum = 0.0;
            for (int r = r0; r < r1; ++r)
                for (int c = c0; c < c1; ++c)
                    sum += img(r, c);
            const double mean = sum / static_cast<double>((r1 - r0) * (c1 - c0));
            for (int r = r0; r < r1; ++r)
                for (int c = c0; c < c1; ++c)
                    out(r, c) = img(r, c) < mean ? 1 : 0;
        }
    return out;
}

/// Half the number of 0/1 transitions around the 8-neighbourhood of (x, y);
/// neighbours outside the image read as 0.
inline int crossing_number(const Skeleton& skel, int x, int y)
{
    int sum = 0;
    for (int k = 0; k < 8; ++k) {
        const int n = (k + 1) % 8;
        const int a = skel.get_or(y + morph::kRingRow[k], x + morph::kRingCol[k], 0) != 0;
        const int b = skel.get_or(y + morph::kRingRow[n], x + morph::kRingCol[n], 0) != 0;
        sum += std::abs(b - a);
    }
    return sum / 2;
}

namespace detail {

// Crossing numbers of every skeleton pixel (0 elsewhere). Terminations with no
// ridge pixel between them and the nearer border, horizontally or vertically,
// are cleared.
inline Image<std::uint8_t> crossing_map(const Skeleton& skel)
{
    const int h = skel.height();
    const int w = skel.width();
    Image<std::uint8_t> cn(w, h, 0);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            if (!skel(i, j))
                continue;
            int v = crossing_number(skel, j, i);
            if (v == 1) {
                bool ok = false;
                if (2 * (j + 1) <= w) {
                    for (int jj = 0; jj < j && !ok; ++jj)
                        ok = skel(i, jj) != 0;
                } else {
                    for (int jj = j + 1; jj < w && !ok; ++jj)
                        ok = skel(i, jj) != 0;
                }
                if (ok) {
                    ok = false;
                    if (2 * (i + 1) <= h) {
                        for (int ii = 0; ii < i && !ok; ++ii)
                            ok = skel(ii, j) != 0;
                    } else {
                        for (int ii = i + 1; ii < h && !ok; ++ii)
                            ok = skel(ii, j) != 0;
                    }
                }
                if (!ok)
                    v = 0;
            }
            cn(i, j) = static_cast<std::uint8_t>(v);
        }
    return cn;
}

// Traces the ridge starting at (i, j), marking visited pixels, and returns the
// accumulated neighbour count. Tracing stops at a ridge end or right after
// leaving a pixel with exactly two unvisited neighbours, which is restored.
// Visited pixels are then set to `newval`.
inline int trace_ridge(int i, int j, Image<std::uint8_t>& x, std::uint8_t newval)
{
    if (x(i, j) == 0)
        return 0;
    int ret = 0;
    int v = -1;
    int kb = -1;
    while (v != 0 && v != 2) {
        x(i, j) = 2;
        kb = -1;
        int count = 0;
        for (int k = 0; k < 8; ++k)
            if (x.get_or(i + morph::kRingRow[k], j + morph::kRingCol[k], 0) == 1) {
                ++count;
                kb = k;
            }
        v = count;
        ret += v;
        if (kb < 0)
            break;
        i += morph::kRingRow[kb];
        j += morph::kRingCol[kb];
    }
    if (kb >= 0) {
        i -= morph::kRingRow[kb];
        j -= morph::kRingCol[kb];
        x(i, j) = 1;
    }
    for (auto& p : x.pixels())
        if (p == 2)
            p = newval;
    return ret;
}

} // namespace detail

inline constexpr int kMinRidgeLength = 22;
inline constexpr int kBifurcationWindow = 10;

/// Erases ridges shorter than `min_length` that start at a marked termination.
inline Skeleton remove_false_terminations(const Skeleton& skel, const Image<std::uint8_t>& cn,
                                          int min_length = kMinRidgeLength)
{
    Image<std::uint8_t> x = skel;
    for (int i = 0; i < cn.height(); ++i)
        for (int j = 0; j < cn.width(); ++j)
            if (cn(i, j) == 1) {
                const int len = detail::trace_ridge(i, j, x, 1);
                if (len < min_length)
                    detail::trace_ridge(i, j, x, 0);
            }
    return x;
}

/// Clears every bifurcation in any (2s+1)^2 window, fully inside the image,
/// centred on a bifurcation that has at least one other bifurcation in view.
inline void remove_false_bifurcations(Image<std::uint8_t>& cn, int s = kBifurcationWindow)
{
    const int a = cn.height();
    const int b = cn.width();
    for (int i = s; i + s < a; ++i)
        for (int j = s; j + s < b; ++j) {
            if (cn(i, j) != 3)
                continue;
            int count = 0;
            for (int r = i - s; r <= i + s; ++r)
                for (int c = j - s; c <= j + s; ++c)
                    count += cn(r, c) == 3 ? 1 : 0;
            if (count > 1)
                for (int r = i - s; r <= i + s; ++r)
                    for (int c = j - s; c <= j + s; ++c)
                        if (cn(r, c) == 3)
                            cn(r, c) = 0;
        }
}

/// Crossing-number minutiae with structural false-minutia filtering. Results are
/// listed in row-major order.
inline std::vector<Minutia> extract_minutiae(const Skeleton& skel)
{
    const auto pre = morph::spur(morph::hbreak(morph::clean(skel)));
    const auto first = detail::crossing_map(pre);
    const auto pruned = remove_false_terminations(pre, first);
    auto cn = detail::crossing_map(pruned);
    remove_false_bifurcations(cn);
    std::vector<Minutia> out;
    for (int i = 0; i < cn.height(); ++i)
        for (int j = 0; j < cn.width(); ++j)
            if (cn(i, j) == 1 || cn(i, j) == 3)
                out.push_back({j, i, static_cast<MinutiaKind>(cn(i, j))});
    return out;
}

/// Track table of minutiae counts around the core. Row k counts distances in
/// [1 + k w, 1 + (k + 1) w); distances below 1 fall in row 0.
inline MinutiaeTable build_table(const std::vector<Minutia>& minutiae, const CorePoint& core,
                                 int track_width = 10)
{
    if (track_width < 1)
        throw Error("track width must be at least 1");
    MinutiaeTable table;
    table.track_width = track_width;
    if (minutiae.empty())
        return table;
    std::vector<double> dist;
    dist.reserve(minutiae.size());
    double maxd = 0.0;
    for (const auto& m : minutiae) {
        const double dx = m.x - core.x;
        const double dy = m.y - core.y;
        dist.push_back(std::sqrt(dx * dx + dy * dy));
        maxd = std::max(maxd, dist.back());
    }
    const auto rows = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(maxd / track_width)));
    table.rows.assign(rows, {});
    for (std::size_t k = 0; k < minutiae.size(); ++k) {
        const double d = dist[k];
        std::size_t row = 0;
        if (d >= 1.0)
            row = std::min(rows - 1, static_cast<std::size_t>(std::floor((d - 1.0) / track_width)));
        if (minutiae[k].kind == MinutiaKind::termination)
            ++table.rows[row].term;
        else
            ++table.rows[row].bif;
    }
    return table;
}

// ---------------------------------------------------------------------------
// .mtab persistence: one "term<TAB>bif" line per track.
// ---------------------------------------------------------------------------

inline std::string format_mtab(const MinutiaeTable& t)
{
    std::string out;
    for (const auto& r : t.rows)
        out += std::to_string(r.term) + "\t" + std::to_string(r.bif) + "\n";
    return out;
}

inline MinutiaeTable parse_mtab(const std::string& text)
{
    MinutiaeTable t;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::istringstream ls(line);
        long term = -1, bif = -1;
        std::string rest;
        if (!(ls >> term >> bif) || (ls >> rest) || term < 0 || bif < 0 ||
            term > std::numeric_limits<int>::max() || bif > std::numeric_limits<int>::max())
            throw Error("malformed .mtab line " + std::to_string(lineno) + ": '" + line + "'");
        t.rows.push_back({static_cast<int>(term), static_cast<int>(bif)});
    }
    return t;
}

inline MinutiaeTable read_mtab(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return parse_mtab(text);
}

inline void write_mtab(const std::string& path, const MinutiaeTable& t)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw Error("cannot write " + path);
    f << format_mtab(t);
    if (!f)
        throw Error("write failed for " + path);
}

} // namespace minutia
