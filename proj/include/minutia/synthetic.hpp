#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "minutia/image.hpp"
#include "minutia/matching.hpp"
#include "minutia/minutiae.hpp"
#include "minutia/random.hpp"

// Generators for fingerprint-like test imagery and template stores.

namespace minutia::synth {

/// Sinusoidal stripes whose ridges run at angle `theta` (counter-clockwise from
/// the horizontal, y axis up). Dark ridges sit where the cosine is -1.
inline GrayImage grating(int width, int height, double theta, double period, double phase = 0.0,
                         double mean = 128.0, double amplitude = 100.0)
{
    GrayImage img(width, height);
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    for (int r = 0; r < height; ++r)
        for (int x = 0; x < width; ++x) {
            const double y_up = -static_cast<double>(r);
            const double t = -x * s + y_up * c;
            img(r, x) = quantize(mean + amplitude * std::cos(2.0 * std::numbers::pi * t / period + phase));
        }
    return img;
}

/// Ridge phase of a loop: concentric arcs above the centre, vertical lines below.
inline double loop_phase(double x, double y, double cx, double cy, double period)
{
    const double d = y < cy ? std::hypot(x - cx, y - cy) : std::abs(x - cx);
    return 2.0 * std::numbers::pi * d / period;
}

inline GrayImage loop_pattern(int width, int height, double cx, double cy, double period,
                              double mean = 128.0, double amplitude = 100.0)
{
    GrayImage img(width, height);
    for (int r = 0; r < height; ++r)
        for (int x = 0; x < width; ++x)
            img(r, x) = quantize(mean + amplitude * std::cos(loop_phase(x, r, cx, cy, period)));
    return img;
}

/// A vertical gap cut into one ridge of the loop's lower half.
struct RidgeBreak {
    int ridge = 0; // signed ridge index: ridge k lies at cx + period * (k + 1/2)
    int row = 0;   // gap centre row
    int half_gap = 6;
};

struct FingerprintSpec {
    int width = 256;
    int height = 256;
    double cx = 128;
    double cy = 110;
    double period = 9.0;
    double rx = 96; // elliptical print region radii
    double ry = 112;
    double ex = 128; // ellipse centre
    double ey = 128;
    double noise_sigma = 0.0;
    double ridge_level = 40.0;
    double valley_level = 215.0;
    std::uint64_t seed = 1;
    std::vector<RidgeBreak> breaks;
};

/// Loop-type print inside an ellipse on a white background.
inline GrayImage fingerprint(const FingerprintSpec& spec)
{
    GrayImage img(spec.width, spec.height, 255);
    SplitMix64 rng(spec.seed);
    const double mean = 0.5 * (spec.ridge_level + spec.valley_level);
    const double amp = 0.5 * (spec.valley_level - spec.ridge_level);
    for (int r = 0; r < spec.height; ++r)
        for (int x = 0; x < spec.width; ++x) {
            const double u = (x - spec.ex) / spec.rx;
            const double v = (r - spec.ey) / spec.ry;
            if (u * u + v * v > 1.0)
                continue;
            double value = mean + amp * std::cos(loop_phase(x, r, spec.cx, spec.cy, spec.period));
            for (const auto& b : spec.breaks) {
                const double x0 = spec.cx + spec.period * (b.ridge + 0.5);
                if (r >= spec.cy && std::abs(r - b.row) <= b.half_gap &&
                    std::abs(x - x0) < 0.5 * spec.period)
                    value = spec.valley_level;
            }
            if (spec.noise_sigma > 0)
                value += spec.noise_sigma * rng.normal();
            img(r, x) = quantize(value);
        }
    return img;
}

/// Random fingerprint-like image with varied geometry.
inline GrayImage random_fingerprint(int width, int height, SplitMix64& rng)
{
    FingerprintSpec s;
    s.width = width;
    s.height = height;
    s.ex = width * (0.45 + 0.1 * rng.uniform01());
    s.ey = height * (0.45 + 0.1 * rng.uniform01());
    s.rx = width * (0.32 + 0.1 * rng.uniform01());
    s.ry = height * (0.38 + 0.1 * rng.uniform01());
    s.cx = s.ex + (rng.uniform01() - 0.5) * width * 0.1;
    s.cy = s.ey - height * (0.05 + 0.1 * rng.uniform01());
    s.period = 7.0 + 4.0 * rng.uniform01();
    s.ridge_level = 30.0 + 40.0 * rng.uniform01();
    s.valley_level = 190.0 + 40.0 * rng.uniform01();
    s.noise_sigma = 4.0 * rng.uniform01();
    s.seed = rng();
    return fingerprint(s);
}

struct StoreSpec {
    int fingers = 20;
    int prints = 3;
    int rows = 14;
    int max_count = 6;   // base table cells drawn from 0..max_count
    int print_noise = 1; // count moves applied to each print
    int min_separation = 0; // minimum L1 distance between base tables, per column
    std::uint64_t seed = 7;
};

/// Tables of `fingers` x `prints`; each print is its finger's base table with a
/// few single-count changes.
inline std::vector<Template> random_store(const StoreSpec& spec)
{
    SplitMix64 rng(spec.seed);
    const auto rows = static_cast<std::size_t>(spec.rows);
    auto l1 = [](const MinutiaeTable& a, const MinutiaeTable& b, bool term) {
        int d = 0;
        for (std::size_t k = 0; k < a.size(); ++k)
            d += std::abs(term ? a.rows[k].term - b.rows[k].term : a.rows[k].bif - b.rows[k].bif);
        return d;
    };
    std::vector<MinutiaeTable> bases;
    int attempts = 0;
    while (static_cast<int>(bases.size()) < spec.fingers) {
        if (++attempts > 100000)
            throw Error("cannot satisfy the requested finger separation");
        MinutiaeTable t;
        t.rows.resize(rows);
        for (auto& r : t.rows) {
            r.term = static_cast<int>(rng.randint(static_cast<std::uint64_t>(spec.max_count) + 1));
            r.bif = static_cast<int>(rng.randint(static_cast<std::uint64_t>(spec.max_count) + 1));
        }
        bool ok = true;
        for (const auto& b : bases)
            ok = ok && l1(t, b, true) >= spec.min_separation && l1(t, b, false) >= spec.min_separation;
        if (ok)
            bases.push_back(std::move(t));
    }
    std::vector<Template> store;
    for (int f = 0; f < spec.fingers; ++f)
        for (int p = 1; p <= spec.prints; ++p) {
            MinutiaeTable t = bases[static_cast<std::size_t>(f)];
            for (int n = 0; n < spec.print_noise; ++n) {
                const auto k = static_cast<std::size_t>(rng.randint(rows));
                auto& cell = t.rows[k];
                int& v = rng.randint(2) == 0 ? cell.term : cell.bif;
                if (rng.randint(2) == 0)
                    ++v;
                else
                    v = std::max(0, v - 1);
            }
            char id[16];
            std::snprintf(id, sizeof id, "%03d", 101 + f);
            store.push_back({id, p, std::move(t)});
        }
    return store;
}

} // namespace minutia::synth
