#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "minutia/matching.hpp"
#include "minutia/minutiae.hpp"
#include "minutia/random.hpp"

namespace minutia {

struct NoiseModel {
    double track_ratio = 0.30;
    int max_salt = 1;
    std::uint64_t seed = 0;

    void validate() const
    {
        if (!(track_ratio >= 0.0 && track_ratio <= 1.0))
            throw Error("track ratio must lie in [0, 1]");
        if (max_salt < 0)
            throw Error("max salt must be non-negative");
    }
};

/// Moves `salt` counts between the two columns of randomly chosen tracks.
inline MinutiaeTable perturb_table(const MinutiaeTable& t, const NoiseModel& model, SplitMix64& rng)
{
    model.validate();
    if (t.empty())
        throw Error("perturb: empty table");
    MinutiaeTable out = t;
    const auto rows = t.size();
    const auto iterations = static_cast<long>(std::lround(model.track_ratio * static_cast<double>(rows)));
    for (long it = 0; it < iterations; ++it) {
        const auto column = rng.randint(2);
        const auto row = static_cast<std::size_t>(rng.randint(rows));
        const auto salt = static_cast<int>(rng.randint(static_cast<std::uint64_t>(model.max_salt) + 1));
        auto& cell = out.rows[row];
        int& added = column == 0 ? cell.term : cell.bif;
        int& removed = column == 0 ? cell.bif : cell.term;
        added = std::max(0, added + salt);
        removed = std::max(0, removed - salt);
    }
    return out;
}

/// Row-major rate matrix over thresholds 1..t1_max x 1..t2_max.
struct RateSurface {
    int t1_max = 0;
    int t2_max = 0;
    std::vector<double> rate;

    RateSurface() = default;
    RateSurface(int a, int b) : t1_max(a), t2_max(b), rate(static_cast<std::size_t>(a) * static_cast<std::size_t>(b), 0.0) {}

    // 1-based threshold indices.
    double& at(int t1, int t2) { return rate[static_cast<std::size_t>((t1 - 1) * t2_max + (t2 - 1))]; }
    double at(int t1, int t2) const { return rate[static_cast<std::size_t>((t1 - 1) * t2_max + (t2 - 1))]; }
};

struct ErrorSurfaces {
    RateSurface frr;
    RateSurface far;
    long ngra = 0;
    long nira = 0;
};

struct ScoreSample {
    double gm1;
    double gm2;
};

struct ProtocolScores {
    std::vector<ScoreSample> genuine;
    std::vector<ScoreSample> impostor;
};

/// Genuine and impostor score pairs for every stored print used as a noisy probe.
/// Probe k draws from SplitMix64(seed ^ k), so the result does not depend on `jobs`.
inline ProtocolScores collect_scores(const std::vector<Template>& store, const NoiseModel& model,
                                     std::optional<std::size_t> rows = std::nullopt, int jobs = 1)
{
    model.validate();
    std::vector<std::string> fingers;
    for (const auto& t : store)
        if (std::find(fingers.begin(), fingers.end(), t.finger_id) == fingers.end())
            fingers.push_back(t.finger_id);
    if (fingers.size() < 2)
        throw Error("evaluation needs at least two fingers");

    std::size_t m = rows.value_or(std::numeric_limits<std::size_t>::max());
    for (const auto& t : store)
        m = std::min(m, t.table.size());
    if (m == 0)
        throw Error("evaluation: store contains an empty table");

    std::vector<std::vector<MinutiaeTable>> galleries(fingers.size());
    std::vector<std::size_t> finger_of(store.size());
    for (std::size_t k = 0; k < store.size(); ++k) {
        const auto f = static_cast<std::size_t>(
            std::find(fingers.begin(), fingers.end(), store[k].finger_id) - fingers.begin());
        finger_of[k] = f;
        galleries[f].push_back(store[k].table.truncated(m));
    }

    const std::size_t nf = fingers.size();
    std::vector<ScoreSample> genuine(store.size());
    std::vector<ScoreSample> impostor(store.size() * (nf - 1));
    auto work = [&](std::size_t k) {
        SplitMix64 rng(model.seed ^ static_cast<std::uint64_t>(k));
        const auto probe = perturb_table(store[k].table.truncated(m), model, rng);
        const auto f = finger_of[k];
        const auto g = score(probe, galleries[f]);
        genuine[k] = {g.gm1, g.gm2};
        std::size_t slot = k * (nf - 1);
        for (std::size_t o = 0; o < nf; ++o) {
            if (o == f)
                continue;
            const auto s = score(probe, galleries[o]);
            impostor[slot++] = {s.gm1, s.gm2};
        }
    };

    jobs = std::max(1, jobs);
    if (jobs == 1) {
        for (std::size_t k = 0; k < store.size(); ++k)
            work(k);
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j)
            pool.emplace_back([&, j] {
                for (std::size_t k = static_cast<std::size_t>(j); k < store.size(); k += static_cast<std::size_t>(jobs))
                    work(k);
            });
        for (auto& t : pool)
            t.join();
    }
    return {std::move(genuine), std::move(impostor)};
}

inline ErrorSurfaces build_surfaces(const ProtocolScores& scores, int t1_max = 70, int t2_max = 70)
{
    if (t1_max < 1 || t2_max < 1)
        throw Error("threshold grid must be non-empty");
    ErrorSurfaces s{RateSurface(t1_max, t2_max), RateSurface(t1_max, t2_max),
                    static_cast<long>(scores.genuine.size()), static_cast<long>(scores.impostor.size())};
    for (int t1 = 1; t1 <= t1_max; ++t1)
        for (int t2 = 1; t2 <= t2_max; ++t2) {
            long rejected = 0;
            for (const auto& g : scores.genuine)
                rejected += (g.gm1 > t1 || g.gm2 > t2) ? 1 : 0;
            long accepted = 0;
            for (const auto& g : scores.impostor)
                accepted += (g.gm1 <= t1 && g.gm2 <= t2) ? 1 : 0;
            s.frr.at(t1, t2) = s.ngra ? static_cast<double>(rejected) / static_cast<double>(s.ngra) : 0.0;
            s.far.at(t1, t2) = s.nira ? static_cast<double>(accepted) / static_cast<double>(s.nira) : 0.0;
        }
    return s;
}

inline ErrorSurfaces run_protocol(const std::vector<Template>& store, const NoiseModel& model,
                                  int t1_max = 70, int t2_max = 70,
                                  std::optional<std::size_t> rows = std::nullopt, int jobs = 1)
{
    return build_surfaces(collect_scores(store, model, rows, jobs), t1_max, t2_max);
}

struct EerReport {
    double eer = 0.0;
    double t1_real = 0.0;
    double t2_real = 0.0;
    int t1_int = 1;
    int t2_int = 1;
    double far_at_int = 0.0;
    double frr_at_int = 0.0;
    double zero_fmr = 1.0;
    int zero_fmr_t1 = 0;
    int zero_fmr_t2 = 0;
    double zero_fnmr = 1.0;
    int zero_fnmr_t1 = 0;
    int zero_fnmr_t2 = 0;
    double chi_square = 0.0;
    bool contour_found = true;
};

namespace detail {

// Bilinear interpolation of a surface at real thresholds inside the grid.
inline double bilinear(const RateSurface& s, double t1, double t2)
{
    t1 = std::clamp(t1, 1.0, static_cast<double>(s.t1_max));
    t2 = std::clamp(t2, 1.0, static_cast<double>(s.t2_max));
    const int i0 = std::min(static_cast<int>(std::floor(t1)), s.t1_max);
    const int j0 = std::min(static_cast<int>(std::floor(t2)), s.t2_max);
    const int i1 = std::min(i0 + 1, s.t1_max);
    const int j1 = std::min(j0 + 1, s.t2_max);
    const double a = t1 - i0;
    const double b = t2 - j0;
    return (1 - a) * (1 - b) * s.at(i0, j0) + a * (1 - b) * s.at(i1, j0) + (1 - a) * b * s.at(i0, j1) +
           a * b * s.at(i1, j1);
}

} // namespace detail

/// Equal-error analysis of FAR/FRR surfaces: the zero contour of FAR - FRR is
/// traced cell by cell with linear edge interpolation and the EER is the
/// smallest interpolated FAR along it.
inline EerReport eer_report(const ErrorSurfaces& s)
{
    const int n1 = s.far.t1_max;
    const int n2 = s.far.t2_max;
    if (n1 < 1 || n2 < 1 || s.frr.t1_max != n1 || s.frr.t2_max != n2)
        throw Error("eer: surfaces empty or mismatched");
    auto diff = [&](int a, int b) { return s.far.at(a, b) - s.frr.at(a, b); };

    EerReport rep;
    double best = std::numeric_limits<double>::infinity();
    auto consider = [&](double t1, double t2) {
        const double v = detail::bilinear(s.far, t1, t2);
        if (v < best) {
            best = v;
            rep.t1_real = t1;
            rep.t2_real = t2;
        }
    };

    // Grid points lying exactly on the contour.
    for (int a = 1; a <= n1; ++a)
        for (int b = 1; b <= n2; ++b)
            if (diff(a, b) == 0.0)
                consider(a, b);
    // Sign changes along grid edges (the vertices of marching-squares segments).
    auto edge = [&](int a0, int b0, int a1, int b1) {
        const double d0 = diff(a0, b0);
        const double d1 = diff(a1, b1);
        if ((d0 < 0 && d1 > 0) || (d0 > 0 && d1 < 0)) {
            const double t = d0 / (d0 - d1);
            consider(a0 + t * (a1 - a0), b0 + t * (b1 - b0));
        }
    };
    for (int a = 1; a <= n1; ++a)
        for (int b = 1; b <= n2; ++b) {
            if (a < n1)
                edge(a, b, a + 1, b);
            if (b < n2)
                edge(a, b, a, b + 1);
        }

    if (std::isfinite(best)) {
        rep.eer = best;
        double gap = std::numeric_limits<double>::infinity();
        const int f1 = static_cast<int>(std::floor(rep.t1_real));
        const int f2 = static_cast<int>(std::floor(rep.t2_real));
        for (int a : {f1, static_cast<int>(std::ceil(rep.t1_real))})
            for (int b : {f2, static_cast<int>(std::ceil(rep.t2_real))}) {
                const int ca = std::clamp(a, 1, n1);
                const int cb = std::clamp(b, 1, n2);
                const double g = std::abs(diff(ca, cb));
                if (g < gap) {
                    gap = g;
                    rep.t1_int = ca;
                    rep.t2_int = cb;
                }
            }
    } else {
        rep.contour_found = false;
        double gap = std::numeric_limits<double>::infinity();
        for (int a = 1; a <= n1; ++a)
            for (int b = 1; b <= n2; ++b)
                if (std::abs(diff(a, b)) < gap) {
                    gap = std::abs(diff(a, b));
                    rep.t1_int = a;
                    rep.t2_int = b;
                }
        rep.t1_real = rep.t1_int;
        rep.t2_real = rep.t2_int;
        rep.eer = 0.5 * (s.far.at(rep.t1_int, rep.t2_int) + s.frr.at(rep.t1_int, rep.t2_int));
    }
    rep.far_at_int = s.far.at(rep.t1_int, rep.t2_int);
    rep.frr_at_int = s.frr.at(rep.t1_int, rep.t2_int);

    for (int a = 1; a <= n1; ++a)
        for (int b = 1; b <= n2; ++b) {
            if (s.far.at(a, b) == 0.0 && s.frr.at(a, b) < rep.zero_fmr) {
                rep.zero_fmr = s.frr.at(a, b);
                rep.zero_fmr_t1 = a;
                rep.zero_fmr_t2 = b;
            }
            if (s.frr.at(a, b) == 0.0 && s.far.at(a, b) < rep.zero_fnmr) {
                rep.zero_fnmr = s.far.at(a, b);
                rep.zero_fnmr_t1 = a;
                rep.zero_fnmr_t2 = b;
            }
        }
    rep.chi_square = 2.0 * rep.eer * rep.eer;
    return rep;
}

struct RocPoint {
    int t1 = 0;
    double far = 0.0;
    double frr = 0.0;
    double log_far = 0.0; // log10(100 * far)
    double log_frr = 0.0;
};

/// ROC points for one t2 column, skipping cells where either rate is zero.
inline std::vector<RocPoint> emit_roc(const ErrorSurfaces& s, int t2)
{
    if (t2 < 1 || t2 > s.far.t2_max)
        throw Error("roc column out of range");
    std::vector<RocPoint> out;
    for (int t1 = 1; t1 <= s.far.t1_max; ++t1) {
        const double fa = s.far.at(t1, t2);
        const double fr = s.frr.at(t1, t2);
        if (fa <= 0.0 || fr <= 0.0)
            continue;
        out.push_back({t1, fa, fr, std::log10(100.0 * fa), std::log10(100.0 * fr)});
    }
    return out;
}

inline std::string surface_csv(const RateSurface& s)
{
    std::string out = "t1,t2,rate\n";
    char buf[64];
    for (int a = 1; a <= s.t1_max; ++a)
        for (int b = 1; b <= s.t2_max; ++b) {
            std::snprintf(buf, sizeof buf, "%d,%d,%.10g\n", a, b, s.at(a, b));
            out += buf;
        }
    return out;
}

inline std::string roc_csv(const std::vector<RocPoint>& pts)
{
    std::string out = "t1,far,frr,log_far,log_frr\n";
    char buf[160];
    for (const auto& p : pts) {
        std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.10g,%.10g\n", p.t1, p.far, p.frr, p.log_far,
                      p.log_frr);
        out += buf;
    }
    return out;
}

} // namespace minutia
