#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "minutia/corepoint.hpp"
#include "minutia/enhance.hpp"
#include "minutia/minutiae.hpp"
#include "minutia/thinning.hpp"

namespace minutia {

struct Template {
    std::string finger_id;
    int print_no = 0;
    MinutiaeTable table;
};

struct MatchScore {
    double gm1 = 0.0;
    double gm2 = 0.0;
    std::vector<int> s1; // per gallery print, before flooring
    std::vector<int> s2;
};

struct Thresholds {
    double t1 = 17.0;
    double t2 = 8.0;
};

enum class Decision { accept, reject };

inline const char* to_string(Decision d) noexcept
{
    return d == Decision::accept ? "ACCEPT" : "REJECT";
}

/// Smallest per-print column sum entering the geometric mean.
inline constexpr int kSumFloor = 2;

/// Geometric means of per-print absolute column differences. All tables are cut
/// to the smallest row count among probe and gallery, or to `rows` if given.
inline MatchScore score(const MinutiaeTable& probe, const std::vector<MinutiaeTable>& gallery,
                        std::optional<std::size_t> rows = std::nullopt)
{
    if (gallery.empty())
        throw Error("score: empty gallery");
    std::size_t m = probe.size();
    for (const auto& g : gallery)
        m = std::min(m, g.size());
    if (rows)
        m = std::min(m, *rows);
    if (m == 0)
        throw Error("score: no rows to compare");

    MatchScore s;
    double log1 = 0.0, log2 = 0.0;
    for (const auto& g : gallery) {
        int a = 0, b = 0;
        for (std::size_t k = 0; k < m; ++k) {
            a += std::abs(probe.rows[k].term - g.rows[k].term);
            b += std::abs(probe.rows[k].bif - g.rows[k].bif);
        }
        s.s1.push_back(a);
        s.s2.push_back(b);
        log1 += std::log(static_cast<double>(std::max(a, kSumFloor)));
        log2 += std::log(static_cast<double>(std::max(b, kSumFloor)));
    }
    const auto n = static_cast<double>(gallery.size());
    s.gm1 = std::exp(log1 / n);
    s.gm2 = std::exp(log2 / n);
    return s;
}

inline Decision verify(const MatchScore& s, const Thresholds& thr)
{
    return s.gm1 <= thr.t1 && s.gm2 <= thr.t2 ? Decision::accept : Decision::reject;
}

struct EnrollOptions {
    EnhanceParams enhance;
    CoreParams core;
    ThinAlgorithm thinner = ThinAlgorithm::gray;
    int track_width = 10;
    int binarize_block = 32;
};

/// Intermediate products of one enrollment, for inspection.
struct EnrollTrace {
    EnhanceResult enhanced;
    CorePoint core;
    Skeleton skeleton;
    std::vector<Minutia> minutiae;
    MinutiaeTable table;
};

inline Skeleton thin_enhanced(const GrayImage& enhanced, ThinAlgorithm algo, int binarize_block = 32)
{
    if (algo == ThinAlgorithm::gray)
        return skeletonize_gray(enhanced);
    return thin_binary_baseline(binarize_adaptive(enhanced, binarize_block));
}

/// Enhancement, core detection, thinning, minutiae extraction and tabulation.
/// Throws Error on failure to enroll.
inline EnrollTrace enroll_trace(const GrayImage& img, const EnrollOptions& opt = {})
{
    EnrollTrace t;
    t.enhanced = stft_enhance(img, opt.enhance);
    if (morph::count_ones(t.enhanced.mask) == 0)
        throw Error("failure to enroll: no foreground");
    t.core = complex_core(t.enhanced.image, opt.core);
    t.skeleton = thin_enhanced(t.enhanced.image, opt.thinner, opt.binarize_block);
    // Ridges outside the recoverable region are background artefacts.
    for (int r = 0; r < t.skeleton.height(); ++r)
        for (int c = 0; c < t.skeleton.width(); ++c)
            if (!t.enhanced.mask(r, c))
                t.skeleton(r, c) = 0;
    t.minutiae = extract_minutiae(t.skeleton);
    if (t.minutiae.empty())
        throw Error("failure to enroll: no minutiae");
    t.table = build_table(t.minutiae, t.core, opt.track_width);
    return t;
}

inline MinutiaeTable enroll(const GrayImage& img, const EnrollOptions& opt = {})
{
    return enroll_trace(img, opt).table;
}

// ---------------------------------------------------------------------------
// Template store: a directory of <finger>_<print>.mtab files.
// ---------------------------------------------------------------------------

inline constexpr const char* kStoreEnv = "MINUTIA_STORE";

/// Store path from the environment if set, else `fallback`.
inline std::string resolve_store_path(const std::string& fallback)
{
    if (const char* env = std::getenv(kStoreEnv); env && *env)
        return env;
    return fallback;
}

inline std::string mtab_filename(const std::string& finger_id, int print_no)
{
    return finger_id + "_" + std::to_string(print_no) + ".mtab";
}

class TemplateStore {
public:
    explicit TemplateStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

    const std::filesystem::path& path() const noexcept { return dir_; }

    void put(const Template& t) const
    {
        if (t.finger_id.empty() || t.finger_id.find_first_of("/\\_") != std::string::npos)
            throw Error("invalid finger id '" + t.finger_id + "'");
        std::filesystem::create_directories(dir_);
        write_mtab((dir_ / mtab_filename(t.finger_id, t.print_no)).string(), t.table);
    }

    /// All templates ordered by finger id, then print number.
    std::vector<Template> load_all() const
    {
        std::vector<Template> out;
        if (!std::filesystem::is_directory(dir_))
            throw Error("template store not found: " + dir_.string());
        static const std::regex name(R"(([^_/\\]+)_(\d+)\.mtab)");
        for (const auto& e : std::filesystem::directory_iterator(dir_)) {
            if (!e.is_regular_file())
                continue;
            const auto fname = e.path().filename().string();
            std::smatch m;
            if (!std::regex_match(fname, m, name))
                continue;
            out.push_back({m[1].str(), std::stoi(m[2].str()), read_mtab(e.path().string())});
        }
        std::sort(out.begin(), out.end(), [](const Template& a, const Template& b) {
            return a.finger_id != b.finger_id ? a.finger_id < b.finger_id : a.print_no < b.print_no;
        });
        return out;
    }

    std::vector<MinutiaeTable> gallery(const std::string& finger_id) const
    {
        std::vector<MinutiaeTable> g;
        for (auto& t : load_all())
            if (t.finger_id == finger_id)
                g.push_back(std::move(t.table));
        if (g.empty())
            throw Error("unknown claim '" + finger_id + "'");
        return g;
    }

    /// Smallest row count over every stored table.
    std::size_t global_min_rows() const
    {
        const auto all = load_all();
        if (all.empty())
            throw Error("template store is empty");
        std::size_t m = all.front().table.size();
        for (const auto& t : all)
            m = std::min(m, t.table.size());
        return m;
    }

private:
    std::filesystem::path dir_;
};

} // namespace minutia
