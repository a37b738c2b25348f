#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "minutia/minutia.hpp"

namespace fs = std::filesystem;
using namespace minutia;

namespace {

std::uint64_t parse_key(const std::string& s)
{
    std::string_view v = s;
    int base = 10;
    if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) {
        v.remove_prefix(2);
        base = 16;
    }
    std::uint64_t out = 0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out, base);
    if (v.empty() || ec != std::errc() || end != v.data() + v.size())
        throw CLI::ValidationError("key", "'" + s + "' is not a 64-bit decimal or 0x-hex value");
    return out;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw Error("cannot write " + path.string());
    f << text;
}

GrayImage skeleton_image(const Skeleton& s)
{
    GrayImage out(s.width(), s.height(), 255);
    for (int r = 0; r < s.height(); ++r)
        for (int c = 0; c < s.width(); ++c)
            if (s(r, c))
                out(r, c) = 0;
    return out;
}

GrayImage mask_image(const BinaryImage& m)
{
    GrayImage out(m.width(), m.height(), 0);
    for (int r = 0; r < m.height(); ++r)
        for (int c = 0; c < m.width(); ++c)
            if (m(r, c))
                out(r, c) = 255;
    return out;
}

bool is_mtab(const std::string& path) { return fs::path(path).extension() == ".mtab"; }

struct KeyOptions {
    std::string key1 = std::to_string(EmbedParams{}.key1);
    std::string key2 = std::to_string(EmbedParams{}.key2);
};

void add_embed_options(CLI::App* cmd, EmbedParams& p, KeyOptions& k)
{
    cmd->add_option("--key1", k.key1, "bit permutation key (decimal or 0x hex)")->capture_default_str();
    cmd->add_option("--key2", k.key2, "pixel location key (decimal or 0x hex)")->capture_default_str();
    cmd->add_option("--rho", p.rho, "embedding density")->capture_default_str();
    cmd->add_option("--q", p.q, "embedding strength")->capture_default_str();
    cmd->add_option("--A", p.A, "standard deviation weight")->capture_default_str();
    cmd->add_option("--B", p.B, "gradient weight")->capture_default_str();
}

void add_enhance_options(CLI::App* cmd, EnhanceParams& p)
{
    cmd->add_option("--block", p.block_size, "analysis block size")->capture_default_str();
    cmd->add_option("--overlap", p.overlap, "block overlap")->capture_default_str();
    cmd->add_option("--percentile", p.energy_threshold_percentile, "energy percentile for the mask")
        ->capture_default_str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Fingerprint minutiae tables, matching, evaluation and watermarking"};
    app.require_subcommand(1);

    EnrollOptions enroll_opt;
    std::string algo = "gray";
    auto add_pipeline = [&](CLI::App* cmd) {
        add_enhance_options(cmd, enroll_opt.enhance);
        cmd->add_option("--algo", algo, "thinner: gray or baseline")
            ->check(CLI::IsMember({"gray", "baseline"}))
            ->capture_default_str();
        cmd->add_option("--track-width", enroll_opt.track_width, "track width in pixels")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    };
    std::string store_dir = "templates";
    bool store_given = false;
    auto add_store = [&](CLI::App* cmd) {
        cmd->add_option("--store", store_dir, "template store directory (MINUTIA_STORE when omitted)")
            ->each([&](const std::string&) { store_given = true; });
    };
    auto store_path = [&] { return store_given ? store_dir : resolve_store_path(store_dir); };

    std::string in, out;

    // enhance
    std::string mask_out;
    auto* enhance_cmd = app.add_subcommand("enhance", "STFT contextual enhancement");
    enhance_cmd->add_option("input", in, "input PGM")->required()->check(CLI::ExistingFile);
    enhance_cmd->add_option("output", out, "enhanced PGM")->required();
    enhance_cmd->add_option("--mask", mask_out, "write the region mask as PGM");
    add_enhance_options(enhance_cmd, enroll_opt.enhance);

    // core
    bool core_raw = false;
    auto* core_cmd = app.add_subcommand("core", "core point of a print");
    core_cmd->add_option("input", in, "input PGM")->required()->check(CLI::ExistingFile);
    core_cmd->add_flag("--raw", core_raw, "input is already enhanced");
    add_enhance_options(core_cmd, enroll_opt.enhance);

    // thin
    auto* thin_cmd = app.add_subcommand("thin", "skeleton of an enhanced print (ridges drawn black)");
    thin_cmd->add_option("input", in, "enhanced PGM")->required()->check(CLI::ExistingFile);
    thin_cmd->add_option("output", out, "skeleton PGM")->required();
    thin_cmd->add_option("--algo", algo, "thinner: gray or baseline")
        ->check(CLI::IsMember({"gray", "baseline"}))
        ->capture_default_str();

    // minutiae
    std::string table_out;
    auto* minutiae_cmd = app.add_subcommand("minutiae", "minutiae list and track table of a print");
    minutiae_cmd->add_option("input", in, "input PGM")->required()->check(CLI::ExistingFile);
    minutiae_cmd->add_option("--table", table_out, "write the track table (.mtab)");
    add_pipeline(minutiae_cmd);

    // enroll
    std::string finger;
    int print_no = 1;
    auto* enroll_cmd = app.add_subcommand("enroll", "add a print's table to the template store");
    enroll_cmd->add_option("input", in, "input PGM or .mtab")->required()->check(CLI::ExistingFile);
    enroll_cmd->add_option("--finger", finger, "finger id")->required();
    enroll_cmd->add_option("--print", print_no, "print number")->check(CLI::NonNegativeNumber)->capture_default_str();
    add_store(enroll_cmd);
    add_pipeline(enroll_cmd);

    // verify
    std::string claim;
    Thresholds thr;
    bool global_min_rows = false;
    auto* verify_cmd = app.add_subcommand("verify", "match a print against a claimed finger");
    verify_cmd->add_option("input", in, "probe PGM or .mtab")->required()->check(CLI::ExistingFile);
    verify_cmd->add_option("--claim", claim, "claimed finger id")->required();
    verify_cmd->add_option("--t1", thr.t1, "termination threshold")->capture_default_str();
    verify_cmd->add_option("--t2", thr.t2, "bifurcation threshold")->capture_default_str();
    verify_cmd->add_flag("--global-min-rows", global_min_rows,
                         "cut tables to the smallest row count in the whole store");
    add_store(verify_cmd);
    add_pipeline(verify_cmd);

    // evaluate
    NoiseModel model;
    int jobs = 1, t1_max = 70, t2_max = 70, roc_t2 = 8, synth_fingers = 0;
    std::string out_dir = ".";
    auto* evaluate_cmd = app.add_subcommand("evaluate", "FAR/FRR surfaces, EER and ROC over a store");
    add_store(evaluate_cmd);
    evaluate_cmd->add_option("--synthetic", synth_fingers, "use a generated store with this many fingers")
        ->check(CLI::PositiveNumber);
    evaluate_cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
    evaluate_cmd->add_option("--seed", model.seed, "noise seed")->capture_default_str();
    evaluate_cmd->add_option("--track-ratio", model.track_ratio, "fraction of tracks perturbed")
        ->capture_default_str();
    evaluate_cmd->add_option("--salt", model.max_salt, "largest count moved per draw")->capture_default_str();
    evaluate_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    evaluate_cmd->add_option("--t1-max", t1_max, "largest t1 on the grid")->check(CLI::PositiveNumber)
        ->capture_default_str();
    evaluate_cmd->add_option("--t2-max", t2_max, "largest t2 on the grid")->check(CLI::PositiveNumber)
        ->capture_default_str();
    evaluate_cmd->add_option("--roc-t2", roc_t2, "t2 column for the ROC")->check(CLI::PositiveNumber)
        ->capture_default_str();

    // embed / extract / attack
    EmbedParams wm;
    KeyOptions keys;
    std::string table_in;
    auto* embed_cmd = app.add_subcommand("embed", "hide a minutiae table in a print");
    embed_cmd->add_option("input", in, "host PGM")->required()->check(CLI::ExistingFile);
    embed_cmd->add_option("output", out, "watermarked PGM")->required();
    embed_cmd->add_option("--table", table_in, "table to hide (.mtab)")->required()->check(CLI::ExistingFile);
    add_embed_options(embed_cmd, wm, keys);

    int rows = 0;
    std::string host_out;
    auto* extract_cmd = app.add_subcommand("extract", "recover a hidden table");
    extract_cmd->add_option("input", in, "watermarked PGM")->required()->check(CLI::ExistingFile);
    extract_cmd->add_option("--rows", rows, "rows in the hidden table")->required()->check(CLI::PositiveNumber);
    extract_cmd->add_option("--table", table_out, "write the table here instead of stdout");
    extract_cmd->add_option("--reconstruct", host_out, "write the estimated host image");
    add_embed_options(extract_cmd, wm, keys);

    std::string kind = "gaussian";
    AttackParams ap;
    auto* attack_cmd = app.add_subcommand("attack", "degrade an image");
    attack_cmd->add_option("input", in, "input PGM")->required()->check(CLI::ExistingFile);
    attack_cmd->add_option("output", out, "attacked PGM")->required();
    attack_cmd->add_option("--kind", kind, "gaussian, median, trimmed or wiener")
        ->check(CLI::IsMember({"gaussian", "median", "trimmed", "trimmed_mean", "wiener"}))
        ->capture_default_str();
    attack_cmd->add_option("--sigma", ap.sigma, "noise sigma")->capture_default_str();
    attack_cmd->add_option("--k", ap.k, "filter size")->capture_default_str();
    attack_cmd->add_option("--trim", ap.trim, "samples trimmed from each end")->capture_default_str();
    attack_cmd->add_option("--seed", ap.seed, "noise seed")->capture_default_str();

    try {
        app.parse(argc, argv);
        if (!keys.key1.empty())
            wm.key1 = parse_key(keys.key1);
        if (!keys.key2.empty())
            wm.key2 = parse_key(keys.key2);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    enroll_opt.thinner = parse_thin_algorithm(algo);

    auto table_of = [&](const std::string& path) {
        return is_mtab(path) ? read_mtab(path) : enroll(read_pgm_file(path), enroll_opt);
    };

    try {
        if (*enhance_cmd) {
            const auto r = stft_enhance(read_pgm_file(in), enroll_opt.enhance);
            write_pgm_file(out, r.image);
            if (!mask_out.empty())
                write_pgm_file(mask_out, mask_image(r.mask));
        } else if (*core_cmd) {
            auto img = read_pgm_file(in);
            if (!core_raw)
                img = stft_enhance(img, enroll_opt.enhance).image;
            const auto c = complex_core(img, enroll_opt.core);
            std::printf("%d %d\n", c.x, c.y);
        } else if (*thin_cmd) {
            write_pgm_file(out, skeleton_image(thin_enhanced(read_pgm_file(in), parse_thin_algorithm(algo))));
        } else if (*minutiae_cmd) {
            const auto t = enroll_trace(read_pgm_file(in), enroll_opt);
            std::printf("core %d %d\n", t.core.x, t.core.y);
            for (const auto& m : t.minutiae)
                std::printf("%d %d %s\n", m.x, m.y,
                            m.kind == MinutiaKind::termination ? "termination" : "bifurcation");
            if (!table_out.empty())
                write_mtab(table_out, t.table);
        } else if (*enroll_cmd) {
            TemplateStore store(store_path());
            store.put({finger, print_no, table_of(in)});
            std::printf("%s\n", (store.path() / mtab_filename(finger, print_no)).string().c_str());
        } else if (*verify_cmd) {
            TemplateStore store(store_path());
            const auto gallery = store.gallery(claim);
            const auto probe = table_of(in);
            std::optional<std::size_t> cut;
            if (global_min_rows)
                cut = std::min(store.global_min_rows(), probe.size());
            const auto s = score(probe, gallery, cut);
            std::printf("%s gm1=%.2f gm2=%.2f\n", to_string(verify(s, thr)), s.gm1, s.gm2);
        } else if (*evaluate_cmd) {
            const auto start = std::chrono::steady_clock::now();
            std::vector<Template> templates;
            if (synth_fingers > 0) {
                synth::StoreSpec spec;
                spec.fingers = synth_fingers;
                spec.seed = model.seed;
                templates = synth::random_store(spec);
            } else {
                templates = TemplateStore(store_path()).load_all();
            }
            const auto surfaces = run_protocol(templates, model, t1_max, t2_max, std::nullopt, jobs);
            const auto rep = eer_report(surfaces);
            if (roc_t2 > t2_max)
                throw Error("--roc-t2 exceeds --t2-max");
            fs::create_directories(out_dir);
            write_text(fs::path(out_dir) / "far_surface.csv", surface_csv(surfaces.far));
            write_text(fs::path(out_dir) / "frr_surface.csv", surface_csv(surfaces.frr));
            write_text(fs::path(out_dir) / "roc.csv", roc_csv(emit_roc(surfaces, roc_t2)));
            nlohmann::ordered_json j;
            j["templates"] = templates.size();
            j["ngra"] = surfaces.ngra;
            j["nira"] = surfaces.nira;
            j["seed"] = model.seed;
            j["track_ratio"] = model.track_ratio;
            j["max_salt"] = model.max_salt;
            j["eer"] = rep.eer;
            j["eer_t1"] = rep.t1_real;
            j["eer_t2"] = rep.t2_real;
            j["contour_found"] = rep.contour_found;
            j["t1"] = rep.t1_int;
            j["t2"] = rep.t2_int;
            j["far_at_t"] = rep.far_at_int;
            j["frr_at_t"] = rep.frr_at_int;
            j["zero_fmr"] = {{"frr", rep.zero_fmr}, {"t1", rep.zero_fmr_t1}, {"t2", rep.zero_fmr_t2}};
            j["zero_fnmr"] = {{"far", rep.zero_fnmr}, {"t1", rep.zero_fnmr_t1}, {"t2", rep.zero_fnmr_t2}};
            j["chi_square"] = rep.chi_square;
            write_text(fs::path(out_dir) / "report.json", j.dump(2) + "\n");
            std::printf("EER %.4f at (%.2f, %.2f)\n", rep.eer, rep.t1_real, rep.t2_real);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            std::fprintf(stderr, "evaluate took %.2f s\n", secs);
        } else if (*embed_cmd) {
            write_pgm_file(out, embed(read_pgm_file(in), encode_table(read_mtab(table_in)), wm));
        } else if (*extract_cmd) {
            const auto wimg = read_pgm_file(in);
            const auto ex = extract(wimg, wm, watermark_length(static_cast<std::size_t>(rows)));
            const auto t = decode_table(ex.bits);
            if (table_out.empty())
                std::fputs(format_mtab(t).c_str(), stdout);
            else
                write_mtab(table_out, t);
            if (!host_out.empty())
                write_pgm_file(host_out, reconstruct_host(wimg, wm.margin));
        } else if (*attack_cmd) {
            write_pgm_file(out, attack(read_pgm_file(in), parse_attack_kind(kind), ap));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
