// startx: command-line front end for the star transform library.
//
// Exit codes: 0 success, 1 computation error, 64 bad input (usage or
// malformed files). `analyze` additionally returns 2 for an invertible
// configuration with Type-2 directions and 3 for a non-invertible one.

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "startx/error.hpp"
#include "startx/image.hpp"
#include "startx/inversion.hpp"
#include "startx/io.hpp"
#include "startx/scatter.hpp"
#include "startx/stability.hpp"
#include "startx/star_geometry.hpp"
#include "startx/transforms.hpp"

namespace {

using namespace startx;
using io::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";
constexpr int kExitError = 1;
constexpr int kExitInput = 64;

/// Bad user input; mapped to exit 64.
class InputError : public Error {
public:
    using Error::Error;
};

struct Options {
    std::string phantom = "shepp-logan";
    std::string phantom_file;
    int n = 128;
    double half_width = 1.0;
    int angles = 360;
    int offsets = 0;  // 0 means 2 n
    double ext_factor = 3.0;
    std::string filter = "hamming";
    std::string fill = "interpolate";
    std::string out;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    int scan_samples = 4096;
    bool no_strip_continuation = false;
    std::string config;
    std::vector<double> rays_deg;
    std::vector<double> weights;
};

double deg(double rad) { return rad * 180.0 / kPi; }

StarConfig load_config(const Options& o) {
    try {
        if (!o.config.empty()) {
            if (!o.rays_deg.empty()) throw InputError("give either --config or --rays, not both");
            return io::read_config(o.config);
        }
        if (o.rays_deg.empty()) throw InputError("a star configuration is required (--config or --rays)");
        std::vector<double> w = o.weights.empty() ? std::vector<double>(o.rays_deg.size(), 1.0) : o.weights;
        if (w.size() != o.rays_deg.size()) throw InputError("--weights needs one value per ray");
        return StarConfig::from_degrees(o.rays_deg, w);
    } catch (const InputError&) {
        throw;
    } catch (const Error& e) {
        throw InputError(e.what());
    }
}

ImageGrid make_phantom(const Options& o) {
    if (o.phantom == "shepp-logan") return rasterize(shepp_logan(SheppLoganVariant::modified), o.n, o.half_width);
    if (o.phantom == "shepp-logan-original") {
        return rasterize(shepp_logan(SheppLoganVariant::original), o.n, o.half_width);
    }
    if (o.phantom == "gaussian") {
        Vec2 c{0.0, 0.0};
        if (o.seed) {
            std::mt19937_64 rng(*o.seed);
            std::uniform_real_distribution<double> u(-0.3, 0.3);
            c.x = u(rng) * o.half_width;
            c.y = u(rng) * o.half_width;
        }
        return gaussian_bump(c, 0.15 * o.half_width, o.n, o.half_width);
    }
    if (o.phantom == "file") {
        if (o.phantom_file.empty()) throw InputError("--phantom file needs --phantom-file PATH");
        try {
            return io::read_pfm(o.phantom_file, o.half_width);
        } catch (const Error& e) {
            throw InputError(e.what());
        }
    }
    throw InputError("unknown phantom '" + o.phantom + "'");
}

int num_offsets(const Options& o) { return o.offsets > 0 ? o.offsets : 2 * o.n; }

InversionSettings inversion_settings(const Options& o) {
    InversionSettings s;
    try {
        s.filter = parse_filter(o.filter);
        s.fill = parse_fill(o.fill);
    } catch (const Error& e) {
        throw InputError(e.what());
    }
    s.scan.n_samples = o.scan_samples;
    return s;
}

ScanSettings scan_settings(const Options& o) {
    ScanSettings s;
    s.n_samples = o.scan_samples;
    return s;
}

json settings_json(const Options& o) {
    json j = {{"phantom", o.phantom},
              {"n", o.n},
              {"half_width", o.half_width},
              {"angles", o.angles},
              {"offsets", num_offsets(o)},
              {"ext_factor", o.ext_factor},
              {"filter", o.filter},
              {"fill", o.fill},
              {"threads", o.threads},
              {"scan_samples", o.scan_samples},
              {"strip_continuation", !o.no_strip_continuation}};
    if (!o.phantom_file.empty()) j["phantom_file"] = o.phantom_file;
    if (o.seed) j["seed"] = *o.seed;
    if (!o.rays_deg.empty()) j["rays_deg"] = o.rays_deg;
    if (!o.weights.empty()) j["weights"] = o.weights;
    return j;
}

/// Collects outputs in memory; nothing touches --out until commit().
class Outputs {
public:
    Outputs(std::string command, const Options& o)
        : command_(std::move(command)), opts_(o), start_(std::chrono::steady_clock::now()) {}

    void add(const std::string& name, std::string bytes) { files_.emplace_back(name, std::move(bytes)); }
    void add_json(const std::string& name, const json& j) { add(name, j.dump(2) + "\n"); }
    json& extra_settings() { return extra_; }

    void commit() const {
        if (opts_.out.empty()) return;
        const fs::path dir(opts_.out);
        fs::create_directories(dir);
        io::RunManifest m;
        m.command = command_;
        if (!opts_.config.empty()) m.config_paths.push_back(opts_.config);
        m.settings = settings_json(opts_);
        for (const auto& [k, v] : extra_.items()) m.settings[k] = v;
        m.versions = {{"startx", kVersion}, {"compiler", __VERSION__}};
        for (const auto& [name, bytes] : files_) {
            io::atomic_write(dir / name, bytes);
            m.output_hashes[name] = io::fnv1a64(bytes);
        }
        m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        io::atomic_write(dir / "manifest.json", m.to_json().dump(2) + "\n");
    }

private:
    std::string command_;
    const Options& opts_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::pair<std::string, std::string>> files_;
    json extra_ = json::object();
};

json rounded_angles_deg(std::span<const double> rad) {
    json a = json::array();
    for (double r : rad) a.push_back(io::round_sig(deg(r), 12));
    return a;
}

int cmd_analyze(const Options& o) {
    const StarConfig cfg = load_config(o);
    const SingularityReport r = find_singular_directions(cfg, scan_settings(o));
    json j = io::report_to_json(r);
    j["config"] = io::config_to_json(cfg);
    std::cout << j.dump(2) << "\n";
    Outputs out("analyze", o);
    out.add_json("report.json", j);
    out.commit();
    switch (r.classification()) {
        case Stability::stable: return 0;
        case Stability::unstable: return 2;
        case Stability::non_invertible: return 3;
    }
    return kExitError;
}

int cmd_forward(const Options& o) {
    const StarConfig cfg = load_config(o);
    const ImageGrid f = make_phantom(o);
    const StarField sf = star_transform(f, cfg, o.ext_factor);
    Outputs out("forward", o);
    out.add("f.pfm", io::encode_pfm(f));
    out.add("star.pfm", io::encode_pfm(sf.grid));
    out.add_json("star.json", {{"grid_n", sf.grid.size()},
                               {"grid_half_width", sf.grid.half_width()},
                               {"inner_half_width", sf.inner_half_width},
                               {"ext_factor", sf.ext_factor},
                               {"config", io::config_to_json(cfg)}});
    out.commit();
    std::cout << "star field " << sf.grid.size() << "x" << sf.grid.size() << ", max |Sf| " << sf.grid.max_abs() << "\n";
    return 0;
}

int cmd_radon(const Options& o) {
    const ImageGrid f = make_phantom(o);
    const int T = num_offsets(o);
    Sinogram s;
    Outputs out("radon", o);
    if (o.config.empty() && o.rays_deg.empty()) {
        s = radon(f, o.angles, T);
    } else {
        const StarConfig cfg = load_config(o);
        RadonOptions ro;
        ro.continue_strips = !o.no_strip_continuation;
        s = radon(star_transform(f, cfg, o.ext_factor), o.angles, T, ro);
        out.extra_settings()["of"] = "star transform";
    }
    out.add("sinogram.csv", io::encode_sinogram_csv(s));
    out.commit();
    std::cout << "sinogram " << s.num_angles() << "x" << s.num_offsets() << ", max " << s.max_abs() << "\n";
    return 0;
}

/// Reads a measured star field: the PFM covers ext_factor times the inner square.
StarField read_field(const std::string& path, const StarConfig& cfg, const Options& o) {
    const int size = extended_size(o.n, o.ext_factor);
    const double pitch = 2.0 * o.half_width / o.n;
    StarField sf{io::read_pfm(path, 0.5 * size * pitch), o.ext_factor, o.half_width, cfg, {}};
    if (sf.grid.size() != size) {
        throw InputError("field size " + std::to_string(sf.grid.size()) + " does not match extended_size(n, ext_factor) = " +
                         std::to_string(size));
    }
    if (!o.no_strip_continuation) sf.profiles = strip_profiles_from_field(sf.grid, cfg, o.half_width);
    return sf;
}

int cmd_invert(const Options& o, const std::string& field_path, const std::string& truth_path) {
    const StarConfig cfg = load_config(o);
    const InversionSettings settings = inversion_settings(o);
    std::optional<ImageGrid> truth;
    if (field_path.empty()) truth = make_phantom(o);
    const StarField sf = truth ? star_transform(*truth, cfg, o.ext_factor) : read_field(field_path, cfg, o);
    if (!truth_path.empty()) truth = io::read_pfm(truth_path, o.half_width);

    RadonOptions ro;
    ro.continue_strips = !o.no_strip_continuation;
    const StarReconstruction rec = invert_star(sf, cfg, o.angles, num_offsets(o), settings, o.n, o.half_width, ro);

    Outputs out("invert", o);
    out.add("reconstruction.pfm", io::encode_pfm(rec.image));
    out.add("recovered_radon.csv", io::encode_sinogram_csv(rec.radon.sinogram));
    out.add_json("mask.json", io::mask_to_json(rec.radon.valid));
    json rep = io::report_to_json(rec.radon.report);
    rep["interpolated_rows"] = rec.radon.interpolated_rows;
    rep["zero_filled_rows"] = rec.radon.zero_filled_rows;
    rep["warnings"] = rec.radon.warnings;
    out.add_json("singularity.json", rep);
    for (const auto& w : rec.radon.warnings) std::cerr << "warning: " << w << "\n";
    if (truth) {
        if (!truth->same_shape(rec.image)) throw InputError("ground truth grid does not match the reconstruction grid");
        const double r = rmse(rec.image, *truth, o.half_width);
        const double rel = relative_l2(rec.image, *truth, o.half_width);
        json err = {{"rmse", io::round_sig(r, 12)},
                    {"relative_l2", io::round_sig(rel, 12)},
                    {"mask_radius", o.half_width}};
        out.add_json("error.json", err);
        std::cout << "rmse " << r << ", relative L2 " << rel << "\n";
    }
    out.commit();
    return 0;
}

int cmd_regular(const Options& o, int m) {
    const StarConfig cfg = regular_star(m);
    json j = {{"rays_deg", rounded_angles_deg(cfg.angles())}, {"weights", cfg.weights()}};
    std::cout << j.dump(2) << "\n";
    Outputs out("regular", o);
    out.extra_settings()["m"] = m;
    out.add_json("config.json", j);
    out.commit();
    return 0;
}

int cmd_stable_for_weights(const Options& o, const std::vector<double>& c) {
    if (c.size() != 3) throw InputError("stable-for-weights takes exactly three weights");
    const StarConfig cfg = stable_config_for_weights(c[0], c[1], c[2]);
    const SingularityReport r = find_singular_directions(cfg, scan_settings(o));
    json j = {{"rays_deg", rounded_angles_deg(cfg.angles())},
              {"weights", cfg.weights()},
              {"p2_min_abs", io::round_sig(r.p2_min_abs, 12)}};
    std::cout << j.dump(2) << "\n";
    Outputs out("stable-for-weights", o);
    out.add_json("config.json", j);
    out.commit();
    return 0;
}

int cmd_conjecture(const Options& o, int m) {
    const ConjectureScan s = conjecture_scan(m, o.scan_samples);
    json j = {{"m", m},
              {"samples", o.scan_samples},
              {"min_abs", io::round_sig(s.min_abs, 12)},
              {"max_abs", io::round_sig(s.max_abs, 12)},
              {"is_constant", s.is_constant}};
    std::cout << j.dump(2) << "\n";
    Outputs out("conjecture", o);
    out.add_json("conjecture.json", j);
    out.commit();
    return 0;
}

ImageGrid default_eta(int n, double half_width) {
    ImageGrid eta = gaussian_bump({-0.3 * half_width, 0.25 * half_width}, 0.15 * half_width, n, half_width);
    const ImageGrid e2 = gaussian_bump({0.35 * half_width, -0.3 * half_width}, 0.1 * half_width, n, half_width);
    for (std::size_t p = 0; p < eta.values().size(); ++p) eta.values()[p] = 0.3 * eta.values()[p] + 0.2 * e2.values()[p];
    return eta;
}

int cmd_scatter_sim(const Options& o, const std::string& eta_file) {
    const std::vector<double> c = o.weights.empty() ? std::vector<double>{1.0, 1.0, -2.0} : o.weights;
    std::vector<double> angles;
    if (!o.rays_deg.empty() || !o.config.empty()) {
        const StarConfig cfg = load_config(o);
        angles.assign(cfg.angles().begin(), cfg.angles().end());
    } else {
        if (c.size() != 3) throw InputError("without --rays, --weights must have three entries");
        const StarConfig cfg = stable_config_for_weights(c[0], c[1], c[2]);
        angles.assign(cfg.angles().begin(), cfg.angles().end());
    }
    if (angles.size() != c.size()) throw InputError("--weights needs one value per ray");
    const ImageGrid f = make_phantom(o);
    const ImageGrid eta = eta_file.empty() ? default_eta(o.n, o.half_width) : io::read_pfm(eta_file, o.half_width);
    if (!eta.same_shape(f)) throw InputError("eta grid does not match the phantom grid");

    const ScatterData data = simulate_scatter(f, eta, angles, {}, o.ext_factor);
    const OmegaMatrix omega = omega_for_weights(c);
    if (o.out.empty()) throw InputError("scatter-sim needs --out DIR");
    // The scatter directory is written file by file (each atomically); the manifest goes last.
    Outputs out("scatter-sim", o);
    out.add("f.pfm", io::encode_pfm(f));
    out.add("eta.pfm", io::encode_pfm(eta));
    io::write_scatter_dir(fs::path(o.out), data, omega, c);
    out.commit();
    std::cout << data.phi.size() << " measurement images written to " << o.out << "\n";
    return 0;
}

int cmd_scatter_recover(const Options& o, const std::string& in_dir, const std::string& truth_f,
                        const std::string& truth_eta) {
    ScatterData data;
    json cfg;
    try {
        data = io::read_scatter_dir(in_dir);
        cfg = json::parse(io::read_file(fs::path(in_dir) / "config.json"));
    } catch (const Error& e) {
        throw InputError(e.what());
    }
    std::vector<double> c = o.weights;
    if (c.empty()) {
        if (!cfg.contains("weights")) throw InputError("no weights in " + in_dir + "/config.json; pass --weights");
        c = cfg["weights"].get<std::vector<double>>();
    }
    ScatterRecoverySettings s;
    s.inversion = inversion_settings(o);
    s.num_angles = o.angles;
    s.num_offsets = o.offsets;
    const ScatterRecovery r = recover_f_eta(data, c, s);

    Outputs out("scatter-recover", o);
    out.extra_settings()["input"] = in_dir;
    out.add("f_hat.pfm", io::encode_pfm(r.f));
    out.add("eta_hat.pfm", io::encode_pfm(r.eta));
    json err = json::object();
    if (!truth_f.empty()) {
        const double e = relative_l2(r.f, io::read_pfm(truth_f, data.inner_half_width), data.inner_half_width);
        err["f_relative_l2"] = io::round_sig(e, 12);
        std::cout << "f relative L2 " << e << "\n";
    }
    if (!truth_eta.empty()) {
        const double e = relative_l2(r.eta, io::read_pfm(truth_eta, data.inner_half_width), data.inner_half_width);
        err["eta_relative_l2"] = io::round_sig(e, 12);
        std::cout << "eta relative L2 " << e << "\n";
    }
    if (!err.empty()) out.add_json("error.json", err);
    out.commit();
    return 0;
}

struct ReproCase {
    const char* name;
    std::vector<double> rays_deg;
};

int cmd_repro(Options o, bool fast) {
    if (fast) o.n = 128;
    const std::vector<ReproCase> cases = {
        {"vline_0_120", {0.0, 120.0}},
        {"regular3", {0.0, 120.0, 240.0}},
        {"perturbed3_9_120_240", {9.0, 120.0, 240.0}},
        {"halfplane3_0_90_135", {0.0, 90.0, 135.0}},
        {"regular5", {0.0, 72.0, 144.0, 216.0, 288.0}},
    };
    const ImageGrid f = make_phantom(o);
    const InversionSettings settings = inversion_settings(o);
    const int T = num_offsets(o);
    Outputs out("repro", o);
    out.extra_settings()["fast"] = fast;
    out.add("phantom.pfm", io::encode_pfm(f));

    const ImageGrid baseline = fbp(radon(f, o.angles, T), o.n, o.half_width, settings.filter);
    const double base_rmse = rmse(baseline, f, o.half_width);
    out.add("baseline_fbp.pfm", io::encode_pfm(baseline));
    json summary = {{"baseline_fbp_rmse", io::round_sig(base_rmse, 12)}, {"cases", json::array()}};
    std::cout << "baseline FBP rmse " << base_rmse << "\n";

    for (const auto& rc : cases) {
        const StarConfig cfg = StarConfig::from_degrees(rc.rays_deg, std::vector<double>(rc.rays_deg.size(), 1.0));
        const StarReconstruction rec = invert_star(star_transform(f, cfg, o.ext_factor), cfg, o.angles, T, settings, o.n,
                                                   o.half_width);
        const double r = rmse(rec.image, f, o.half_width);
        out.add(std::string(rc.name) + ".pfm", io::encode_pfm(rec.image));
        json c = {{"name", rc.name},
                  {"config", io::config_to_json(cfg)},
                  {"rmse", io::round_sig(r, 12)},
                  {"type2_deg", rounded_angles_deg(rec.radon.report.type2_angles)},
                  {"masked_rows", rec.radon.masked_rows()}};
        summary["cases"].push_back(c);
        std::cout << rc.name << ": rmse " << r << ", Type-2 directions " << rec.radon.report.type2_angles.size() << "\n";
    }
    out.add_json("summary.json", summary);
    out.commit();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Star transform: forward model, Radon-based inversion, singular directions, single scattering"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Options o;

    auto grid_flags = [&](CLI::App* s) {
        s->add_option("--phantom", o.phantom, "shepp-logan | shepp-logan-original | gaussian | file")
            ->check(CLI::IsMember({"shepp-logan", "shepp-logan-original", "gaussian", "file"}));
        s->add_option("--phantom-file", o.phantom_file, "PFM image for --phantom file");
        s->add_option("--n", o.n, "image size (pixels per side)")->check(CLI::Range(8, 8192));
        s->add_option("--half-width", o.half_width, "image covers [-L, L]^2")->check(CLI::PositiveNumber);
        s->add_option("--seed", o.seed, "randomizes the gaussian phantom's centre");
    };
    auto config_flags = [&](CLI::App* s) {
        s->add_option("--config", o.config, "star configuration JSON {rays_deg, weights}");
        s->add_option("--rays", o.rays_deg, "ray directions in degrees")->delimiter(',');
        s->add_option("--weights", o.weights, "ray weights (default all ones)")->delimiter(',');
    };
    auto sino_flags = [&](CLI::App* s) {
        s->add_option("--angles", o.angles, "number of Radon angles K")->check(CLI::Range(4, 100000));
        s->add_option("--offsets", o.offsets, "number of Radon offsets T (default 2n)")->check(CLI::NonNegativeNumber);
        s->add_option("--ext-factor", o.ext_factor, "star field grid enlargement")->check(CLI::Range(1.0, 16.0));
        s->add_flag("--no-strip-continuation", o.no_strip_continuation, "truncate the star field at its grid");
    };
    auto inv_flags = [&](CLI::App* s) {
        s->add_option("--filter", o.filter, "ram-lak | hamming")->check(CLI::IsMember({"ram-lak", "hamming"}));
        s->add_option("--fill", o.fill, "interpolate | zero")->check(CLI::IsMember({"interpolate", "zero"}));
    };
    auto common = [&](CLI::App* s) {
        s->add_option("--out", o.out, "output directory");
        s->add_option("--threads", o.threads, "worker threads (0 = all)")->check(CLI::NonNegativeNumber);
        s->add_option("--scan-samples", o.scan_samples, "samples of the Type-2 scan")->check(CLI::Range(16, 10000000));
    };

    std::function<int()> run;

    auto* analyze = app.add_subcommand("analyze", "singular directions of a configuration (exit 0 / 2 / 3)");
    analyze->add_option("config", o.config, "configuration JSON")->required();
    common(analyze);
    analyze->callback([&] { run = [&] { return cmd_analyze(o); }; });

    auto* forward = app.add_subcommand("forward", "star transform of a phantom");
    grid_flags(forward), config_flags(forward), sino_flags(forward), common(forward);
    forward->callback([&] { run = [&] { return cmd_forward(o); }; });

    auto* radon_cmd = app.add_subcommand("radon", "Radon transform of a phantom, or of its star transform with a config");
    grid_flags(radon_cmd), config_flags(radon_cmd), sino_flags(radon_cmd), common(radon_cmd);
    radon_cmd->callback([&] { run = [&] { return cmd_radon(o); }; });

    std::string field_path, truth_path;
    auto* invert = app.add_subcommand("invert", "reconstruct f from its star transform");
    grid_flags(invert), config_flags(invert), sino_flags(invert), inv_flags(invert), common(invert);
    invert->add_option("--field", field_path, "measured star field PFM (default: simulate from --phantom)");
    invert->add_option("--truth", truth_path, "ground truth PFM for the error report");
    invert->callback([&] { run = [&] { return cmd_invert(o, field_path, truth_path); }; });

    std::string eta_file;
    auto* ssim = app.add_subcommand("scatter-sim", "simulate single-scattering measurements phi_ij");
    grid_flags(ssim), config_flags(ssim), common(ssim);
    ssim->add_option("--ext-factor", o.ext_factor, "measurement grid enlargement")->check(CLI::Range(1.0, 16.0));
    ssim->add_option("--eta-file", eta_file, "scattering map PFM (default: two gaussian bumps)");
    ssim->callback([&] { run = [&] { return cmd_scatter_sim(o, eta_file); }; });

    std::string in_dir, truth_f, truth_eta;
    auto* srec = app.add_subcommand("scatter-recover", "recover f and eta from a scatter directory");
    srec->add_option("--in", in_dir, "directory written by scatter-sim")->required();
    srec->add_option("--weights", o.weights, "zero-sum star weights (default: from config.json)")->delimiter(',');
    srec->add_option("--truth-f", truth_f, "ground truth f PFM");
    srec->add_option("--truth-eta", truth_eta, "ground truth eta PFM");
    srec->add_option("--angles", o.angles, "number of Radon angles K")->check(CLI::Range(4, 100000));
    srec->add_option("--offsets", o.offsets, "number of Radon offsets T (default 2n)")->check(CLI::NonNegativeNumber);
    inv_flags(srec), common(srec);
    srec->callback([&] { run = [&] { return cmd_scatter_recover(o, in_dir, truth_f, truth_eta); }; });

    int m = 3;
    auto* regular = app.add_subcommand("regular", "regular star with m rays");
    regular->add_option("--m", m, "odd number of rays >= 3")->required();
    common(regular);
    regular->callback([&] { run = [&] { return cmd_regular(o, m); }; });

    std::vector<double> c;
    auto* sfw = app.add_subcommand("stable-for-weights", "three-ray configuration without Type-2 directions");
    sfw->add_option("weights", c, "c1 c2 c3")->required()->expected(3);
    common(sfw);
    sfw->callback([&] { run = [&] { return cmd_stable_for_weights(o, c); }; });

    auto* conj = app.add_subcommand("conjecture", "scan e_{m-1} over the aperture circle of the regular m-star");
    conj->add_option("--m", m, "odd number of rays >= 3")->required();
    common(conj);
    conj->callback([&] { run = [&] { return cmd_conjecture(o, m); }; });

    bool fast = false;
    auto* repro = app.add_subcommand("repro", "reconstruct the five reference configurations");
    grid_flags(repro), sino_flags(repro), inv_flags(repro), common(repro);
    repro->add_flag("--fast", fast, "n = 128 instead of 400");
    repro->callback([&] { run = [&] { return cmd_repro(o, fast); }; });
    repro->preparse_callback([&](std::size_t) { o.n = 400; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }
    if (o.threads > 0) omp_set_num_threads(o.threads);
    try {
        return run();
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
