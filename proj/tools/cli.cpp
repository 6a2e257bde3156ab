#include "cli.hpp"

#include <fuvar/errors.hpp>
#include <fuvar/init.hpp>
#include <fuvar/io.hpp>
#include <fuvar/render.hpp>
#include <fuvar/rng.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

namespace fuvar::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

void ensure_out_dir(const std::string& dir) {
    if (dir.empty()) throw InvalidArgument("an output directory is required (--out)");
    fs::create_directories(dir);
}

std::string join_command_line(int argc, const char* const* argv) {
    std::ostringstream os;
    for (int i = 0; i < argc; ++i) {
        if (i) os << ' ';
        os << argv[i];
    }
    return os.str();
}

// Run manifest: command context, config snapshot, input hashes, outputs.
class Manifest {
public:
    void add(const std::string& key, const std::string& value) {
        entries_.emplace_back(key, value);
    }
    void add(const std::string& key, double value) { add(key, format_double(value)); }
    void add(const std::string& key, std::int64_t value) { add(key, std::to_string(value)); }
    void add_input(const std::string& path) {
        add("input." + fs::path(path).filename().string(), file_hash_hex(path));
    }
    void add_output(const std::string& path) {
        if (!fs::exists(path))
            throw IoError(IoError::Code::open_failed, "manifest: missing output " + path);
        add("output." + fs::path(path).filename().string(), fs::path(path).string());
    }
    void write(const std::string& path, double wall_seconds) {
        add("wall_seconds", wall_seconds);
        write_key_value(entries_, path);
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

void add_scene_snapshot(Manifest& manifest, const SceneSpec& scene) {
    manifest.add("scene.rows", static_cast<std::int64_t>(scene.rows));
    manifest.add("scene.cols", static_cast<std::int64_t>(scene.cols));
    manifest.add("scene.endmembers", static_cast<std::int64_t>(scene.endmembers));
    manifest.add("scene.bands", static_cast<std::int64_t>(scene.bands));
    manifest.add("scene.decimation", static_cast<std::int64_t>(scene.decimation));
    manifest.add("scene.msi_bands", static_cast<std::int64_t>(scene.msi_bands));
    manifest.add("scene.snr_hs_db", scene.snr_hs_db);
    manifest.add("scene.snr_ms_db", scene.snr_ms_db);
    manifest.add("scene.psi_breakpoints", static_cast<std::int64_t>(scene.psi_breakpoints));
    manifest.add("scene.psi_amplitude", scene.psi_amplitude);
    manifest.add("scene.grf_smoothness", scene.grf_smoothness);
    manifest.add("scene.grf_gain", scene.grf_gain);
    manifest.add("scene.seed", static_cast<std::int64_t>(scene.rng_seed));
    manifest.add("scene.wavelength_min_um", kWavelengthMinUm);
    manifest.add("scene.wavelength_max_um", kWavelengthMaxUm);
}

void add_config_snapshot(Manifest& manifest, const FuvarConfig& config) {
    manifest.add("config.endmembers", static_cast<std::int64_t>(config.endmembers));
    manifest.add("config.lambda_a", config.lambda_a);
    manifest.add("config.lambda_1", config.lambda_1);
    manifest.add("config.lambda_2", config.lambda_2);
    manifest.add("config.rho", config.rho);
    manifest.add("config.outer_max_iters", static_cast<std::int64_t>(config.outer_max_iters));
    manifest.add("config.outer_rel_tol", config.outer_rel_tol);
    manifest.add("config.admm_max_iters", static_cast<std::int64_t>(config.admm_max_iters));
    manifest.add("config.admm_rel_tol", config.admm_rel_tol);
    manifest.add("config.seed", static_cast<std::int64_t>(config.rng_seed));
}

void write_report(const SolveReport& report, const std::string& path) {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("outer_iters", std::to_string(report.outer_iters));
    kv.emplace_back("initial_objective", format_double(report.initial_objective));
    for (std::size_t i = 0; i < report.objective.size(); ++i)
        kv.emplace_back("objective_" + std::to_string(i + 1),
                        format_double(report.objective[i]));
    kv.emplace_back("final_rel_change_a", format_double(report.final_rel_change_a));
    kv.emplace_back("final_rel_change_psi", format_double(report.final_rel_change_psi));
    auto join = [](const std::vector<int>& v) {
        std::ostringstream os;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) os << ',';
            os << v[i];
        }
        return os.str();
    };
    kv.emplace_back("inner_iters_a", join(report.inner_iters_a));
    kv.emplace_back("inner_iters_psi", join(report.inner_iters_psi));
    kv.emplace_back("wall_seconds", format_double(report.wall_seconds));
    write_key_value(kv, path);
}

std::array<int, 3> visible_bands(int bands) {
    return {nearest_band_index(0.45, kWavelengthMinUm, kWavelengthMaxUm, bands),
            nearest_band_index(0.56, kWavelengthMinUm, kWavelengthMaxUm, bands),
            nearest_band_index(0.66, kWavelengthMinUm, kWavelengthMaxUm, bands)};
}

std::array<int, 3> infrared_bands(int bands) {
    return {nearest_band_index(0.80, kWavelengthMinUm, kWavelengthMaxUm, bands),
            nearest_band_index(1.50, kWavelengthMinUm, kWavelengthMaxUm, bands),
            nearest_band_index(2.20, kWavelengthMinUm, kWavelengthMaxUm, bands)};
}

struct MetricsRow {
    MetricReport hs;
    MetricReport ms;
};

void write_results_csv(const std::vector<std::pair<std::string, MetricsRow>>& rows,
                       const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError(IoError::Code::open_failed, "cannot open " + path);
    out << "method,psnr_hs,sam_hs,ergas_hs,uiqi_hs,psnr_ms,sam_ms,ergas_ms,uiqi_ms\n";
    for (const auto& [name, row] : rows) {
        out << name;
        for (const MetricReport* r : {&row.hs, &row.ms})
            out << ',' << format_double(r->psnr_db) << ',' << format_double(r->sam_rad)
                << ',' << format_double(r->ergas) << ',' << format_double(r->uiqi);
        out << '\n';
    }
}

EndmemberMatrix extract_or_load_endmembers(const Matrix& y_h, const FuvarConfig& config,
                                           const std::string& endmembers_path) {
    if (!endmembers_path.empty()) return EndmemberMatrix(read_csv_matrix(endmembers_path));
    return vca_extract(y_h, config.endmembers, derive_seed(config.rng_seed, kVcaSeedTag))
        .endmembers;
}

} // namespace

int cmd_synth(const SynthArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    ensure_out_dir(args.out_dir);
    const Scene scene = build_scene(args.scene);
    const fs::path dir(args.out_dir);

    write_cube(scene.y_h, (dir / "y_h.cube").string());
    write_cube(scene.y_m, (dir / "y_m.cube").string());
    write_cube(scene.z_h, (dir / "z_h.cube").string());
    write_cube(scene.z_m, (dir / "z_m.cube").string());
    write_csv_matrix(scene.abundances.data(), (dir / "abundances.csv").string());
    write_csv_matrix(scene.scaling.data(), (dir / "scaling.csv").string());
    write_csv_matrix(scene.endmembers.data(), (dir / "endmembers.csv").string());
    write_csv_matrix(scene.model.srf, (dir / "srf.csv").string());
    write_csv_matrix(scene.model.blur_kernel, (dir / "blur_kernel.csv").string());

    Manifest manifest;
    manifest.add("command", "synth");
    manifest.add("version", kVersion);
    add_scene_snapshot(manifest, args.scene);
    for (const char* name : {"y_h.cube", "y_m.cube", "z_h.cube", "z_m.cube",
                             "abundances.csv", "scaling.csv", "endmembers.csv", "srf.csv",
                             "blur_kernel.csv"})
        manifest.add_output((dir / name).string());
    manifest.write((dir / "manifest.txt").string(),
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                       .count());
    return exit_ok;
}

int cmd_init(const InitArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    ensure_out_dir(args.out_dir);
    const ImageCube y_h = read_cube(args.hs_path);
    const fs::path dir(args.out_dir);

    const VcaResult vca = vca_extract(y_h.band_matrix(), args.endmembers,
                                      derive_seed(args.seed, kVcaSeedTag));
    const Matrix coarse = fcls_abundances(y_h.band_matrix(), vca.endmembers.data());
    const Matrix fine = bicubic_upsample(coarse, y_h.rows(), y_h.cols(), args.factor);

    write_csv_matrix(vca.endmembers.data(), (dir / "endmembers.csv").string());
    write_csv_matrix(fine, (dir / "abundances0.csv").string());

    Manifest manifest;
    manifest.add("command", "init");
    manifest.add("version", kVersion);
    manifest.add("endmembers", static_cast<std::int64_t>(args.endmembers));
    manifest.add("factor", static_cast<std::int64_t>(args.factor));
    manifest.add("seed", static_cast<std::int64_t>(args.seed));
    manifest.add_input(args.hs_path);
    manifest.add_output((dir / "endmembers.csv").string());
    manifest.add_output((dir / "abundances0.csv").string());
    manifest.write((dir / "manifest.txt").string(),
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                       .count());
    return exit_ok;
}

int cmd_fuse(const FuseArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    ensure_out_dir(args.out_dir);
    const fs::path dir(args.out_dir);

    const ImageCube y_h = read_cube(args.hs_path);
    const ImageCube y_m = read_cube(args.ms_path);

    ObservationModel model;
    model.blur_kernel = gaussian_blur_kernel(args.kernel_sigma, args.kernel_radius);
    model.decimation_factor = args.decimation;
    model.decimation_phase = args.decimation_phase;
    model.srf = read_csv_matrix(args.srf_path);
    model.snr_hs_db = std::numeric_limits<double>::infinity();
    model.snr_ms_db = std::numeric_limits<double>::infinity();
    model.validate();

    const EndmemberMatrix endmembers =
        extract_or_load_endmembers(y_h.band_matrix(), args.config, args.endmembers_path);

    const FusionResult result = fuvar(y_h, y_m, endmembers, model, args.config,
                                      FusionOptions{args.freeze_scaling});

    write_cube(result.z_h, (dir / "z_h_hat.cube").string());
    write_cube(result.z_m, (dir / "z_m_hat.cube").string());
    write_csv_matrix(result.abundances.data(), (dir / "abundances.csv").string());
    write_csv_matrix(result.scaling.data(), (dir / "scaling.csv").string());
    write_csv_matrix(model.blur_kernel, (dir / "blur_kernel.csv").string());
    write_report(result.report, (dir / "report.txt").string());

    Manifest manifest;
    manifest.add("command", "fuse");
    manifest.add("version", kVersion);
    add_config_snapshot(manifest, args.config);
    manifest.add("freeze_scaling", args.freeze_scaling ? "1" : "0");
    manifest.add_input(args.hs_path);
    manifest.add_input(args.ms_path);
    manifest.add_input(args.srf_path);
    if (!args.endmembers_path.empty()) manifest.add_input(args.endmembers_path);
    for (const char* name :
         {"z_h_hat.cube", "z_m_hat.cube", "abundances.csv", "scaling.csv", "report.txt"})
        manifest.add_output((dir / name).string());
    manifest.write((dir / "manifest.txt").string(),
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                       .count());
    return exit_ok;
}

int cmd_eval(const EvalArgs& args) {
    const ImageCube reference = read_cube(args.reference_path);
    const ImageCube estimate = read_cube(args.estimate_path);
    const MetricReport report =
        evaluate_all(reference, estimate, args.coarse_pixels, args.options);

    const double sam_deg = report.sam_rad * 180.0 / std::numbers::pi;
    std::cout << "metric      value\n"
              << "PSNR (dB)   " << format_double(report.psnr_db) << '\n'
              << "SAM (rad)   " << format_double(report.sam_rad) << '\n'
              << "SAM (deg)   " << format_double(sam_deg) << '\n'
              << "ERGAS       " << format_double(report.ergas) << '\n'
              << "UIQI        " << format_double(report.uiqi) << '\n';

    std::ostringstream row;
    row << format_double(report.psnr_db) << ',' << format_double(report.sam_rad) << ','
        << format_double(report.ergas) << ',' << format_double(report.uiqi) << '\n';
    std::cout << "csv: psnr,sam,ergas,uiqi\ncsv: " << row.str();

    if (!args.out_csv.empty()) {
        std::ofstream out(args.out_csv, std::ios::trunc);
        if (!out) throw IoError(IoError::Code::open_failed, "cannot open " + args.out_csv);
        out << row.str();
    }
    return exit_ok;
}

int cmd_render(const RenderArgs& args) {
    const ImageCube cube = read_cube(args.cube_path);
    render_composite(cube, args.bands, args.out_png);
    return exit_ok;
}

int cmd_example1(const Example1Args& args) {
    const auto start = std::chrono::steady_clock::now();
    ensure_out_dir(args.out_dir);
    const fs::path dir(args.out_dir);

    const Scene scene = build_scene(args.scene);

    // The controlled experiment runs with the scene's endmember count.
    FuvarConfig config = args.config;
    config.endmembers = args.scene.endmembers;
    config.rng_seed = args.scene.rng_seed;

    const VcaResult vca =
        vca_extract(scene.y_h.band_matrix(), config.endmembers,
                    derive_seed(config.rng_seed, kVcaSeedTag));

    const FusionResult full =
        fuvar(scene.y_h, scene.y_m, vca.endmembers, scene.model, config, FusionOptions{});
    const FusionResult frozen = fuvar(scene.y_h, scene.y_m, vca.endmembers, scene.model,
                                      config, FusionOptions{true});

    const Eigen::Index coarse_pixels = scene.y_h.pixels();
    std::vector<std::pair<std::string, MetricsRow>> rows;
    rows.push_back({"fuvar",
                    {evaluate_all(scene.z_h, full.z_h, coarse_pixels),
                     evaluate_all(scene.z_m, full.z_m, coarse_pixels)}});
    rows.push_back({"fixed_scaling",
                    {evaluate_all(scene.z_h, frozen.z_h, coarse_pixels),
                     evaluate_all(scene.z_m, frozen.z_m, coarse_pixels)}});
    write_results_csv(rows, (dir / "results.csv").string());

    write_cube(scene.z_h, (dir / "z_h_ref.cube").string());
    write_cube(scene.z_m, (dir / "z_m_ref.cube").string());
    write_cube(full.z_h, (dir / "z_h_fuvar.cube").string());
    write_cube(full.z_m, (dir / "z_m_fuvar.cube").string());
    write_csv_matrix(full.abundances.data(), (dir / "abundances.csv").string());
    write_csv_matrix(full.scaling.data(), (dir / "scaling.csv").string());
    write_report(full.report, (dir / "report_fuvar.txt").string());
    write_report(frozen.report, (dir / "report_fixed_scaling.txt").string());

    const auto vis = visible_bands(args.scene.bands);
    const auto ir = infrared_bands(args.scene.bands);
    for (const auto& [cube, stem] :
         std::vector<std::pair<const ImageCube*, std::string>>{{&scene.z_h, "z_h_ref"},
                                                               {&full.z_h, "z_h_fuvar"},
                                                               {&scene.z_m, "z_m_ref"},
                                                               {&full.z_m, "z_m_fuvar"}}) {
        render_composite(*cube, vis, (dir / (stem + "_visible.png")).string());
        render_composite(*cube, ir, (dir / (stem + "_infrared.png")).string());
    }

    Manifest manifest;
    manifest.add("command", "example1");
    manifest.add("version", kVersion);
    add_scene_snapshot(manifest, args.scene);
    add_config_snapshot(manifest, config);
    for (const char* name : {"results.csv", "z_h_ref.cube", "z_m_ref.cube",
                             "z_h_fuvar.cube", "z_m_fuvar.cube", "abundances.csv",
                             "scaling.csv"})
        manifest.add_output((dir / name).string());
    manifest.write((dir / "manifest.txt").string(),
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                       .count());
    return exit_ok;
}

int cmd_sweep(const SweepArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    ensure_out_dir(args.out_dir);
    const fs::path dir(args.out_dir);
    if (args.multipliers.empty())
        throw InvalidArgument("sweep: the multiplier grid must not be empty");
    if (args.parameter != "lambda_a" && args.parameter != "lambda_1" &&
        args.parameter != "lambda_2")
        throw InvalidArgument("sweep: parameter must be lambda_a, lambda_1 or lambda_2");

    const Scene scene = build_scene(args.scene);
    FuvarConfig base = args.config;
    base.endmembers = args.scene.endmembers;
    base.rng_seed = args.scene.rng_seed;
    const VcaResult vca = vca_extract(scene.y_h.band_matrix(), base.endmembers,
                                      derive_seed(base.rng_seed, kVcaSeedTag));

    std::ofstream out(dir / "sweep.csv", std::ios::trunc);
    if (!out)
        throw IoError(IoError::Code::open_failed, "cannot open " + (dir / "sweep.csv").string());
    out << "multiplier,psnr_hs_db\n";

    for (const double multiplier : args.multipliers) {
        FuvarConfig config = base;
        if (args.parameter == "lambda_a") config.lambda_a *= multiplier;
        if (args.parameter == "lambda_1") config.lambda_1 *= multiplier;
        if (args.parameter == "lambda_2") config.lambda_2 *= multiplier;
        double psnr_hs = std::numeric_limits<double>::quiet_NaN();
        try {
            const FusionResult result = fuvar(scene.y_h, scene.y_m, vca.endmembers,
                                              scene.model, config, FusionOptions{});
            psnr_hs = psnr(scene.z_h, result.z_h);
        } catch (const std::exception& e) {
            std::cerr << "sweep point " << format_double(multiplier)
                      << " failed: " << e.what() << '\n';
        }
        out << format_double(multiplier) << ',' << format_double(psnr_hs) << '\n';
        out.flush();
    }

    Manifest manifest;
    manifest.add("command", "sweep");
    manifest.add("version", kVersion);
    manifest.add("parameter", args.parameter);
    add_scene_snapshot(manifest, args.scene);
    add_config_snapshot(manifest, base);
    manifest.add_output((dir / "sweep.csv").string());
    manifest.write((dir / "manifest.txt").string(),
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                       .count());
    return exit_ok;
}

namespace {

// Binds struct fields to CLI flags and lets a key=value config file supply
// values for flags the user did not pass (flag > config > default).
class OptionBinder {
public:
    explicit OptionBinder(CLI::App* cmd) : cmd_(cmd) {}

    template <typename T>
    CLI::Option* bind(const std::string& name, T& field, const std::string& desc) {
        CLI::Option* opt = cmd_->add_option("--" + name, field, desc);
        setters_.emplace_back(opt, [&field, name](const std::string& text) {
            field = parse_value<T>(text, name);
        });
        return opt;
    }

    CLI::Option* bind_flag(const std::string& name, bool& field, const std::string& desc) {
        CLI::Option* opt = cmd_->add_flag("--" + name, field, desc);
        setters_.emplace_back(opt, [&field, name](const std::string& text) {
            field = parse_value<bool>(text, name);
        });
        return opt;
    }

    void apply_config(const std::map<std::string, std::string>& kv) {
        for (auto& [opt, setter] : setters_) {
            if (opt->count() > 0) continue;
            const auto it = kv.find(opt->get_lnames().front());
            if (it != kv.end()) setter(it->second);
        }
    }

private:
    template <typename T>
    static T parse_value(const std::string& text, const std::string& name) {
        std::istringstream is(text);
        T value{};
        if constexpr (std::is_same_v<T, bool>) {
            std::string word;
            is >> word;
            if (word == "1" || word == "true") return true;
            if (word == "0" || word == "false") return false;
            throw InvalidArgument("config: bad boolean for " + name + ": '" + text + "'");
        } else {
            is >> value;
            if (is.fail()) throw InvalidArgument("config: bad value for " + name + ": '" +
                                                 text + "'");
            return value;
        }
    }

    CLI::App* cmd_;
    std::vector<std::pair<CLI::Option*, std::function<void(const std::string&)>>> setters_;
};

void bind_scene(OptionBinder& binder, SceneSpec& scene) {
    binder.bind("rows", scene.rows, "scene rows");
    binder.bind("cols", scene.cols, "scene cols");
    binder.bind("endmembers", scene.endmembers, "number of materials");
    binder.bind("bands", scene.bands, "hyperspectral band count");
    binder.bind("decimation", scene.decimation, "spatial decimation factor");
    binder.bind("msi-bands", scene.msi_bands, "multispectral band count");
    binder.bind("snr-hs-db", scene.snr_hs_db, "HSI noise level (dB, inf disables)");
    binder.bind("snr-ms-db", scene.snr_ms_db, "MSI noise level (dB, inf disables)");
    binder.bind("psi-breakpoints", scene.psi_breakpoints, "scaling knot count");
    binder.bind("psi-amplitude", scene.psi_amplitude, "scaling variability amplitude");
    binder.bind("grf-smoothness", scene.grf_smoothness, "abundance field smoothness");
    binder.bind("grf-gain", scene.grf_gain, "abundance softmax gain");
}

void bind_config(OptionBinder& binder, FuvarConfig& config, bool with_endmembers) {
    if (with_endmembers)
        binder.bind("endmembers", config.endmembers, "number of endmembers");
    binder.bind("lambda-a", config.lambda_a, "abundance gradient weight");
    binder.bind("lambda-1", config.lambda_1, "scaling unit-closeness weight");
    binder.bind("lambda-2", config.lambda_2, "scaling smoothness weight");
    binder.bind("rho", config.rho, "ADMM penalty");
    binder.bind("outer-max-iters", config.outer_max_iters, "outer sweep cap");
    binder.bind("outer-rel-tol", config.outer_rel_tol, "outer stopping tolerance");
    binder.bind("admm-max-iters", config.admm_max_iters, "inner iteration cap");
    binder.bind("admm-rel-tol", config.admm_rel_tol, "inner residual tolerance");
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"FuVar: hyperspectral-multispectral image fusion with spectral "
                 "variability"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    app.add_option("--config", config_path, "key=value configuration file")
        ->expected(1);
    CLI::Option* seed_opt = app.add_option("--seed", seed, "random seed");
    CLI::Option* out_opt = app.add_option("--out", out_dir, "output directory");

    SynthArgs synth_args;
    InitArgs init_args;
    FuseArgs fuse_args;
    EvalArgs eval_args;
    RenderArgs render_args;
    Example1Args example1_args;
    SweepArgs sweep_args;

    std::vector<OptionBinder> binders;
    binders.reserve(7);

    CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic scene");
    {
        binders.emplace_back(synth_cmd);
        bind_scene(binders.back(), synth_args.scene);
    }

    CLI::App* init_cmd =
        app.add_subcommand("init", "endmember extraction and abundance initialization");
    {
        binders.emplace_back(init_cmd);
        init_cmd->add_option("--hs", init_args.hs_path, "observed HSI cube")->required();
        binders.back().bind("endmembers", init_args.endmembers, "number of endmembers");
        binders.back().bind("factor", init_args.factor, "upsampling factor");
    }

    CLI::App* fuse_cmd = app.add_subcommand("fuse", "fuse an HSI/MSI pair");
    {
        binders.emplace_back(fuse_cmd);
        fuse_cmd->add_option("--hs", fuse_args.hs_path, "observed HSI cube")->required();
        fuse_cmd->add_option("--ms", fuse_args.ms_path, "observed MSI cube")->required();
        fuse_cmd->add_option("--srf", fuse_args.srf_path, "spectral response CSV")
            ->required();
        fuse_cmd->add_option("--endmembers-csv", fuse_args.endmembers_path,
                             "endmember spectra CSV (skips extraction)");
        bind_config(binders.back(), fuse_args.config, true);
        binders.back().bind("decimation", fuse_args.decimation, "decimation factor");
        binders.back().bind("decimation-phase", fuse_args.decimation_phase,
                            "decimation phase");
        binders.back().bind("kernel-sigma", fuse_args.kernel_sigma, "blur kernel sigma");
        binders.back().bind("kernel-radius", fuse_args.kernel_radius,
                            "blur kernel radius in sigmas");
        binders.back().bind_flag("freeze-scaling", fuse_args.freeze_scaling,
                                 "hold the scaling factors at ones");
    }

    CLI::App* eval_cmd = app.add_subcommand("eval", "compare two cubes");
    {
        binders.emplace_back(eval_cmd);
        eval_cmd->add_option("--reference", eval_args.reference_path, "reference cube")
            ->required();
        eval_cmd->add_option("--estimate", eval_args.estimate_path, "estimate cube")
            ->required();
        eval_cmd
            ->add_option("--coarse-pixels", eval_args.coarse_pixels,
                         "pixel count of the observed HSI")
            ->required();
        eval_cmd->add_flag("--psnr-paper-literal", eval_args.options.psnr_paper_literal,
                           "PSNR with unsquared peak");
        eval_cmd->add_flag("--ergas-reference-mean", eval_args.options.ergas_reference_mean,
                           "normalize ERGAS by the reference mean");
        eval_cmd->add_option("--out-csv", eval_args.out_csv, "also write a CSV row here");
    }

    std::vector<int> render_band_list;
    CLI::App* render_cmd = app.add_subcommand("render", "render a band composite PNG");
    {
        binders.emplace_back(render_cmd);
        render_cmd->add_option("--cube", render_args.cube_path, "input cube")->required();
        render_cmd
            ->add_option("--bands", render_band_list,
                         "three band indices (red green blue)")
            ->required()
            ->expected(3);
    }

    CLI::App* example1_cmd =
        app.add_subcommand("example1", "synthetic end-to-end run with ablation");
    {
        binders.emplace_back(example1_cmd);
        bind_scene(binders.back(), example1_args.scene);
        bind_config(binders.back(), example1_args.config, false);
    }

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "parameter sensitivity sweep");
    {
        binders.emplace_back(sweep_cmd);
        bind_scene(binders.back(), sweep_args.scene);
        bind_config(binders.back(), sweep_args.config, false);
        sweep_cmd->add_option("--param", sweep_args.parameter,
                              "lambda_a, lambda_1 or lambda_2");
        sweep_cmd->add_option("--multipliers", sweep_args.multipliers,
                              "multiplier grid applied to the parameter");
    }

    // Global flags may follow the subcommand name.
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage; // --help exits cleanly
    }

    try {
        std::map<std::string, std::string> config_kv;
        if (!config_path.empty())
            for (const auto& [k, v] : read_key_value(config_path)) config_kv[k] = v;
        for (auto& binder : binders) binder.apply_config(config_kv);
        if (seed_opt->count() == 0 && config_kv.count("seed"))
            seed = std::stoull(config_kv.at("seed"));

        synth_args.scene.rng_seed = seed;
        synth_args.out_dir = out_dir;
        init_args.seed = seed;
        init_args.out_dir = out_dir;
        fuse_args.config.rng_seed = seed;
        fuse_args.out_dir = out_dir;
        example1_args.scene.rng_seed = seed;
        example1_args.config.rng_seed = seed;
        example1_args.out_dir = out_dir;
        sweep_args.scene.rng_seed = seed;
        sweep_args.config.rng_seed = seed;
        sweep_args.out_dir = out_dir;
        if (render_cmd->parsed()) {
            // For render, --out names the output PNG file.
            if (out_opt->count() == 0)
                throw InvalidArgument("render: --out <file.png> is required");
            render_args.out_png = out_dir;
            for (int i = 0; i < 3; ++i)
                render_args.bands[static_cast<std::size_t>(i)] =
                    render_band_list[static_cast<std::size_t>(i)];
        }

        if (synth_cmd->parsed()) return cmd_synth(synth_args);
        if (init_cmd->parsed()) return cmd_init(init_args);
        if (fuse_cmd->parsed()) return cmd_fuse(fuse_args);
        if (eval_cmd->parsed()) return cmd_eval(eval_args);
        if (render_cmd->parsed()) return cmd_render(render_args);
        if (example1_cmd->parsed()) return cmd_example1(example1_args);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_args);
        return exit_usage;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return exit_numerical;
    }
}

} // namespace fuvar::cli
