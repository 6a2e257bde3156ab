#pragma once

#include <fuvar/metrics.hpp>
#include <fuvar/solver.hpp>
#include <fuvar/synth.hpp>
#include <fuvar/types.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fuvar::cli {

// Exit codes shared by every subcommand.
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_data = 2,
    exit_numerical = 3,
};

struct SynthArgs {
    SceneSpec scene;
    std::string out_dir;
};

struct InitArgs {
    std::string hs_path;
    int endmembers = 30;
    int factor = 4;
    std::uint64_t seed = 0;
    std::string out_dir;
};

struct FuseArgs {
    std::string hs_path;
    std::string ms_path;
    std::string srf_path;
    std::string endmembers_path; // optional; empty selects endmember extraction
    FuvarConfig config;
    int decimation = 4;
    int decimation_phase = 0;
    double kernel_sigma = 1.0;
    int kernel_radius = 4;
    bool freeze_scaling = false;
    std::string out_dir;
};

struct EvalArgs {
    std::string reference_path;
    std::string estimate_path;
    long coarse_pixels = 0;
    MetricOptions options;
    std::string out_csv; // optional; metrics always go to stdout
};

struct RenderArgs {
    std::string cube_path;
    std::array<int, 3> bands{0, 0, 0};
    std::string out_png;
};

struct Example1Args {
    SceneSpec scene;
    FuvarConfig config;
    std::string out_dir;
};

struct SweepArgs {
    SceneSpec scene;
    FuvarConfig config;
    std::string parameter = "lambda_a"; // lambda_a | lambda_1 | lambda_2
    std::vector<double> multipliers{0.01, 0.1, 1.0, 10.0, 100.0};
    std::string out_dir;
};

int cmd_synth(const SynthArgs& args);
int cmd_init(const InitArgs& args);
int cmd_fuse(const FuseArgs& args);
int cmd_eval(const EvalArgs& args);
int cmd_render(const RenderArgs& args);
int cmd_example1(const Example1Args& args);
int cmd_sweep(const SweepArgs& args);

// Full argv entry point (parses flags, maps exceptions to exit codes).
int run_cli(int argc, const char* const* argv);

// Nominal wavelength grid declared by synthetic scenes (micrometers).
inline constexpr double kWavelengthMinUm = 0.4;
inline constexpr double kWavelengthMaxUm = 2.5;

// Seed stream tag for endmember extraction, shared by fuse and example1.
inline constexpr std::uint64_t kVcaSeedTag = 10;

} // namespace fuvar::cli
