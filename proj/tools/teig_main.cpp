#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>

#include "teig/harness.hpp"
#include "teig/version.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> convention;
    std::optional<int> threads;
    bool trace = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "run configuration file")->required();
    cmd->add_option("--seed", opts.seed, "override the probe RNG seed");
    cmd->add_option("--out", opts.out_dir, "override the output directory");
    cmd->add_option("--convention", opts.convention, "spectral convention: k or eta")
        ->check(CLI::IsMember({"k", "eta"}));
    cmd->add_option("--threads", opts.threads, "worker threads (0 = hardware)");
    cmd->add_flag("--trace", opts.trace, "also write the search trace CSV");
}

teig::RunConfig make_config(const CommonOpts& opts) {
    teig::RunConfig cfg = teig::load_config(opts.config_path);
    if (opts.seed) cfg.indicator.seed = *opts.seed;
    if (opts.out_dir) cfg.output.dir = *opts.out_dir;
    if (opts.convention) cfg.convention = teig::spectral_mode_from_name(*opts.convention);
    if (opts.threads) cfg.indicator.threads = *opts.threads;
    if (opts.trace) cfg.output.trace = true;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("teig ") + teig::kVersion +
                 " - transmission eigenvalues of anisotropic media (FEM + spectral-indicator search)"};
    app.require_subcommand(1);

    CommonOpts mesh_opts, find_opts, conv_opts, mult_opts, sweep_opts;

    CLI::App* cmd_mesh = app.add_subcommand("mesh", "generate the configured mesh and report statistics");
    add_common(cmd_mesh, mesh_opts);

    CLI::App* cmd_find = app.add_subcommand("find", "locate eigenvalues in the configured region");
    add_common(cmd_find, find_opts);

    CLI::App* cmd_conv = app.add_subcommand("converge", "eigenvalue table over a nested mesh family");
    add_common(cmd_conv, conv_opts);
    int levels = 4;
    cmd_conv->add_option("--levels", levels, "number of refinement levels (>= 3)");

    CLI::App* cmd_mult = app.add_subcommand("mult", "algebraic multiplicity of a located eigenvalue");
    add_common(cmd_mult, mult_opts);
    double lambda_re = 0.0, lambda_im = 0.0;
    cmd_mult->add_option("--lambda-re", lambda_re, "real part of the eigenvalue")->required();
    cmd_mult->add_option("--lambda-im", lambda_im, "imaginary part of the eigenvalue");

    CLI::App* cmd_sweep = app.add_subcommand("sweep", "singular-value scan along the real axis segment");
    add_common(cmd_sweep, sweep_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_mesh->parsed()) {
            const teig::RunConfig cfg = make_config(mesh_opts);
            const teig::Mesh mesh = teig::build_mesh(cfg);
            std::filesystem::create_directories(cfg.output.dir);
            const std::string path = (std::filesystem::path(cfg.output.dir) / "mesh.txt").string();
            teig::save_mesh(mesh, path);
            const teig::MeshStatistics s = teig::mesh_statistics(mesh);
            std::cout << "mesh written to " << path << "\n"
                      << "h " << s.h << "\nvertices " << s.num_vertices << "\nboundary_vertices "
                      << s.num_boundary_vertices << "\ntotal_area " << s.total_area << "\nmin_angle_deg "
                      << s.min_angle_deg << "\n";
        } else if (cmd_find->parsed()) {
            const teig::RunConfig cfg = make_config(find_opts);
            const teig::FindOutcome outcome = teig::run_find(cfg, &std::cout);
            std::cout << "hits written to " << outcome.hits_csv_path << "\n";
        } else if (cmd_conv->parsed()) {
            const teig::RunConfig cfg = make_config(conv_opts);
            const auto tracks = teig::run_converge(cfg, levels, &std::cout);
            std::cout << tracks.size() << " eigenvalue tracks written to "
                      << (std::filesystem::path(cfg.output.dir) / "convergence.csv").string() << "\n";
        } else if (cmd_mult->parsed()) {
            const teig::RunConfig cfg = make_config(mult_opts);
            const auto rep = teig::run_multiplicity(cfg, {lambda_re, lambda_im}, &std::cout);
            std::cout << "multiplicity " << rep.kappa << "\n";
        } else if (cmd_sweep->parsed()) {
            const teig::RunConfig cfg = make_config(sweep_opts);
            teig::run_sweep(cfg, &std::cout);
            std::cout << "sweep written to "
                      << (std::filesystem::path(cfg.output.dir) / "sweep.csv").string() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
