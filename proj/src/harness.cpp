#include "teig/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "teig/version.hpp"

namespace teig {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::ofstream open_out(const std::string& dir, const std::string& name, std::string* path_out = nullptr) {
    std::filesystem::create_directories(dir);
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);  // fixed newlines for byte-stable outputs
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    if (path_out) *path_out = path;
    return out;
}

DiscreteSystem assemble_for(const RunConfig& cfg, const Mesh& mesh, std::ostream* log) {
    if (log)
        *log << "mesh: " << mesh.num_vertices() << " vertices, " << mesh.num_triangles()
             << " triangles, " << mesh.num_boundary() << " boundary, h = " << mesh.h << "\n";
    DiscreteSystem sys = assemble_system(mesh, cfg.material);
    if (cfg.output.export_matrices) {
        export_matrix_coords(sys.stiffness, (std::filesystem::path(cfg.output.dir) / "stiffness.txt").string());
        export_matrix_coords(sys.stiffness_ref,
                             (std::filesystem::path(cfg.output.dir) / "stiffness_ref.txt").string());
        export_matrix_coords(sys.mass_n, (std::filesystem::path(cfg.output.dir) / "mass_n.txt").string());
        export_matrix_coords(sys.mass, (std::filesystem::path(cfg.output.dir) / "mass.txt").string());
        export_matrix_coords(sys.boundary_mass,
                             (std::filesystem::path(cfg.output.dir) / "boundary_mass.txt").string());
        export_matrix_coords(sys.boundary_coupling,
                             (std::filesystem::path(cfg.output.dir) / "boundary_coupling.txt").string());
    }
    return sys;
}

}  // namespace

std::string csv_header(const RunConfig& cfg) {
    std::ostringstream os;
    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(cfg.config_hash));
    os << "# teig " << kVersion << " config=0x" << hash
       << " convention=" << spectral_mode_name(cfg.convention) << " seed=" << cfg.indicator.seed << "\n";
    return os.str();
}

void write_hits_csv(std::ostream& out, const RunConfig& cfg, const std::vector<EigenvalueHit>& hits) {
    out << csv_header(cfg);
    out << "re,im,indicator,depth,multiplicity\n";
    for (const auto& h : hits) {
        out << fmt(h.value.real()) << "," << fmt(h.value.imag()) << "," << fmt(h.indicator) << ","
            << h.depth << ",";
        if (h.multiplicity) out << *h.multiplicity;
        out << "\n";
    }
}

void write_trace_csv(std::ostream& out, const RunConfig& cfg, const std::vector<SearchTraceRow>& rows) {
    out << csv_header(cfg);
    out << "depth,re,im,side,indicator\n";
    for (const auto& r : rows)
        out << r.depth << "," << fmt(r.center.real()) << "," << fmt(r.center.imag()) << ","
            << fmt(r.side) << "," << fmt(r.indicator) << "\n";
}

FindOutcome run_find(const RunConfig& cfg, std::ostream* log) {
    const Mesh mesh = build_mesh(cfg);
    FindOutcome outcome;
    outcome.mesh_stats = mesh_statistics(mesh);
    if (cfg.output.write_mesh) {
        std::filesystem::create_directories(cfg.output.dir);
        save_mesh(mesh, (std::filesystem::path(cfg.output.dir) / "mesh.txt").string());
    }
    const DiscreteSystem sys = assemble_for(cfg, mesh, log);
    outcome.search = find_eigenvalues(sys, region_cover(cfg.region), cfg.indicator, cfg.convention);
    if (outcome.search.depth_capped && log)
        *log << "warning: max_depth reached before eps0; result is partial\n";

    auto out = open_out(cfg.output.dir, "hits.csv", &outcome.hits_csv_path);
    write_hits_csv(out, cfg, outcome.search.hits);
    if (cfg.output.trace) {
        auto tout = open_out(cfg.output.dir, "trace.csv");
        write_trace_csv(tout, cfg, outcome.search.trace);
    }
    if (log) {
        *log << "indicator evaluations: " << outcome.search.indicator_evaluations << "\n";
        for (const auto& h : outcome.search.hits)
            *log << "hit: " << fmt(h.value.real()) << (h.value.imag() < 0 ? " - " : " + ")
                 << fmt(std::abs(h.value.imag())) << "i  indicator " << fmt(h.indicator) << " depth "
                 << h.depth << "\n";
    }
    return outcome;
}

double convergence_order(double err_prev, double err_next) {
    return std::log2(err_prev / err_next);
}

std::vector<ConvergenceTrack> run_converge(const RunConfig& cfg, int levels, std::ostream* log) {
    if (levels < 3) throw std::invalid_argument("run_converge: need at least 3 levels");

    std::optional<CircleBoundary> proj;
    if (cfg.domain.type == DomainType::disc && cfg.mesh.project_boundary)
        proj = CircleBoundary{{0.0, 0.0}, cfg.domain.extent};

    Mesh mesh = build_mesh(cfg, 0);
    std::vector<ConvergenceTrack> tracks;
    const double pair_gate = 0.1;

    for (int level = 0; level < levels; ++level) {
        if (level > 0) mesh = uniform_refine(mesh, proj);
        const DiscreteSystem sys = assemble_for(cfg, mesh, log);
        const SearchResult found =
            find_eigenvalues(sys, region_cover(cfg.region), cfg.indicator, cfg.convention);
        if (log)
            *log << "level " << level << " (h = " << mesh.h << "): " << found.hits.size() << " hits\n";

        if (level == 0) {
            for (const auto& h : found.hits) {
                ConvergenceTrack t;
                t.rows.push_back({mesh.h, h.value, std::nullopt, std::nullopt, false});
                tracks.push_back(std::move(t));
            }
            continue;
        }

        std::vector<bool> taken(found.hits.size(), false);
        for (auto& track : tracks) {
            if (track.rows.empty() || track.rows.back().unpaired) {
                track.rows.push_back({mesh.h, Complex(0, 0), std::nullopt, std::nullopt, true});
                continue;
            }
            const Complex prev = track.rows.back().value;
            int best = -1;
            double best_d = pair_gate;
            for (size_t i = 0; i < found.hits.size(); ++i) {
                if (taken[i]) continue;
                const double d = std::abs(found.hits[i].value - prev);
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(i);
                }
            }
            ConvergenceRow row;
            row.h = mesh.h;
            if (best < 0) {
                row.unpaired = true;
            } else {
                taken[best] = true;
                row.value = found.hits[best].value;
                const double err = std::abs(prev - row.value) / std::abs(prev);
                row.err = err;
                const auto& prev_row = track.rows.back();
                if (prev_row.err && *prev_row.err > 0.0 && err > 0.0)
                    row.order = convergence_order(*prev_row.err, err);
            }
            track.rows.push_back(row);
        }
        for (size_t i = 0; i < found.hits.size(); ++i) {
            if (taken[i]) continue;
            // eigenvalue resolved only from this level on: new track
            ConvergenceTrack t;
            for (int l = 0; l < level; ++l)
                t.rows.push_back({0.0, Complex(0, 0), std::nullopt, std::nullopt, true});
            t.rows.push_back({mesh.h, found.hits[i].value, std::nullopt, std::nullopt, false});
            tracks.push_back(std::move(t));
        }
    }

    auto out = open_out(cfg.output.dir, "convergence.csv");
    write_convergence_csv(out, cfg, tracks);
    return tracks;
}

void write_convergence_csv(std::ostream& out, const RunConfig& cfg,
                           const std::vector<ConvergenceTrack>& tracks) {
    out << csv_header(cfg);
    out << "h,re,im,err,order\n";
    for (size_t t = 0; t < tracks.size(); ++t) {
        out << "# track " << t << "\n";
        for (const auto& row : tracks[t].rows) {
            if (row.unpaired) {
                out << fmt(row.h) << ",,,,\n";
                continue;
            }
            out << fmt(row.h) << "," << fmt(row.value.real()) << "," << fmt(row.value.imag()) << ",";
            if (row.err) out << fmt(*row.err);
            out << ",";
            if (row.order) out << fmt(*row.order);
            out << "\n";
        }
    }
}

MultiplicityReport run_multiplicity(const RunConfig& cfg, Complex lambda, std::ostream* log) {
    const Mesh mesh = build_mesh(cfg);
    const DiscreteSystem sys = assemble_for(cfg, mesh, log);
    MultiplicityReport rep;
    rep.lambda = lambda;
    rep.kappa = multiplicity(sys, lambda, cfg.indicator, 3, cfg.convention);
    if (log)
        *log << "multiplicity at " << fmt(lambda.real()) << (lambda.imag() < 0 ? " - " : " + ")
             << fmt(std::abs(lambda.imag())) << "i: " << rep.kappa << "\n";
    return rep;
}

std::vector<SweepSample> run_sweep(const RunConfig& cfg, std::ostream* log) {
    const Mesh mesh = build_mesh(cfg);
    const DiscreteSystem sys = assemble_for(cfg, mesh, log);
    std::vector<SweepSample> samples(cfg.sweep_samples);
    const double lo = cfg.region.re_min, hi = cfg.region.re_max;
    for (int i = 0; i < cfg.sweep_samples; ++i) {
        const double s = lo + (hi - lo) * i / (cfg.sweep_samples - 1);
        const OperatorEvaluation eval = build_T(sys, spectral_to_eta(Complex(s, 0.0), cfg.convention));
        Eigen::BDCSVD<MatrixXc> svd(eval.T);
        samples[i].position = s;
        samples[i].sigma_min = svd.singularValues().tail(1)(0);
        samples[i].rcond = eval.cond_estimate > 0.0 ? 1.0 / eval.cond_estimate : 0.0;
        if (log && i % 32 == 0) *log << "sweep " << i << "/" << cfg.sweep_samples << "\r" << std::flush;
    }
    if (log) *log << "\n";
    auto out = open_out(cfg.output.dir, "sweep.csv");
    write_sweep_csv(out, cfg, samples);
    return samples;
}

void write_sweep_csv(std::ostream& out, const RunConfig& cfg, const std::vector<SweepSample>& samples) {
    out << csv_header(cfg);
    out << "position,sigma_min,rcond\n";
    for (const auto& s : samples)
        out << fmt(s.position) << "," << fmt(s.sigma_min) << "," << fmt(s.rcond) << "\n";
}

}  // namespace teig
