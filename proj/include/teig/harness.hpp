#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "teig/config.hpp"

namespace teig {

struct FindOutcome {
    MeshStatistics mesh_stats;
    SearchResult search;
    std::string hits_csv_path;
};

// Mesh, assemble, search the configured region; writes hits.csv (and the
// trace / mesh / matrix files when enabled) under cfg.output.dir.
FindOutcome run_find(const RunConfig& cfg, std::ostream* log = nullptr);

struct ConvergenceRow {
    double h = 0.0;
    Complex value;
    std::optional<double> err;    // |v_{i-1} - v_i| / |v_{i-1}|, blank on the first row
    std::optional<double> order;  // log2(err_{i-1} / err_i), blank until the third row
    bool unpaired = false;
};

struct ConvergenceTrack {
    std::vector<ConvergenceRow> rows;
};

double convergence_order(double err_prev, double err_next);

// Nested refinement family from the config mesh; eigenvalues paired across
// levels by nearest match with an absolute 0.1 gate. Writes convergence.csv.
std::vector<ConvergenceTrack> run_converge(const RunConfig& cfg, int levels, std::ostream* log = nullptr);

struct MultiplicityReport {
    Complex lambda;
    int kappa = 0;
};

MultiplicityReport run_multiplicity(const RunConfig& cfg, Complex lambda, std::ostream* log = nullptr);

struct SweepSample {
    double position = 0.0;   // along [re_min, re_max] on the configured axis line
    double sigma_min = 0.0;  // smallest singular value of T
    double rcond = 0.0;
};

// Scans the smallest singular value of the dense boundary operator along
// the real segment of the region; the debugging / oracle view of the
// spectrum. Writes sweep.csv.
std::vector<SweepSample> run_sweep(const RunConfig& cfg, std::ostream* log = nullptr);

// CSV helpers shared by the CLI and tests (deterministic formatting).
std::string csv_header(const RunConfig& cfg);
void write_hits_csv(std::ostream& out, const RunConfig& cfg, const std::vector<EigenvalueHit>& hits);
void write_trace_csv(std::ostream& out, const RunConfig& cfg, const std::vector<SearchTraceRow>& rows);
void write_convergence_csv(std::ostream& out, const RunConfig& cfg,
                           const std::vector<ConvergenceTrack>& tracks);
void write_sweep_csv(std::ostream& out, const RunConfig& cfg, const std::vector<SweepSample>& samples);

}  // namespace teig
