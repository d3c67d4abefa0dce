#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "teig/boundary_operator.hpp"

namespace teig {

// Axis-aligned square in the spectral plane (k or eta, per the run mode).
struct SearchRegion {
    Complex center;
    double side = 0.0;
};

struct SearchCircle {
    Complex center;
    double radius = 0.0;
};

struct IndicatorConfig {
    int n0 = 16;            // quadrature points per contour (even, >= 8)
    double delta0 = 1e-3;   // indicator threshold, relative to the probe norm
    double eps0 = 1e-6;     // terminal square side
    std::uint64_t seed = 1; // probe generator seed
    int max_depth = 40;     // subdivision cap
    int threads = 0;        // 0 = hardware concurrency
};

struct EigenvalueHit {
    Complex value;
    double indicator = 0.0;
    int depth = 0;
    std::optional<int> multiplicity;
};

struct SearchTraceRow {
    int depth = 0;
    Complex center;
    double side = 0.0;
    double indicator = 0.0;
};

struct SearchResult {
    std::vector<EigenvalueHit> hits;
    std::vector<SearchTraceRow> trace;       // one row per square visited
    long indicator_evaluations = 0;
    bool depth_capped = false;               // true => partial result
};

SearchCircle circumscribe(const SearchRegion& region);

struct QuadratureNode {
    Complex node;
    Complex weight;
};

// Trapezoidal contour rule: sum_j weight_j f(node_j) approximates the
// winding-normalized integral (1/2 pi i) closed-contour f. phase rotates
// all nodes, used to step off an eigenvalue sitting on a node.
std::vector<QuadratureNode> contour_quadrature(const SearchCircle& circle, int n0, double phase = 0.0);

// Deterministic complex standard-normal probe (Box-Muller over a seeded
// 64-bit generator; avoids platform-dependent library distributions).
VectorXc random_boundary_probe(int nb, std::uint64_t seed);

void validate_indicator_config(const IndicatorConfig& cfg);

// Relative spectral-projection indicator of one region:
//   || sum_j w_j x(z_j) || / || f ||,   T(eta(z_j)) x(z_j) = f.
// Nonvanishing (almost surely in f) exactly when eigenvalues lie inside.
double indicator(const DiscreteSystem& sys, const SearchRegion& region, const IndicatorConfig& cfg,
                 const VectorXc& f, SpectralMode mode = SpectralMode::k);

// SIM-H: breadth-first quadtree over the root squares. A square whose
// indicator exceeds delta0 splits into 4 (NW, NE, SW, SE); terminal squares
// (side <= eps0) yield hits at their centers; hits closer than 2 eps0 merge
// by indicator-weighted averaging.
//
// Note the split condition: a LARGE indicator means spectrum present. The
// source algorithm's text lists the comparison the other way around, which
// contradicts both its own prose and the projection math; this
// implementation follows the prose. See README.
SearchResult find_eigenvalues(const DiscreteSystem& sys, const std::vector<SearchRegion>& roots,
                              const IndicatorConfig& cfg, SpectralMode mode = SpectralMode::k);

SearchResult find_eigenvalues(const DiscreteSystem& sys, const SearchRegion& root,
                              const IndicatorConfig& cfg, SpectralMode mode = SpectralMode::k);

// Algebraic multiplicity of an isolated eigenvalue: numerical rank of the
// contour-integrated moment matrix over a circle of radius 10 eps0 around
// lambda, probed with m independent random boundary functions. Escalates
// m by 2 while rank == m. Throws if the annulus up to twice that radius
// contains extra spectrum (lambda not isolated well enough).
int multiplicity(const DiscreteSystem& sys, Complex lambda, const IndicatorConfig& cfg,
                 int probes = 3, SpectralMode mode = SpectralMode::k);

}  // namespace teig
