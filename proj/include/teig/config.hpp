#pragma once

#include <cstdint>
#include <string>

#include "teig/boundary_operator.hpp"
#include "teig/material.hpp"
#include "teig/search.hpp"

namespace teig {

enum class DomainType { disc, diamond };

struct DomainSpec {
    DomainType type = DomainType::disc;
    double extent = 0.5;  // disc radius or diamond half-width
};

struct MeshSpec {
    double target_h = 0.1;
    int refine_levels = 0;
    bool project_boundary = true;  // disc only: pull refined midpoints to the circle
};

struct RegionSpec {
    double re_min = 0.0, re_max = 0.0;
    double im_min = 0.0, im_max = 0.0;
};

struct OutputSpec {
    std::string dir = ".";
    bool trace = false;      // also write the square-by-square search trace
    bool write_mesh = true;  // store the mesh next to the tables for provenance
    bool export_matrices = false;
};

// One batch job: domain, mesh family, medium, search region and knobs.
// Parsed from "key = value" sections; see README for the format.
struct RunConfig {
    DomainSpec domain;
    MeshSpec mesh;
    MaterialModel material;
    std::string material_text;  // preset name or inline expressions, for reports
    RegionSpec region;
    SpectralMode convention = SpectralMode::k;
    IndicatorConfig indicator;
    OutputSpec output;
    int sweep_samples = 200;
    std::uint64_t config_hash = 0;  // FNV-1a of the raw config text
};

// Throws std::invalid_argument with line-numbered diagnostics on unknown
// keys, malformed values, empty regions, or media that fail positivity at
// sampled domain points.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

std::uint64_t fnv1a64(const std::string& data);

// Mesh for the configured domain at the configured refinement level.
Mesh build_mesh(const RunConfig& cfg);
Mesh build_mesh(const RunConfig& cfg, int refine_levels);

// Root squares covering the configured rectangle (side = shorter rectangle
// edge, grid extended past the far edges when the ratio is fractional).
std::vector<SearchRegion> region_cover(const RegionSpec& region);

}  // namespace teig
