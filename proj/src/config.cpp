#include "teig/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "teig/expr.hpp"

namespace teig {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

using Sections = std::map<std::string, std::map<std::string, Entry>>;

[[noreturn]] void fail(int line, const std::string& what) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

Sections tokenize(const std::string& text) {
    Sections sections;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line.substr(0, line.find('#')));
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') fail(lineno, "malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty()) fail(lineno, "empty section name");
            sections.try_emplace(section);
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos) fail(lineno, "expected key = value");
        if (section.empty()) fail(lineno, "key outside of any [section]");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) fail(lineno, "empty key");
        if (!sections[section].emplace(key, Entry{value, lineno, false}).second)
            fail(lineno, "duplicate key '" + key + "' in section [" + section + "]");
    }
    return sections;
}

class Reader {
public:
    explicit Reader(Sections& s) : sections_(s) {}

    Entry* find(const std::string& section, const std::string& key) {
        auto sit = sections_.find(section);
        if (sit == sections_.end()) return nullptr;
        auto kit = sit->second.find(key);
        if (kit == sit->second.end()) return nullptr;
        kit->second.used = true;
        return &kit->second;
    }

    std::string get_string(const std::string& sec, const std::string& key, const std::string& dflt) {
        Entry* e = find(sec, key);
        return e ? e->value : dflt;
    }

    double get_double(const std::string& sec, const std::string& key, double dflt) {
        Entry* e = find(sec, key);
        if (!e) return dflt;
        try {
            size_t used = 0;
            const double v = std::stod(e->value, &used);
            if (used != e->value.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            fail(e->line, "expected a number for '" + key + "', got '" + e->value + "'");
        }
    }

    long long get_int(const std::string& sec, const std::string& key, long long dflt) {
        Entry* e = find(sec, key);
        if (!e) return dflt;
        try {
            size_t used = 0;
            const long long v = std::stoll(e->value, &used);
            if (used != e->value.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            fail(e->line, "expected an integer for '" + key + "', got '" + e->value + "'");
        }
    }

    bool get_bool(const std::string& sec, const std::string& key, bool dflt) {
        Entry* e = find(sec, key);
        if (!e) return dflt;
        if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
        if (e->value == "false" || e->value == "0" || e->value == "no") return false;
        fail(e->line, "expected true/false for '" + key + "', got '" + e->value + "'");
    }

    void check_all_used() const {
        static const std::map<std::string, bool> known_sections = {
            {"domain", true}, {"mesh", true},   {"material", true}, {"region", true},
            {"search", true}, {"output", true}, {"sweep", true}};
        for (const auto& [sec, keys] : sections_) {
            if (!known_sections.count(sec)) {
                for (const auto& [key, e] : keys) fail(e.line, "unknown section [" + sec + "]");
                throw std::invalid_argument("config: unknown empty section [" + sec + "]");
            }
            for (const auto& [key, e] : keys)
                if (!e.used) fail(e.line, "unknown key '" + key + "' in section [" + sec + "]");
        }
    }

private:
    Sections& sections_;
};

MaterialModel material_from_config(Reader& r, int* decl_line, std::string* text) {
    Entry* preset = r.find("material", "preset");
    Entry* a11 = r.find("material", "a11");
    Entry* a12 = r.find("material", "a12");
    Entry* a22 = r.find("material", "a22");
    Entry* nfun = r.find("material", "n");
    if (preset && (a11 || a12 || a22 || nfun))
        fail(preset->line, "material preset and inline coefficients are mutually exclusive");
    if (preset) {
        *decl_line = preset->line;
        *text = preset->value;
        try {
            return material_preset(preset->value);
        } catch (const std::exception& e) {
            fail(preset->line, e.what());
        }
    }
    if (!a11 || !a22 || !nfun)
        throw std::invalid_argument("config: [material] needs either preset or a11, a22 and n");
    *decl_line = a11->line;
    try {
        const Expr e11 = Expr::parse(a11->value);
        const Expr e12 = Expr::parse(a12 ? a12->value : "0");
        const Expr e22 = Expr::parse(a22->value);
        const Expr en = Expr::parse(nfun->value);
        *text = "a11=" + e11.text() + "; a12=" + e12.text() + "; a22=" + e22.text() + "; n=" + en.text();
        MaterialModel m;
        m.A = [e11, e12, e22](Point2 p) {
            return SymMat2{e11.eval(p.x, p.y), e12.eval(p.x, p.y), e22.eval(p.x, p.y)};
        };
        m.n = [en](Point2 p) { return en.eval(p.x, p.y); };
        m.label = "inline";
        return m;
    } catch (const std::invalid_argument& e) {
        fail(*decl_line, e.what());
    }
}

// Deterministic interior sample points for probing material positivity.
void probe_material(const DomainSpec& dom, const MaterialModel& mat, int decl_line) {
    std::mt19937_64 rng(0x5eed5eedULL);
    auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1p-53; };
    int found = 0;
    while (found < 100) {
        const double x = (2.0 * uniform() - 1.0) * dom.extent;
        const double y = (2.0 * uniform() - 1.0) * dom.extent;
        const bool inside = dom.type == DomainType::disc ? (x * x + y * y < dom.extent * dom.extent)
                                                         : (std::abs(x) + std::abs(y) < dom.extent);
        if (!inside) continue;
        ++found;
        const SymMat2 a = mat.A({x, y});
        const double nv = mat.n({x, y});
        if (!(sym2_min_eigenvalue(a) > 0.0) || !std::isfinite(a[0]) || !std::isfinite(a[1]) ||
            !std::isfinite(a[2]))
            fail(decl_line, "material A(x) is not positive definite at sampled point (" +
                                std::to_string(x) + ", " + std::to_string(y) + ")");
        if (!(nv > 0.0) || !std::isfinite(nv))
            fail(decl_line, "material n(x) is not positive at sampled point (" + std::to_string(x) +
                                ", " + std::to_string(y) + ")");
    }
}

}  // namespace

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

RunConfig parse_config(const std::string& text) {
    Sections sections = tokenize(text);
    Reader r(sections);
    RunConfig cfg;
    cfg.config_hash = fnv1a64(text);

    // [domain]
    {
        Entry* type = r.find("domain", "type");
        if (!type) throw std::invalid_argument("config: missing [domain] type");
        if (type->value == "disc") {
            cfg.domain.type = DomainType::disc;
            cfg.domain.extent = r.get_double("domain", "radius", 0.5);
        } else if (type->value == "diamond") {
            cfg.domain.type = DomainType::diamond;
            cfg.domain.extent = r.get_double("domain", "half_width", 1.0);
        } else {
            fail(type->line, "domain type must be disc or diamond");
        }
        if (!(cfg.domain.extent > 0.0))
            fail(type->line, "domain extent must be positive");
    }

    // [mesh]
    cfg.mesh.target_h = r.get_double("mesh", "target_h", 0.1);
    cfg.mesh.refine_levels = static_cast<int>(r.get_int("mesh", "refine_levels", 0));
    cfg.mesh.project_boundary = r.get_bool("mesh", "project_boundary", true);
    if (!(cfg.mesh.target_h > 0.0) || cfg.mesh.target_h >= cfg.domain.extent)
        throw std::invalid_argument("config: [mesh] target_h must lie in (0, domain extent)");
    if (cfg.mesh.refine_levels < 0 || cfg.mesh.refine_levels > 12)
        throw std::invalid_argument("config: [mesh] refine_levels out of range");

    // [material]
    int mat_line = 0;
    cfg.material = material_from_config(r, &mat_line, &cfg.material_text);
    probe_material(cfg.domain, cfg.material, mat_line);

    // [region]
    cfg.region.re_min = r.get_double("region", "re_min", 0.0);
    cfg.region.re_max = r.get_double("region", "re_max", 0.0);
    cfg.region.im_min = r.get_double("region", "im_min", 0.0);
    cfg.region.im_max = r.get_double("region", "im_max", 0.0);
    if (!(cfg.region.re_min < cfg.region.re_max) || !(cfg.region.im_min < cfg.region.im_max))
        throw std::invalid_argument("config: [region] is empty (require re_min < re_max and im_min < im_max)");

    // [search]
    const std::string conv = r.get_string("search", "convention", "k");
    cfg.convention = spectral_mode_from_name(conv);
    cfg.indicator.n0 = static_cast<int>(r.get_int("search", "n0", 16));
    cfg.indicator.delta0 = r.get_double("search", "delta0", 1e-3);
    cfg.indicator.eps0 = r.get_double("search", "eps0", 1e-6);
    cfg.indicator.seed = static_cast<std::uint64_t>(r.get_int("search", "seed", 1));
    cfg.indicator.max_depth = static_cast<int>(r.get_int("search", "max_depth", 40));
    cfg.indicator.threads = static_cast<int>(r.get_int("search", "threads", 0));
    validate_indicator_config(cfg.indicator);
    if (cfg.convention == SpectralMode::k && cfg.region.re_min < 0.0)
        throw std::invalid_argument("config: k-convention regions must satisfy re_min >= 0");

    // [output]
    cfg.output.dir = r.get_string("output", "dir", ".");
    cfg.output.trace = r.get_bool("output", "trace", false);
    cfg.output.write_mesh = r.get_bool("output", "write_mesh", true);
    cfg.output.export_matrices = r.get_bool("output", "export_matrices", false);

    // [sweep]
    cfg.sweep_samples = static_cast<int>(r.get_int("sweep", "samples", 200));
    if (cfg.sweep_samples < 2) throw std::invalid_argument("config: [sweep] samples must be at least 2");

    r.check_all_used();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

Mesh build_mesh(const RunConfig& cfg) { return build_mesh(cfg, cfg.mesh.refine_levels); }

Mesh build_mesh(const RunConfig& cfg, int refine_levels) {
    Mesh mesh = cfg.domain.type == DomainType::disc
                    ? generate_disc_mesh(cfg.domain.extent, cfg.mesh.target_h)
                    : generate_diamond_mesh(cfg.domain.extent, cfg.mesh.target_h);
    std::optional<CircleBoundary> proj;
    if (cfg.domain.type == DomainType::disc && cfg.mesh.project_boundary)
        proj = CircleBoundary{{0.0, 0.0}, cfg.domain.extent};
    for (int l = 0; l < refine_levels; ++l) mesh = uniform_refine(mesh, proj);
    return mesh;
}

std::vector<SearchRegion> region_cover(const RegionSpec& region) {
    const double w = region.re_max - region.re_min;
    const double h = region.im_max - region.im_min;
    const double side = std::min(w, h);
    const int nx = static_cast<int>(std::ceil(w / side - 1e-9));
    const int ny = static_cast<int>(std::ceil(h / side - 1e-9));
    std::vector<SearchRegion> roots;
    roots.reserve(static_cast<size_t>(nx) * ny);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            roots.push_back({Complex(region.re_min + (i + 0.5) * side, region.im_min + (j + 0.5) * side),
                             side});
    return roots;
}

}  // namespace teig
