#include "teig/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace teig {

namespace {

// Quantized key for the solve cache: distinct quadrature nodes of one run
// are separated by >= eps0/10 while coinciding nodes of sibling or nested
// contours agree to roundoff, far below this resolution.
struct NodeKey {
    long long re, im;
    bool operator<(const NodeKey& o) const { return re < o.re || (re == o.re && im < o.im); }
    bool operator==(const NodeKey& o) const { return re == o.re && im == o.im; }
};

NodeKey make_key(Complex z) {
    constexpr double q = 1e-12;
    return {static_cast<long long>(std::llround(z.real() / q)),
            static_cast<long long>(std::llround(z.imag() / q))};
}

struct NodeSolution {
    VectorXc x;
    bool singular = false;
};

// Per-run solve cache plus worker pool. Each worker owns a ResolventSolver
// so concurrent factorizations never share mutable state.
class NodeSolvePool {
public:
    NodeSolvePool(const DiscreteSystem& sys, const VectorXc& f, SpectralMode mode, int threads)
        : sys_(sys), f_(f), mode_(mode) {
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw <= 0) hw = 1;
        threads_ = threads > 0 ? threads : hw;
    }

    // Ensures solutions for all keys are cached (parallel batch solve).
    void request(const std::vector<Complex>& nodes) {
        std::map<NodeKey, Complex> wanted;
        for (Complex z : nodes) {
            const NodeKey k = make_key(z);
            if (!cache_.count(k)) wanted.emplace(k, z);
        }
        if (wanted.empty()) return;

        std::vector<std::pair<NodeKey, Complex>> batch(wanted.begin(), wanted.end());
        std::vector<NodeSolution> results(batch.size());
        const int nw = std::min<int>(threads_, static_cast<int>(batch.size()));
        if (static_cast<int>(solvers_.size()) < nw) {
            solvers_.reserve(nw);
            while (static_cast<int>(solvers_.size()) < nw)
                solvers_.push_back(std::make_unique<ResolventSolver>(sys_));
        }

        std::atomic<size_t> next{0};
        auto work = [&](int w) {
            ResolventSolver& solver = *solvers_[w];
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= batch.size()) return;
                try {
                    results[i].x = solver.solve(spectral_to_eta(batch[i].second, mode_), f_);
                } catch (const SingularSystemError&) {
                    results[i].singular = true;
                }
            }
        };
        if (nw <= 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(nw);
            for (int w = 0; w < nw; ++w) pool.emplace_back(work, w);
            for (auto& t : pool) t.join();
        }
        for (size_t i = 0; i < batch.size(); ++i) cache_.emplace(batch[i].first, std::move(results[i]));

        // The cache stores boundary-sized vectors; bound its footprint.
        if (cache_.size() > 60000) cache_.clear();
    }

    const NodeSolution& lookup(Complex z) const { return cache_.at(make_key(z)); }

private:
    const DiscreteSystem& sys_;
    VectorXc f_;
    SpectralMode mode_;
    int threads_ = 1;
    std::vector<std::unique_ptr<ResolventSolver>> solvers_;
    std::map<NodeKey, NodeSolution> cache_;
};

struct Square {
    Complex center;
    double side;
    int depth;
};

// Indicator of one square against the cache; nodes must have been requested.
// Returns nullopt if any node solve was singular.
std::optional<double> square_indicator(const NodeSolvePool& pool, const Square& sq, int n0,
                                       double phase, double f_norm) {
    const auto quad = contour_quadrature(circumscribe({sq.center, sq.side}), n0, phase);
    VectorXc acc;
    for (const auto& q : quad) {
        const NodeSolution& sol = pool.lookup(q.node);
        if (sol.singular) return std::nullopt;
        if (acc.size() == 0)
            acc = q.weight * sol.x;
        else
            acc += q.weight * sol.x;
    }
    return acc.norm() / f_norm;
}

std::vector<Complex> square_nodes(const Square& sq, int n0, double phase) {
    std::vector<Complex> nodes;
    nodes.reserve(n0);
    for (const auto& q : contour_quadrature(circumscribe({sq.center, sq.side}), n0, phase))
        nodes.push_back(q.node);
    return nodes;
}

}  // namespace

SearchCircle circumscribe(const SearchRegion& region) {
    return {region.center, region.side * std::numbers::sqrt2 / 2.0};
}

std::vector<QuadratureNode> contour_quadrature(const SearchCircle& circle, int n0, double phase) {
    if (n0 < 8) throw std::invalid_argument("contour_quadrature: n0 must be at least 8");
    std::vector<QuadratureNode> quad(n0);
    for (int j = 0; j < n0; ++j) {
        const double th = 2.0 * std::numbers::pi * j / n0 + phase;
        const Complex dir = std::polar(circle.radius, th);
        quad[j].node = circle.center + dir;
        quad[j].weight = dir / static_cast<double>(n0);
    }
    return quad;
}

VectorXc random_boundary_probe(int nb, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() {
        // 53-bit mantissa in (0, 1]; the shift keeps Box-Muller's log finite
        return (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
    };
    VectorXc f(nb);
    for (int i = 0; i < nb; ++i) {
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double th = 2.0 * std::numbers::pi * uniform();
        f[i] = Complex(r * std::cos(th), r * std::sin(th));
    }
    return f;
}

void validate_indicator_config(const IndicatorConfig& cfg) {
    if (cfg.n0 < 8 || cfg.n0 % 2 != 0)
        throw std::invalid_argument("indicator config: n0 must be even and at least 8");
    if (!(cfg.eps0 > 0.0)) throw std::invalid_argument("indicator config: eps0 must be positive");
    if (!(cfg.delta0 > 0.0)) throw std::invalid_argument("indicator config: delta0 must be positive");
    if (cfg.max_depth < 1) throw std::invalid_argument("indicator config: max_depth must be positive");
}

double indicator(const DiscreteSystem& sys, const SearchRegion& region, const IndicatorConfig& cfg,
                 const VectorXc& f, SpectralMode mode) {
    validate_indicator_config(cfg);
    if (!(region.side > 0.0)) throw std::invalid_argument("indicator: region side must be positive");
    NodeSolvePool pool(sys, f, mode, cfg.threads);
    const Square sq{region.center, region.side, 0};
    const double f_norm = f.norm();
    for (const double phase : {0.0, std::numbers::pi / cfg.n0}) {
        pool.request(square_nodes(sq, cfg.n0, phase));
        if (auto ind = square_indicator(pool, sq, cfg.n0, phase, f_norm)) return *ind;
    }
    throw SingularSystemError(
        "indicator: quadrature nodes hit singular systems even after rotation; shift the region");
}

SearchResult find_eigenvalues(const DiscreteSystem& sys, const SearchRegion& root,
                              const IndicatorConfig& cfg, SpectralMode mode) {
    return find_eigenvalues(sys, std::vector<SearchRegion>{root}, cfg, mode);
}

SearchResult find_eigenvalues(const DiscreteSystem& sys, const std::vector<SearchRegion>& roots,
                              const IndicatorConfig& cfg, SpectralMode mode) {
    validate_indicator_config(cfg);
    for (const auto& r : roots) {
        if (!(r.side > 0.0)) throw std::invalid_argument("find_eigenvalues: region side must be positive");
        if (mode == SpectralMode::k && r.center.real() - r.side / 2.0 < 0.0)
            throw std::invalid_argument("find_eigenvalues: k-mode regions must satisfy Re k >= 0");
    }

    const VectorXc f = random_boundary_probe(sys.NB, cfg.seed);
    const double f_norm = f.norm();
    NodeSolvePool pool(sys, f, mode, cfg.threads);

    SearchResult result;
    std::vector<Square> level;
    level.reserve(roots.size());
    for (const auto& r : roots) level.push_back({r.center, r.side, 0});

    std::vector<EigenvalueHit> raw_hits;
    while (!level.empty()) {
        std::vector<Complex> nodes;
        nodes.reserve(level.size() * cfg.n0);
        for (const auto& sq : level) {
            const auto sn = square_nodes(sq, cfg.n0, 0.0);
            nodes.insert(nodes.end(), sn.begin(), sn.end());
        }
        pool.request(nodes);

        std::vector<Square> next;
        for (const auto& sq : level) {
            std::optional<double> ind = square_indicator(pool, sq, cfg.n0, 0.0, f_norm);
            if (!ind) {
                // a node landed on an eigenvalue: rotate this square's
                // contour by half a step and retry once
                const double phase = std::numbers::pi / cfg.n0;
                pool.request(square_nodes(sq, cfg.n0, phase));
                ind = square_indicator(pool, sq, cfg.n0, phase, f_norm);
                if (!ind)
                    throw SingularSystemError(
                        "find_eigenvalues: all quadrature nodes singular even after rotation; "
                        "shift the search region");
            }
            ++result.indicator_evaluations;
            result.trace.push_back({sq.depth, sq.center, sq.side, *ind});
            if (!(*ind > cfg.delta0)) continue;

            if (sq.side <= cfg.eps0) {
                raw_hits.push_back({sq.center, *ind, sq.depth, std::nullopt});
            } else if (sq.depth >= cfg.max_depth) {
                result.depth_capped = true;
            } else {
                const double q = sq.side / 4.0;
                const double half = sq.side / 2.0;
                // NW, NE, SW, SE
                next.push_back({sq.center + Complex(-q, q), half, sq.depth + 1});
                next.push_back({sq.center + Complex(q, q), half, sq.depth + 1});
                next.push_back({sq.center + Complex(-q, -q), half, sq.depth + 1});
                next.push_back({sq.center + Complex(q, -q), half, sq.depth + 1});
            }
        }
        level = std::move(next);
    }

    // Merge clusters of terminal hits around one eigenvalue.
    const double merge_dist = 2.0 * cfg.eps0;
    const size_t nh = raw_hits.size();
    std::vector<size_t> parent(nh);
    for (size_t i = 0; i < nh; ++i) parent[i] = i;
    std::function<size_t(size_t)> find_root = [&](size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (size_t i = 0; i < nh; ++i)
        for (size_t j = i + 1; j < nh; ++j)
            if (std::abs(raw_hits[i].value - raw_hits[j].value) < merge_dist)
                parent[find_root(i)] = find_root(j);

    std::map<size_t, std::vector<size_t>> clusters;
    for (size_t i = 0; i < nh; ++i) clusters[find_root(i)].push_back(i);
    for (const auto& [root_idx, members] : clusters) {
        EigenvalueHit merged;
        double wsum = 0.0;
        Complex vsum = 0.0;
        for (size_t i : members) {
            const auto& hit = raw_hits[i];
            wsum += hit.indicator;
            vsum += hit.indicator * hit.value;
            merged.indicator = std::max(merged.indicator, hit.indicator);
            merged.depth = std::max(merged.depth, hit.depth);
        }
        merged.value = vsum / wsum;
        result.hits.push_back(merged);
    }
    std::sort(result.hits.begin(), result.hits.end(), [](const EigenvalueHit& a, const EigenvalueHit& b) {
        return a.value.real() < b.value.real() ||
               (a.value.real() == b.value.real() && a.value.imag() < b.value.imag());
    });
    return result;
}

int multiplicity(const DiscreteSystem& sys, Complex lambda, const IndicatorConfig& cfg, int probes,
                 SpectralMode mode) {
    validate_indicator_config(cfg);
    if (probes < 1) throw std::invalid_argument("multiplicity: need at least one probe");

    ResolventSolver solver(sys);

    auto rank_on_circle = [&](double radius, int m) {
        MatrixXc w(sys.NB, m);
        for (int j = 0; j < m; ++j) w.col(j) = random_boundary_probe(sys.NB, cfg.seed + 1 + j);
        const auto quad = contour_quadrature({lambda, radius}, cfg.n0);
        MatrixXc moment = MatrixXc::Zero(sys.NB, m);
        double scale = 0.0;
        for (const auto& q : quad) {
            const MatrixXc x = solver.solve(spectral_to_eta(q.node, mode), w);
            moment += q.weight * x;
            scale += std::abs(q.weight) * x.norm();
        }
        Eigen::BDCSVD<MatrixXc> svd(moment);
        const auto& sv = svd.singularValues();
        if (!(sv[0] > 1e-8 * scale)) return 0;  // projection of empty spectrum
        int rank = 0;
        for (int i = 0; i < sv.size(); ++i)
            if (sv[i] >= 1e-8 * sv[0]) ++rank;
        return rank;
    };

    const double radius = 10.0 * cfg.eps0;
    const int cap = 13;
    int m = probes;
    for (;;) {
        const int inner = rank_on_circle(radius, m);
        if (inner == m && m < cap) {
            m += 2;
            continue;
        }
        const int outer = rank_on_circle(2.0 * radius, std::max(m, inner + 2));
        if (outer != inner)
            throw std::runtime_error(
                "multiplicity: extra spectrum in the annulus around lambda; re-isolate the "
                "eigenvalue with a finer search first");
        return inner;
    }
}

}  // namespace teig
