#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "hypiss/control.hpp"

namespace hypiss::control {

namespace {

void check_grid(const std::vector<double>& grid, const char* name) {
    if (grid.empty()) throw std::invalid_argument(std::string(name) + " grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) throw std::invalid_argument(std::string(name) + " grid must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw std::invalid_argument(std::string(name) + " grid must be strictly increasing");
        }
    }
}

} // namespace

FeasibilityMap grid_search(const Plant& plant, const std::vector<double>& mu_grid,
                           const std::vector<double>& alpha_grid, const GridOptions& opts) {
    plant.validate();
    check_grid(mu_grid, "mu");
    check_grid(alpha_grid, "alpha");

    FeasibilityMap map;
    map.mu_grid = mu_grid;
    map.alpha_grid = alpha_grid;
    const std::size_t total = mu_grid.size() * alpha_grid.size();
    map.cells.resize(total);
    std::vector<std::optional<SynthesisCertificate>> certs(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t idx = next++; idx < total; idx = next++) {
            FeasibilityCell& cell = map.cells[idx];
            cell.mu = mu_grid[idx % mu_grid.size()];
            cell.alpha = alpha_grid[idx / mu_grid.size()];
            try {
                SynthesisResult r = synthesize(plant, cell.mu, cell.alpha, opts.synthesis);
                cell.status = r.status;
                if (r.certificate) {
                    cell.c = r.certificate->c;
                    cell.gamma = std::sqrt(r.certificate->c) * std::exp(0.5 * cell.mu);
                    certs[idx] = std::move(r.certificate);
                }
            } catch (const std::exception&) {
                cell.status = sdp::Status::NumericalFailure;
            }
        }
    };

    unsigned n_workers = opts.workers != 0 ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
    n_workers = static_cast<unsigned>(std::min<std::size_t>(n_workers, total));
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(worker);
        worker();
    }

    // Deterministic reduction: minimal γ, then smaller μ, then smaller α.
    std::optional<std::size_t> best;
    for (std::size_t idx = 0; idx < total; ++idx) {
        const FeasibilityCell& cell = map.cells[idx];
        if (!cell.feasible() || !cell.gamma || !certs[idx]) continue;
        if (!best) {
            best = idx;
            continue;
        }
        const FeasibilityCell& b = map.cells[*best];
        const bool better = *cell.gamma < *b.gamma ||
                            (*cell.gamma == *b.gamma &&
                             (cell.mu < b.mu || (cell.mu == b.mu && cell.alpha < b.alpha)));
        if (better) best = idx;
    }
    if (best) map.best = certs[*best];
    return map;
}

} // namespace hypiss::control
