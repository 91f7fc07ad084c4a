#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "prepay/errors.hpp"
#include "prepay/shortrate.hpp"

namespace prepay {

PathSet simulate_paths(const HullWhite& model, std::span<const double> grid, std::size_t n_paths,
                       std::uint64_t seed, bool antithetic) {
    require(!grid.empty() && grid.front() == 0.0, "simulate_paths: grid must start at t0 = 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        require(grid[i] > grid[i - 1], "simulate_paths: grid must be strictly increasing");
    require(n_paths >= 2, "simulate_paths: need at least 2 paths");
    require(!antithetic || n_paths % 2 == 0, "simulate_paths: antithetic sampling needs an even path count");

    const std::size_t n_dates = grid.size();
    const std::size_t n_steps = n_dates - 1;
    const double a = model.lambda();

    // Per step, (x(T_{i+1}), int x ds) given x(T_i) is bivariate Gaussian:
    //   x'  = decay x + sd z1
    //   int = gain x + load1 z1 + load2 z2
    std::vector<double> decay(n_steps), sd(n_steps), gain(n_steps), load1(n_steps), load2(n_steps),
        drift(n_steps), phi(n_dates);
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double dt = grid[i + 1] - grid[i];
        decay[i] = std::exp(-a * dt);
        const double var_x = model.factor_variance(dt);
        const double var_int = model.integrated_variance(dt);
        const double b = -std::expm1(-a * dt) / a;
        const double cov = 0.5 * model.eta() * model.eta() * b * b;
        sd[i] = std::sqrt(var_x);
        gain[i] = b;
        load1[i] = sd[i] > 0.0 ? cov / sd[i] : 0.0;
        load2[i] = std::sqrt(std::max(0.0, var_int - load1[i] * load1[i]));
        // int_{T_i}^{T_{i+1}} phi(s) ds = [-ln P(0,t) + V(0,t)/2] evaluated between the dates
        auto cumulative = [&](double t) {
            return -std::log(model.curve().discount(t)) + 0.5 * model.integrated_variance(t);
        };
        drift[i] = cumulative(grid[i + 1]) - cumulative(grid[i]);
    }
    for (std::size_t i = 0; i < n_dates; ++i) phi[i] = model.phi(grid[i]);

    PathSet out;
    out.grid.assign(grid.begin(), grid.end());
    out.seed = seed;
    out.antithetic = antithetic;
    out.factor = RowMatrix::Zero(static_cast<Eigen::Index>(n_paths), static_cast<Eigen::Index>(n_dates));
    out.short_rate.resize(out.factor.rows(), out.factor.cols());
    out.money_market.resize(out.factor.rows(), out.factor.cols());

    const std::size_t n_blocks = (n_paths + kPathBlockSize - 1) / kPathBlockSize;
    parallel_for_blocks(n_blocks, [&](std::size_t block) {
        std::mt19937_64 rng(stream_seed(seed, block));
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<double> z(2 * n_steps);
        const std::size_t first = block * kPathBlockSize;
        const std::size_t last = std::min(n_paths, first + kPathBlockSize);
        for (std::size_t p = first; p < last; ++p) {
            const bool mirror = antithetic && (p % 2 == 1);
            if (!mirror)
                for (auto& v : z) v = normal(rng);
            const double sign = mirror ? -1.0 : 1.0;
            const auto row = static_cast<Eigen::Index>(p);
            double x = 0.0, log_m = 0.0;
            out.factor(row, 0) = 0.0;
            out.short_rate(row, 0) = phi[0];
            out.money_market(row, 0) = 1.0;
            for (std::size_t i = 0; i < n_steps; ++i) {
                const double z1 = sign * z[2 * i], z2 = sign * z[2 * i + 1];
                const double x_next = decay[i] * x + sd[i] * z1;
                log_m += drift[i] + gain[i] * x + load1[i] * z1 + load2[i] * z2;
                x = x_next;
                const auto col = static_cast<Eigen::Index>(i + 1);
                out.factor(row, col) = x;
                out.short_rate(row, col) = x + phi[i + 1];
                out.money_market(row, col) = std::exp(log_m);
            }
            if (!std::isfinite(log_m)) {
                std::ostringstream msg;
                msg << "simulate_paths: non-finite value on path " << p;
                throw NumericalError(msg.str());
            }
        }
    });
    return out;
}

}  // namespace prepay
