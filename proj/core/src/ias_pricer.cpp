#include "prepay/ias_pricer.hpp"

#include <cmath>
#include <sstream>

#include "prepay/errors.hpp"

namespace prepay {

std::vector<double> mortgage_grid(const MortgageSpec& spec) {
    std::vector<double> g(static_cast<std::size_t>(spec.maturity_years) + 1);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = static_cast<double>(i);
    return g;
}

GridBonds::GridBonds(const HullWhite& model, std::span<const double> grid) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    det_ = RowMatrix::Ones(n, n);
    slope_ = RowMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = i + 1; k < n; ++k) {
            const double t = grid[static_cast<std::size_t>(i)], T = grid[static_cast<std::size_t>(k)];
            det_(i, k) = model.bond_price_x(t, T, 0.0);
            slope_(i, k) = model.B(T - t);
        }
}

double GridBonds::swap_rate(std::size_t i, std::size_t end, double x) const {
    double annuity = 0.0;
    for (std::size_t k = i + 1; k <= end; ++k) annuity += (*this)(i, k, x);
    return (1.0 - (*this)(i, end, x)) / annuity;
}

namespace {

// Column of each mortgage date T_0..T_M in the simulation grid.
std::vector<std::size_t> date_columns(const std::vector<double>& grid, int maturity) {
    std::vector<std::size_t> cols;
    std::size_t c = 0;
    for (int i = 0; i <= maturity; ++i) {
        while (c < grid.size() && grid[c] < i - 1e-9) ++c;
        if (c == grid.size() || std::abs(grid[c] - i) > 1e-9) {
            std::ostringstream msg;
            msg << "simulation grid does not contain mortgage date T=" << i;
            throw InputError(msg.str());
        }
        cols.push_back(c);
    }
    return cols;
}

}  // namespace

NotionalPathSet simulate_notional(const HullWhite& model, const IasScenario& sc,
                                  const PathSet& paths) {
    sc.mortgage.validate();
    const int m = sc.mortgage.maturity_years;
    const auto cols = date_columns(paths.grid, m);
    const auto grid = mortgage_grid(sc.mortgage);
    const GridBonds bonds(model, grid);
    const double K = sc.mortgage.rate;
    const auto n_paths = static_cast<Eigen::Index>(paths.n_paths());
    const auto n_dates = static_cast<Eigen::Index>(m + 1);

    NotionalPathSet out;
    out.grid = grid;
    out.notional = RowMatrix::Zero(n_paths, n_dates);
    out.kappa = RowMatrix::Zero(n_paths, n_dates);
    out.exercise = RowMatrix::Zero(n_paths, n_dates);

    const std::size_t n_blocks = (paths.n_paths() + kPathBlockSize - 1) / kPathBlockSize;
    parallel_for_blocks(n_blocks, [&](std::size_t block) {
        const auto first = static_cast<Eigen::Index>(block * kPathBlockSize);
        const auto last = std::min(n_paths, first + static_cast<Eigen::Index>(kPathBlockSize));
        for (Eigen::Index p = first; p < last; ++p) {
            double n = sc.mortgage.notional;
            out.notional(p, 0) = n;
            for (int i = 1; i <= m; ++i) {
                if (i == m) {
                    out.notional(p, i) = 0.0;
                    break;
                }
                const double x = paths.factor(p, static_cast<Eigen::Index>(cols[static_cast<std::size_t>(i)]));
                const double kappa =
                    bonds.swap_rate(static_cast<std::size_t>(i), static_cast<std::size_t>(m), x) + sc.zeta;
                if (!std::isfinite(kappa)) {
                    std::ostringstream msg;
                    msg << "simulate_notional: non-finite mortgage rate on path " << p << " at T=" << i;
                    throw NumericalError(msg.str());
                }
                const double lam = sc.cpr(K - kappa);
                n *= psi(sc.mortgage.kind, K, lam, m, i - 1);
                out.notional(p, i) = n;
                out.kappa(p, i) = kappa;
                out.exercise(p, i) = K > kappa ? 1.0 : 0.0;
            }
        }
    });
    return out;
}

double price_amortizing_swap(const YieldCurve& curve, double rate, std::span<const double> notionals) {
    double v = 0.0;
    for (std::size_t i = 1; i <= notionals.size(); ++i) {
        const double p_prev = curve.discount(static_cast<double>(i - 1));
        const double p_i = curve.discount(static_cast<double>(i));
        v += notionals[i - 1] * (p_i * (rate + 1.0) - p_prev);
    }
    return v;
}

double price_deterministic_as(const YieldCurve& curve, const MortgageSpec& spec,
                              std::span<const double> lambda_path) {
    for (double l : lambda_path)
        require(l >= 0.0 && l < 1.0, "price_deterministic_as: prepayment rates must lie in [0, 1)");
    const auto rows = schedule(spec, lambda_path);
    std::vector<double> n;
    for (const auto& r : rows) n.push_back(r.notional_before);
    return price_amortizing_swap(curve, spec.rate, n);
}

double atm_mortgage_rate(const YieldCurve& curve, MortgageKind kind, int maturity_years) {
    require(maturity_years >= 1, "atm_mortgage_rate: maturity must be >= 1");
    if (kind == MortgageKind::Bullet) return curve.swap_rate(0.0, maturity_years);
    const std::vector<double> none(static_cast<std::size_t>(maturity_years), 0.0);
    auto value = [&](double k) {
        return price_deterministic_as(curve, MortgageSpec{kind, 1.0, k, maturity_years}, none);
    };
    double lo = -0.5, hi = 1.0;
    require(value(lo) < 0.0 && value(hi) > 0.0, "atm_mortgage_rate: cannot bracket the rate");
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        (value(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> ias_path_values(const HullWhite& model, const IasScenario& sc,
                                    const PathSet& paths, const NotionalPathSet& npaths) {
    const int m = sc.mortgage.maturity_years;
    const auto cols = date_columns(paths.grid, m);
    const GridBonds bonds(model, npaths.grid);
    const double K = sc.mortgage.rate;
    std::vector<double> out(paths.n_paths());
    const std::size_t n_blocks = (paths.n_paths() + kPathBlockSize - 1) / kPathBlockSize;
    parallel_for_blocks(n_blocks, [&](std::size_t block) {
        const std::size_t first = block * kPathBlockSize;
        const std::size_t last = std::min(paths.n_paths(), first + kPathBlockSize);
        for (std::size_t j = first; j < last; ++j) {
            const auto p = static_cast<Eigen::Index>(j);
            double v = 0.0;
            for (int i = 1; i <= m; ++i) {
                const auto c = static_cast<Eigen::Index>(cols[static_cast<std::size_t>(i - 1)]);
                const double bond = bonds(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(i),
                                          paths.factor(p, c));
                v += npaths.notional(p, i - 1) * ((K + 1.0) * bond - 1.0) / paths.money_market(p, c);
            }
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << "price_ias_mc: non-finite value on path " << j;
                throw NumericalError(msg.str());
            }
            out[j] = v;
        }
    });
    return out;
}

McPrice summarize(std::span<const double> samples, bool antithetic) {
    require(samples.size() >= 2, "summarize: need at least 2 samples");
    const std::size_t stride = antithetic ? 2 : 1;
    const std::size_t n = samples.size() / stride;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double y = 0.0;
        for (std::size_t s = 0; s < stride; ++s) y += samples[k * stride + s];
        y /= static_cast<double>(stride);
        sum += y;
        sum_sq += y * y;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / static_cast<double>(n - 1));
    return {mean, std::sqrt(var / static_cast<double>(n)), samples.size()};
}

McPrice price_ias_mc(const HullWhite& model, const IasScenario& sc) {
    const auto grid = mortgage_grid(sc.mortgage);
    const auto paths = simulate_paths(model, grid, sc.n_paths, sc.seed, sc.antithetic);
    const auto npaths = simulate_notional(model, sc, paths);
    const auto samples = ias_path_values(model, sc, paths, npaths);
    return summarize(samples, sc.antithetic);
}

std::vector<double> forward_ias_values(const HullWhite& model, const IasScenario& sc,
                                       const PathSet& paths, const NotionalPathSet& npaths) {
    const int m = sc.mortgage.maturity_years;
    const auto cols = date_columns(paths.grid, m);
    const GridBonds bonds(model, npaths.grid);
    const double K = sc.mortgage.rate;
    const std::size_t n = paths.n_paths();
    const std::size_t n_blocks = (n + kPathBlockSize - 1) / kPathBlockSize;
    RowMatrix block_sums = RowMatrix::Zero(static_cast<Eigen::Index>(n_blocks), m);
    parallel_for_blocks(n_blocks, [&](std::size_t block) {
        const std::size_t first = block * kPathBlockSize;
        const std::size_t last = std::min(n, first + kPathBlockSize);
        std::vector<double> c(static_cast<std::size_t>(m) + 1);
        for (std::size_t j = first; j < last; ++j) {
            const auto p = static_cast<Eigen::Index>(j);
            // c_i: discounted conditional cash flow of period i; V(T_k) = M(T_k) sum_{i>k} c_i
            for (int i = 1; i <= m; ++i) {
                const auto col = static_cast<Eigen::Index>(cols[static_cast<std::size_t>(i - 1)]);
                const double bond = bonds(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(i),
                                          paths.factor(p, col));
                c[static_cast<std::size_t>(i)] =
                    npaths.notional(p, i - 1) * ((K + 1.0) * bond - 1.0) / paths.money_market(p, col);
            }
            double tail = 0.0;
            for (int k = m - 1; k >= 0; --k) {
                tail += c[static_cast<std::size_t>(k + 1)];
                const auto col = static_cast<Eigen::Index>(cols[static_cast<std::size_t>(k)]);
                block_sums(static_cast<Eigen::Index>(block), k) += paths.money_market(p, col) * tail;
            }
        }
    });
    std::vector<double> out(static_cast<std::size_t>(m), 0.0);
    for (Eigen::Index b = 0; b < block_sums.rows(); ++b)
        for (int k = 0; k < m; ++k) out[static_cast<std::size_t>(k)] += block_sums(b, k);
    for (auto& v : out) v /= static_cast<double>(n);
    return out;
}

double price_two_period_annuity(const HullWhite& model, const MortgageSpec& spec, double lambda_max) {
    require(spec.kind == MortgageKind::Annuity && spec.maturity_years == 2,
            "two-period closed form needs a 2-year annuity");
    require(lambda_max >= 0.0 && lambda_max < 1.0, "two-period closed form: lambda_max must lie in [0, 1)");
    const double K = spec.rate;
    const double n_up = spec.notional * psi(spec.kind, K, 0.0, 2.0, 0.0);
    const double n_low = spec.notional * psi(spec.kind, K, lambda_max, 2.0, 0.0);
    const std::vector<double> n{spec.notional, n_up};
    const double v_as = price_amortizing_swap(model.curve(), K, n);
    return v_as - (n_up - n_low) * hw_floorlet_price(model, 1.0, 2.0, K);
}

AverageNotional average_notional(const NotionalPathSet& npaths, const MortgageSpec& spec) {
    require(npaths.n_paths() > 0, "average_notional: empty path set");
    AverageNotional out;
    const Eigen::VectorXd mean = npaths.notional.colwise().mean();
    out.mean.assign(mean.data(), mean.data() + mean.size());
    const int m = spec.maturity_years;
    for (int i = 1; i < m; ++i) {
        const double prev = out.mean[static_cast<std::size_t>(i - 1)];
        const double factor = prev > 0.0 ? out.mean[static_cast<std::size_t>(i)] / prev : 1.0;
        out.implied_cpr.push_back(implied_cpr(spec.kind, spec.rate, factor, m, i - 1));
    }
    return out;
}

}  // namespace prepay
