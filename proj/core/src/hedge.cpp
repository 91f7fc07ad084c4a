#include "prepay/hedge.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "prepay/errors.hpp"

namespace prepay {

std::vector<std::pair<int, int>> SwaptionGrid::nonzero() const {
    std::vector<Cell> out;
    for (int i = 1; i < maturity; ++i)
        for (int l = i + 1; l <= maturity; ++l)
            if (w(i, l) != 0.0) out.emplace_back(i, l);
    return out;
}

std::vector<Cell> diagonal_cells(int m) {
    std::vector<Cell> out;
    for (int i = 1; i < m; ++i) out.emplace_back(i, m);
    return out;
}

std::vector<Cell> full_cells(int m) {
    std::vector<Cell> out;
    for (int i = 1; i < m; ++i)
        for (int l = i + 1; l <= m; ++l) out.emplace_back(i, l);
    return out;
}

std::vector<Cell> single_cell(int start, int end) {
    require(start >= 1 && end > start, "single_cell: need 1 <= start < end");
    return {{start, end}};
}

std::string cell_label(const Cell& c) {
    std::ostringstream os;
    os << c.first << "Y-" << (c.second - c.first) << "Y";
    return os.str();
}

std::vector<double> HedgePortfolio::ladder() const {
    std::vector<double> d(swap_notional.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < swap_notional.size(); ++i) {
        d[i] = swap_notional[i] - prev;
        prev = swap_notional[i];
    }
    return d;
}

std::vector<double> upper_envelope(const NotionalPathSet& npaths) {
    require(npaths.n_paths() > 0, "upper_envelope: empty path set");
    const Eigen::RowVectorXd mx = npaths.notional.colwise().maxCoeff();
    return {mx.data(), mx.data() + mx.size()};
}

HedgePortfolio build_linear_hedge(const NotionalPathSet& npaths, double rate) {
    require(npaths.n_paths() > 0, "build_linear_hedge: empty path set");
    const Eigen::RowVectorXd mean = npaths.notional.colwise().mean();
    HedgePortfolio p;
    p.rate = rate;
    p.swap_notional.assign(mean.data(), mean.data() + mean.size() - 1);
    p.swaptions = SwaptionGrid(static_cast<int>(npaths.maturity()));
    return p;
}

HedgePortfolio build_envelope_hedge(const NotionalPathSet& npaths, double rate) {
    const auto env = upper_envelope(npaths);
    HedgePortfolio p;
    p.rate = rate;
    p.swap_notional.assign(env.begin(), env.end() - 1);
    p.swaptions = SwaptionGrid(static_cast<int>(npaths.maturity()));
    return p;
}

double portfolio_notional(const NotionalPathSet& npaths, const HedgePortfolio& pf, int k, std::size_t j) {
    const int m = pf.maturity();
    require(k >= 0 && k < m, "portfolio_notional: date index out of range");
    const auto p = static_cast<Eigen::Index>(j);
    double n = pf.swap_notional[static_cast<std::size_t>(k)];
    for (int i = 1; i <= k; ++i) {
        if (npaths.exercise(p, i) == 0.0) continue;
        for (int l = k + 1; l <= m; ++l) n -= pf.swaptions(i, l);
    }
    return n;
}

double notional_mismatch(const NotionalPathSet& npaths, const HedgePortfolio& pf) {
    const int m = pf.maturity();
    double total = 0.0;
    for (std::size_t j = 0; j < npaths.n_paths(); ++j)
        for (int k = 1; k < m; ++k) {
            const double r = npaths.notional(static_cast<Eigen::Index>(j), k) - portfolio_notional(npaths, pf, k, j);
            total += r * r;
        }
    return total / static_cast<double>(npaths.n_paths());
}

Eigen::VectorXd notional_mismatch_gradient(const NotionalPathSet& npaths, const HedgePortfolio& pf,
                                           std::span<const Cell> cells) {
    const int m = pf.maturity();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cells.size()));
    for (std::size_t j = 0; j < npaths.n_paths(); ++j) {
        const auto p = static_cast<Eigen::Index>(j);
        for (int k = 1; k < m; ++k) {
            const double r = npaths.notional(p, k) - portfolio_notional(npaths, pf, k, j);
            for (std::size_t c = 0; c < cells.size(); ++c) {
                const auto [i, l] = cells[c];
                if (i <= k && k < l && npaths.exercise(p, i) != 0.0) g(static_cast<Eigen::Index>(c)) += 2.0 * r;
            }
        }
    }
    return g / static_cast<double>(npaths.n_paths());
}

namespace {

// C(i,i') = sum_j 1_i 1_i', H(i,k) = sum_j 1_i (N_AS(T_k) - N_IAS(T_k)).
struct ExerciseMoments {
    Eigen::MatrixXd C, H;
};

ExerciseMoments exercise_moments(const NotionalPathSet& npaths, const std::vector<double>& env) {
    const int m = static_cast<int>(npaths.maturity());
    const std::size_t n = npaths.n_paths();
    const std::size_t n_blocks = (n + kPathBlockSize - 1) / kPathBlockSize;
    std::vector<ExerciseMoments> parts(n_blocks, {Eigen::MatrixXd::Zero(m, m), Eigen::MatrixXd::Zero(m, m)});
    parallel_for_blocks(n_blocks, [&](std::size_t b) {
        auto& part = parts[b];
        const std::size_t last = std::min(n, (b + 1) * kPathBlockSize);
        for (std::size_t j = b * kPathBlockSize; j < last; ++j) {
            const auto p = static_cast<Eigen::Index>(j);
            for (int i = 1; i < m; ++i) {
                if (npaths.exercise(p, i) == 0.0) continue;
                for (int i2 = 1; i2 < m; ++i2)
                    if (npaths.exercise(p, i2) != 0.0) part.C(i, i2) += 1.0;
                for (int k = 1; k < m; ++k)
                    part.H(i, k) += env[static_cast<std::size_t>(k)] - npaths.notional(p, k);
            }
        }
    });
    ExerciseMoments out{Eigen::MatrixXd::Zero(m, m), Eigen::MatrixXd::Zero(m, m)};
    for (const auto& part : parts) {
        out.C += part.C;
        out.H += part.H;
    }
    return out;
}

void finish_fit(WeightFit& fit, const NotionalPathSet& npaths, std::span<const Cell> cells,
                const Eigen::VectorXd& w, const HedgePortfolio& base) {
    for (std::size_t c = 0; c < cells.size(); ++c)
        fit.weights(cells[c].first, cells[c].second) = w(static_cast<Eigen::Index>(c));
    HedgePortfolio pf = base;
    pf.swaptions = fit.weights;
    fit.objective = notional_mismatch(npaths, pf);
    const int m = pf.maturity();
    fit.residual.assign(static_cast<std::size_t>(std::max(m - 1, 0)), 0.0);
    for (std::size_t j = 0; j < npaths.n_paths(); ++j)
        for (int k = 1; k < m; ++k) {
            const double r = npaths.notional(static_cast<Eigen::Index>(j), k) - portfolio_notional(npaths, pf, k, j);
            fit.residual[static_cast<std::size_t>(k - 1)] += r * r;
        }
    for (auto& r : fit.residual) r /= static_cast<double>(npaths.n_paths());
}

}  // namespace

WeightFit calibrate_diagonal(const NotionalPathSet& npaths, double rate) {
    require(npaths.n_paths() > 0, "calibrate_diagonal: empty path set");
    const int m = static_cast<int>(npaths.maturity());
    require(m >= 2, "calibrate_diagonal: maturity must be at least 2 years");
    const auto base = build_envelope_hedge(npaths, rate);
    const auto env = upper_envelope(npaths);
    const auto mom = exercise_moments(npaths, env);

    WeightFit fit;
    fit.weights = SwaptionGrid(m);
    fit.A = Eigen::MatrixXd::Zero(m - 1, m - 1);
    fit.b = Eigen::VectorXd::Zero(m - 1);
    for (int i = 1; i < m; ++i) {
        for (int i2 = 1; i2 < m; ++i2) fit.A(i - 1, i2 - 1) = (m - std::max(i, i2)) * mom.C(i, i2);
        for (int k = i; k < m; ++k) fit.b(i - 1) += mom.H(i, k);
        if (mom.C(i, i) == 0.0) fit.null_cells.emplace_back(i, m);
    }
    const auto cells = diagonal_cells(m);
    const Eigen::VectorXd w = min_norm_solve(fit.A, fit.b, &fit.rank);
    finish_fit(fit, npaths, cells, w, base);
    return fit;
}

WeightFit calibrate_numeric(const NotionalPathSet& npaths, double rate, std::span<const Cell> cells,
                            bool allow_short) {
    require(npaths.n_paths() > 0, "calibrate_numeric: empty path set");
    require(!cells.empty(), "calibrate_numeric: empty active set");
    const int m = static_cast<int>(npaths.maturity());
    for (const auto& [i, l] : cells)
        require(i >= 1 && i < l && l <= m, "calibrate_numeric: cell outside the swaption grid");
    const auto base = build_envelope_hedge(npaths, rate);
    const auto env = upper_envelope(npaths);
    const auto mom = exercise_moments(npaths, env);

    const auto n = static_cast<Eigen::Index>(cells.size());
    WeightFit fit;
    fit.weights = SwaptionGrid(m);
    fit.A = Eigen::MatrixXd::Zero(n, n);
    fit.b = Eigen::VectorXd::Zero(n);
    for (Eigen::Index s = 0; s < n; ++s) {
        const auto [i, l] = cells[static_cast<std::size_t>(s)];
        for (Eigen::Index s2 = 0; s2 < n; ++s2) {
            const auto [i2, l2] = cells[static_cast<std::size_t>(s2)];
            const int overlap = std::min(l, l2) - std::max(i, i2);
            if (overlap > 0) fit.A(s, s2) = overlap * mom.C(i, i2);
        }
        for (int k = i; k < l && k < m; ++k) fit.b(s) += mom.H(i, k);
        if (mom.C(i, i) == 0.0) fit.null_cells.emplace_back(i, l);
    }

    Eigen::VectorXd w;
    if (allow_short) {
        w = min_norm_solve(fit.A, fit.b, &fit.rank);
    } else {
        // A = V D V^T: minimize |D^1/2 V^T w - D^-1/2 V^T b|^2 subject to w >= 0
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fit.A);
        const Eigen::VectorXd d = eig.eigenvalues().cwiseMax(0.0);
        const double cut = 1e-12 * std::max(d.maxCoeff(), 1e-300);
        Eigen::VectorXd sq = d.cwiseSqrt(), inv = Eigen::VectorXd::Zero(n);
        fit.rank = 0;
        for (Eigen::Index k = 0; k < n; ++k)
            if (d(k) > cut) {
                inv(k) = 1.0 / sq(k);
                ++fit.rank;
            }
        const Eigen::MatrixXd R = sq.asDiagonal() * eig.eigenvectors().transpose();
        const Eigen::VectorXd t = inv.asDiagonal() * (eig.eigenvectors().transpose() * fit.b);
        w = nnls(R, t);
    }
    finish_fit(fit, npaths, cells, w, base);
    return fit;
}

PortfolioValue price_portfolio(const HedgePortfolio& pf, const HullWhite& model) {
    PortfolioValue out;
    out.swap_value = price_amortizing_swap(model.curve(), pf.rate, pf.swap_notional);
    for (const auto& cell : pf.swaptions.nonzero()) {
        CostRow row;
        row.cell = cell;
        row.weight = pf.swaptions(cell.first, cell.second);
        row.unit_price = JamshidianSwaption(model, cell.first, cell.second, pf.rate, SwaptionType::Receiver)
                             .price(model);
        row.cost = row.weight * row.unit_price;
        out.swaption_cost += row.cost;
        out.rows.push_back(row);
    }
    out.value = out.swap_value - out.swaption_cost;
    return out;
}

std::vector<double> forward_portfolio_values(const HullWhite& model, const PathSet& paths,
                                             const NotionalPathSet& npaths, const HedgePortfolio& pf) {
    const int m = pf.maturity();
    require(static_cast<int>(npaths.maturity()) == m, "portfolio and notional paths differ in maturity");
    require(paths.grid.size() == npaths.grid.size() && paths.n_paths() == npaths.n_paths(),
            "forward_portfolio_values: rate and notional paths do not match");
    const GridBonds bonds(model, npaths.grid);
    const double K = pf.rate;

    // Receiver swaption (e, l) at T_k < T_e: sum_c coupon_c ZBC(T_k; T_e, T_{e+c}, X_c)
    // with bonds read off the yearly grid.
    struct Leg {
        Cell cell;
        double weight;
        std::vector<double> coupons, strikes;
        RowMatrix sigma;  // [k x coupon] bond option vol
        bool worthless;
    };
    std::vector<Leg> legs;
    for (const auto& c : pf.swaptions.nonzero()) {
        const auto [e, l] = c;
        const JamshidianSwaption js(model, e, l, K, SwaptionType::Receiver);
        Leg leg{c, pf.swaptions(e, l), js.coupons(), js.bond_strikes(), RowMatrix::Zero(e, l - e),
                std::isinf(js.critical_factor())};
        for (int k = 0; k < e; ++k)
            for (int q = 0; q < l - e; ++q)
                leg.sigma(k, q) = std::sqrt(model.factor_variance(e - k)) * -model.B(q + 1.0);
        legs.push_back(std::move(leg));
    }

    const std::size_t n = paths.n_paths();
    const std::size_t n_blocks = (n + kPathBlockSize - 1) / kPathBlockSize;
    RowMatrix sums = RowMatrix::Zero(static_cast<Eigen::Index>(n_blocks), m);
    parallel_for_blocks(n_blocks, [&](std::size_t b) {
        const std::size_t last = std::min(n, (b + 1) * kPathBlockSize);
        std::vector<double> swap_pv(static_cast<std::size_t>(m) + 1), bond(static_cast<std::size_t>(m) + 1);
        for (std::size_t j = b * kPathBlockSize; j < last; ++j) {
            const auto p = static_cast<Eigen::Index>(j);
            for (int k = 0; k < m; ++k) {
                const double x = paths.factor(p, k);
                const auto kk = static_cast<std::size_t>(k);
                for (int i = k; i <= m; ++i) bond[static_cast<std::size_t>(i)] = bonds(kk, static_cast<std::size_t>(i), x);
                // unit receiver swap paying T_{k+1}..T_l, cumulated in l
                swap_pv[kk] = 0.0;
                double v = 0.0;
                for (int i = k + 1; i <= m; ++i) {
                    const auto ii = static_cast<std::size_t>(i);
                    const double cf = (K + 1.0) * bond[ii] - bond[ii - 1];
                    swap_pv[ii] = swap_pv[ii - 1] + cf;
                    v += pf.swap_notional[ii - 1] * cf;
                }
                for (const auto& leg : legs) {
                    const auto [e, l] = leg.cell;
                    if (l <= k) continue;
                    double unit = 0.0;
                    if (e <= k) {
                        if (npaths.exercise(p, e) != 0.0) unit = swap_pv[static_cast<std::size_t>(l)];
                    } else if (!leg.worthless) {
                        const double p_t = bond[static_cast<std::size_t>(e)];
                        for (int q = 0; q < l - e; ++q) {
                            const double p_s = bond[static_cast<std::size_t>(e + q + 1)];
                            const double X = leg.strikes[static_cast<std::size_t>(q)];
                            const double sp = leg.sigma(k, q);
                            double zbc;
                            if (sp <= 1e-300) {
                                zbc = std::max(p_s - X * p_t, 0.0);
                            } else {
                                const double h = std::log(p_s / (X * p_t)) / sp + 0.5 * sp;
                                zbc = p_s * normal_cdf(h) - X * p_t * normal_cdf(h - sp);
                            }
                            unit += leg.coupons[static_cast<std::size_t>(q)] * zbc;
                        }
                    }
                    v -= leg.weight * unit;
                }
                sums(static_cast<Eigen::Index>(b), k) += v;
            }
        }
    });
    std::vector<double> out(static_cast<std::size_t>(m), 0.0);
    for (Eigen::Index b = 0; b < sums.rows(); ++b)
        for (int k = 0; k < m; ++k) out[static_cast<std::size_t>(k)] += sums(b, k);
    for (auto& v : out) v /= static_cast<double>(n);
    return out;
}

HedgeErrorProfile hedge_error_profile(const HullWhite& model, const IasScenario& scenario,
                                      const PathSet& paths, const NotionalPathSet& npaths,
                                      const HedgePortfolio& portfolio) {
    HedgeErrorProfile out;
    out.ias = forward_ias_values(model, scenario, paths, npaths);
    out.portfolio = forward_portfolio_values(model, paths, npaths, portfolio);
    for (std::size_t k = 0; k < out.ias.size(); ++k)
        out.error.push_back(std::abs(out.ias[k] - out.portfolio[k]));
    return out;
}

GammaFit calibrate_gamma(const Eigen::VectorXd& gamma_ias, const Eigen::VectorXd& gamma_swaps,
                         const Eigen::MatrixXd& gamma_swaptions, std::span<const Cell> cells,
                         const SwaptionGrid& value_weights, bool allow_short) {
    require(gamma_ias.size() == gamma_swaps.size() && gamma_ias.size() == gamma_swaptions.rows(),
            "calibrate_gamma: Gamma vectors have different bucket counts");
    require(gamma_swaptions.cols() == static_cast<Eigen::Index>(cells.size()),
            "calibrate_gamma: one Gamma column per swaption required");
    GammaFit out;
    const Eigen::VectorXd rhs = gamma_swaps - gamma_ias;
    Eigen::VectorXd w = min_norm_solve(gamma_swaptions, rhs, &out.rank);
    if (!allow_short) w = nnls(gamma_swaptions, rhs);
    out.gamma_weights = SwaptionGrid(value_weights.maturity);
    for (std::size_t c = 0; c < cells.size(); ++c)
        out.gamma_weights(cells[c].first, cells[c].second) = w(static_cast<Eigen::Index>(c));
    out.averaged = SwaptionGrid(value_weights.maturity);
    out.averaged.w = 0.5 * (value_weights.w + out.gamma_weights.w);
    return out;
}

Strategy parse_strategy(const std::string& s) {
    if (s == "linear") return Strategy::Linear;
    if (s == "diag9" || s == "diagonal") return Strategy::Diagonal;
    if (s == "single-5y5y") return Strategy::Single5y5y;
    if (s == "full") return Strategy::Full;
    if (s == "gamma") return Strategy::Gamma;
    if (s == "avg") return Strategy::Average;
    throw InputError("unknown hedge strategy '" + s + "' (linear|diag9|single-5y5y|full|gamma|avg)");
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::Linear: return "linear";
        case Strategy::Diagonal: return "diag9";
        case Strategy::Single5y5y: return "single-5y5y";
        case Strategy::Full: return "full";
        case Strategy::Gamma: return "gamma";
        case Strategy::Average: return "avg";
    }
    return "?";
}

}  // namespace prepay
