#include "prepay/greeks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "prepay/errors.hpp"

namespace prepay {

namespace {


YieldCurve build_curve(const MarketSetup& m, std::span<const SwapQuote> quotes, const std::string& bumped) {
    try {
        return bootstrap(quotes, m.extrapolate);
    } catch (const NumericalError& e) {
        throw NumericalError("bump of " + bumped + ": " + e.what());
    }
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Mean and standard error of sum_c coef[c] * samples_c, sample by sample.
std::pair<double, double> combine(const std::vector<const std::vector<double>*>& parts,
                                  const std::vector<double>& coef) {
    std::size_t n = 1;
    for (const auto* p : parts) n = std::max(n, p->size());
    for (const auto* p : parts)
        if (p->size() != 1 && p->size() != n)
            throw NumericalError("greeks: pricer returned inconsistent sample counts across bumps");
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        double d = 0.0;
        for (std::size_t c = 0; c < parts.size(); ++c)
            d += coef[c] * (parts[c]->size() == 1 ? (*parts[c])[0] : (*parts[c])[s]);
        sum += d;
        sum_sq += d * d;
    }
    const double m = sum / static_cast<double>(n);
    if (n < 2) return {m, 0.0};
    const double var = std::max(0.0, (sum_sq - n * m * m) / static_cast<double>(n - 1));
    return {m, std::sqrt(var / static_cast<double>(n))};
}

GreekProfile empty_profile(const std::string& greek, std::size_t n_buckets,
                           const std::vector<std::string>& instruments, double h, const std::string& scheme) {
    GreekProfile g;
    g.greek = greek;
    g.instruments = instruments;
    g.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_buckets),
                                     static_cast<Eigen::Index>(instruments.size()));
    g.std_errors = g.values;
    g.h = h;
    g.scheme = scheme;
    return g;
}

InstrumentSamples run(const Pricer& pricer, const HullWhite& model, std::size_t n_instruments) {
    auto out = pricer(model);
    if (out.size() != n_instruments) {
        std::ostringstream msg;
        msg << "greeks: pricer returned " << out.size() << " instruments, expected " << n_instruments;
        throw InputError(msg.str());
    }
    for (const auto& s : out)
        if (s.empty()) throw InputError("greeks: pricer returned an empty sample set");
    return out;
}

}  // namespace

std::string vol_label(const SwaptionQuote& q) {
    std::ostringstream os;
    os << q.expiry_years << "Y-" << q.tenor_years << "Y";
    return os.str();
}

RateGreeks rate_greeks(const MarketSetup& market, const Pricer& pricer,
                       const std::vector<std::string>& instruments, double h) {
    require(h > 0.0, "rate_greeks: bump size must be positive");
    require(!market.quotes.empty(), "rate_greeks: no spine quotes");
    const std::size_t nb = market.quotes.size(), ni = instruments.size();
    RateGreeks out{empty_profile("delta", nb, instruments, h, "central"),
                   empty_profile("gamma", nb, instruments, h, "central")};

    const HullWhite base_model(build_curve(market, market.quotes, "base curve"), market.params);
    const auto base = run(pricer, base_model, ni);

    for (std::size_t b = 0; b < nb; ++b) {
        const std::string label = quote_label(market.quotes[b]);
        out.delta.buckets.push_back(label);
        out.gamma.buckets.push_back(label);
        auto up_quotes = market.quotes, dn_quotes = market.quotes;
        up_quotes[b].par_rate += h;
        dn_quotes[b].par_rate -= h;
        const HullWhite up_model(build_curve(market, up_quotes, label + " +h"), market.params);
        const HullWhite dn_model(build_curve(market, dn_quotes, label + " -h"), market.params);
        const auto up = run(pricer, up_model, ni);
        const auto dn = run(pricer, dn_model, ni);
        for (std::size_t c = 0; c < ni; ++c) {
            const auto r = static_cast<Eigen::Index>(b), col = static_cast<Eigen::Index>(c);
            const auto [d, d_se] = combine({&up[c], &dn[c]}, {1e-4 / (2.0 * h), -1e-4 / (2.0 * h)});
            const auto [g, g_se] =
                combine({&up[c], &base[c], &dn[c]}, {1e-8 / (h * h), -2e-8 / (h * h), 1e-8 / (h * h)});
            out.delta.values(r, col) = d;
            out.delta.std_errors(r, col) = d_se;
            out.gamma.values(r, col) = g;
            out.gamma.std_errors(r, col) = g_se;
        }
    }
    return out;
}

Eigen::VectorXd parallel_delta(const MarketSetup& market, const Pricer& pricer, double h) {
    require(h > 0.0, "parallel_delta: bump size must be positive");
    auto up_quotes = market.quotes, dn_quotes = market.quotes;
    for (auto& q : up_quotes) q.par_rate += h;
    for (auto& q : dn_quotes) q.par_rate -= h;
    const HullWhite up_model(build_curve(market, up_quotes, "parallel +h"), market.params);
    const HullWhite dn_model(build_curve(market, dn_quotes, "parallel -h"), market.params);
    const auto up = pricer(up_model);
    const auto dn = pricer(dn_model);
    require(up.size() == dn.size(), "parallel_delta: pricer returned different instrument counts");
    Eigen::VectorXd out(static_cast<Eigen::Index>(up.size()));
    for (std::size_t c = 0; c < up.size(); ++c)
        out(static_cast<Eigen::Index>(c)) = (mean(up[c]) - mean(dn[c])) * 1e-4 / (2.0 * h);
    return out;
}

HwCalibration calibrate_market(const MarketSetup& market, std::span<const SwaptionQuote> vols) {
    return calibrate_hw(bootstrap(market.quotes, market.extrapolate), vols, market.calibration);
}

GreekProfile vega_profile(const MarketSetup& market, const Pricer& pricer,
                          const std::vector<std::string>& instruments, double h) {
    require(h > 0.0, "vega_profile: bump size must be positive");
    require(!market.vols.empty(), "vega_profile: no calibration vols");
    const std::size_t nb = market.vols.size(), ni = instruments.size();
    auto out = empty_profile("vega", nb, instruments, h, "forward");
    const YieldCurve curve = build_curve(market, market.quotes, "base curve");

    const auto base_fit = calibrate_hw(curve, market.vols, market.calibration);
    const auto base = run(pricer, HullWhite(curve, base_fit.params), ni);
    CalibrationOptions warm = market.calibration;
    warm.initial = base_fit.params;

    for (std::size_t b = 0; b < nb; ++b) {
        const std::string label = vol_label(market.vols[b]);
        out.buckets.push_back(label);
        auto bumped = market.vols;
        bumped[b].normal_vol += h;
        HwCalibration fit;
        try {
            fit = calibrate_hw(curve, bumped, warm);
        } catch (const CalibrationError& e) {
            throw NumericalError("recalibration after bumping vol " + label + " failed: " + e.what());
        }
        const auto up = run(pricer, HullWhite(curve, fit.params), ni);
        for (std::size_t c = 0; c < ni; ++c) {
            const auto [v, se] = combine({&up[c], &base[c]}, {1e-4 / h, -1e-4 / h});
            out.values(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c)) = v;
            out.std_errors(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c)) = se;
        }
    }
    return out;
}

Pricer ias_sample_pricer(const IasScenario& scenario) {
    return [scenario](const HullWhite& model) {
        const auto grid = mortgage_grid(scenario.mortgage);
        const auto paths = simulate_paths(model, grid, scenario.n_paths, scenario.seed, scenario.antithetic);
        const auto npaths = simulate_notional(model, scenario, paths);
        const auto raw = ias_path_values(model, scenario, paths, npaths);
        std::vector<double> samples;
        if (scenario.antithetic) {
            for (std::size_t k = 0; k + 1 < raw.size(); k += 2) samples.push_back(0.5 * (raw[k] + raw[k + 1]));
        } else {
            samples = raw;
        }
        return InstrumentSamples{samples};
    };
}

GammaHedge gamma_hedge(const MarketSetup& market, const IasScenario& scenario,
                       const HedgePortfolio& portfolio, std::span<const Cell> cells, double h,
                       bool allow_short) {
    require(!cells.empty(), "gamma_hedge: no swaption cells");
    const double rate = portfolio.rate;
    const auto swap_notional = portfolio.swap_notional;
    const std::vector<Cell> cell_list(cells.begin(), cells.end());
    const auto ias = ias_sample_pricer(scenario);
    Pricer pricer = [&](const HullWhite& model) {
        InstrumentSamples out = ias(model);
        out.push_back({price_amortizing_swap(model.curve(), rate, swap_notional)});
        for (const auto& [i, l] : cell_list)
            out.push_back({JamshidianSwaption(model, i, l, rate, SwaptionType::Receiver).price(model)});
        return out;
    };
    std::vector<std::string> names{"ias", "swap_leg"};
    for (const auto& c : cell_list) names.push_back(cell_label(c));

    GammaHedge out;
    out.cells = cell_list;
    out.greeks = rate_greeks(market, pricer, names, h);
    const auto& g = out.greeks.gamma.values;
    const Eigen::VectorXd g_ias = g.col(0), g_swaps = g.col(1);
    const Eigen::MatrixXd G = g.rightCols(static_cast<Eigen::Index>(cell_list.size()));
    out.fit = calibrate_gamma(g_ias, g_swaps, G, cell_list, portfolio.swaptions, allow_short);

    auto error = [&](const SwaptionGrid& w) {
        Eigen::VectorXd wv(static_cast<Eigen::Index>(cell_list.size()));
        for (std::size_t c = 0; c < cell_list.size(); ++c)
            wv(static_cast<Eigen::Index>(c)) = w(cell_list[c].first, cell_list[c].second);
        return (g_ias - (g_swaps - G * wv)).norm();
    };
    out.error_value_weights = error(portfolio.swaptions);
    out.error_gamma_weights = error(out.fit.gamma_weights);
    out.error_averaged = error(out.fit.averaged);
    return out;
}

}  // namespace prepay
