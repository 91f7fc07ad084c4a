#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "prepay/curve.hpp"
#include "prepay/hedge.hpp"
#include "prepay/ias_pricer.hpp"
#include "prepay/shortrate.hpp"

namespace prepay {

/// Values of several instruments under one model. Each entry holds either a
/// single analytic value or per-sample Monte Carlo values (antithetic pairs
/// already averaged); the instrument value is their mean.
using InstrumentSamples = std::vector<std::vector<double>>;
using Pricer = std::function<InstrumentSamples(const HullWhite&)>;

/// Market inputs that the model is rebuilt from on every bump.
struct MarketSetup {
    std::vector<SwapQuote> quotes;
    bool extrapolate = false;
    HullWhiteParams params;               // used as-is for rate bumps
    std::vector<SwaptionQuote> vols;      // calibration set for vol bumps
    CalibrationOptions calibration;
};

struct GreekProfile {
    std::string greek;                      // delta | gamma | vega
    std::vector<std::string> buckets;       // bumped quotes
    std::vector<std::string> instruments;
    Eigen::MatrixXd values;                 // [bucket x instrument], currency per 1bp (gamma: per 1bp^2)
    Eigen::MatrixXd std_errors;
    double h = 1e-4;
    std::string scheme;                     // central | forward
};

struct RateGreeks {
    GreekProfile delta;
    GreekProfile gamma;
};

/// Central differences in each spine swap rate: the curve is re-bootstrapped
/// from the bumped quotes, Hull-White parameters are held fixed, and the
/// pricer sees the same random numbers in every scenario.
RateGreeks rate_greeks(const MarketSetup& market, const Pricer& pricer,
                       const std::vector<std::string>& instruments, double h = 1e-4);

/// Delta to a parallel shift of all spine rates, per instrument (currency per 1bp).
Eigen::VectorXd parallel_delta(const MarketSetup& market, const Pricer& pricer, double h = 1e-4);

/// Forward differences in each calibration vol with (lambda, eta)
/// recalibrated to the bumped set.
GreekProfile vega_profile(const MarketSetup& market, const Pricer& pricer,
                          const std::vector<std::string>& instruments, double h = 1e-4);

/// Base-case calibration used by vega_profile.
HwCalibration calibrate_market(const MarketSetup& market, std::span<const SwaptionQuote> vols);

/// Pricer returning the IAS path samples of `scenario` (same seed every call).
Pricer ias_sample_pricer(const IasScenario& scenario);

std::string vol_label(const SwaptionQuote& q);

/// Gamma-matching swaption weights for a static hedge. Columns of the Gamma
/// profile are the IAS, the amortizing swap leg of `portfolio`, then one unit
/// of each swaption in `cells`, all struck at the portfolio rate.
struct GammaHedge {
    RateGreeks greeks;
    std::vector<Cell> cells;
    GammaFit fit;
    // ||Gamma_IAS - Gamma_Pi(w)||_2 for w*, w_gamma and the average.
    double error_value_weights = 0.0;
    double error_gamma_weights = 0.0;
    double error_averaged = 0.0;
};

GammaHedge gamma_hedge(const MarketSetup& market, const IasScenario& scenario,
                       const HedgePortfolio& portfolio, std::span<const Cell> cells,
                       double h = 1e-4, bool allow_short = true);

}  // namespace prepay
