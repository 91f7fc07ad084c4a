#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace prepay {

/// Spot-starting par swap quote used as a curve-building instrument.
struct SwapQuote {
    int maturity_years = 0;
    double par_rate = 0.0;  // decimal, 0.0088 = 88 bps
    int fixed_frequency = 1;
};

/// Discount curve P(0, t) with log-linear interpolation in the discount
/// factor (piecewise-constant instantaneous forwards). Immutable after
/// construction.
class YieldCurve {
   public:
    /// `times` must be strictly increasing and positive; P(0,0) = 1 is implied.
    YieldCurve(std::vector<double> times, std::vector<double> discount_factors,
               bool allow_extrapolation = false);

    double discount(double t) const;

    /// Simple forward rate over [t_start, t_end] seen from today.
    double forward_libor(double t_start, double t_end) const;

    /// Forward par swap rate for fixed payments from t_start to t_end.
    double swap_rate(double t_start, double t_end, int frequency = 1) const;

    /// Sum of tau_k P(0, t_k) over the fixed schedule (t_start, t_end].
    double annuity(double t_start, double t_end, int frequency = 1) const;

    /// f(0,t) by a central difference of log P with step 1e-4 years
    /// (one-sided near t = 0).
    double instantaneous_forward(double t) const;

    /// d f(0,t) / dt by the second central difference of log P.
    double forward_slope(double t) const;

    const std::vector<double>& pillar_times() const { return times_; }
    const std::vector<double>& pillar_discounts() const { return dfs_; }
    double max_time() const { return times_.back(); }
    bool extrapolates() const { return allow_extrapolation_; }

    YieldCurve with_extrapolation(bool allow) const;

   private:
    std::vector<double> times_;  // includes 0
    std::vector<double> dfs_;
    std::vector<double> log_dfs_;
    bool allow_extrapolation_;
};

/// Fixed payment times (t_start, t_end] at the given frequency.
std::vector<double> fixed_schedule(double t_start, double t_end, int frequency);

/// Sequential bootstrap: each new pillar solved by bisection on its discount
/// factor in [1e-8, 2] so that the quote reprices at par.
YieldCurve bootstrap(std::span<const SwapQuote> quotes, bool allow_extrapolation = false);

/// CSV with header `maturity_years,par_rate,fixed_frequency`.
std::vector<SwapQuote> read_swap_quotes_csv(const std::filesystem::path& path);

/// Label like "10Y" for a spine quote.
std::string quote_label(const SwapQuote& q);

}  // namespace prepay
