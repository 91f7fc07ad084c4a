#pragma once

// Hull-White one-factor short-rate model
//
//   dr(t) = lambda (theta(t) - r(t)) dt + eta dW(t)
//
// Internally the rate is split as r(t) = x(t) + phi(t) with x an
// Ornstein-Uhlenbeck factor started at zero and phi(t) the deterministic
// shift that fits today's discount curve:
//
//   phi(t) = f(0,t) + eta^2 / (2 lambda^2) (1 - e^{-lambda t})^2.
//
// Bond prices are then exp(A + B r) with B(tau) = -(1 - e^{-lambda tau}) / lambda,
// and every analytic formula below is expressed through x to avoid
// differentiating the curve twice.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "prepay/curve.hpp"
#include "prepay/parallel.hpp"

namespace prepay {

struct HullWhiteParams {
    double lambda = 0.0;  // mean reversion per year
    double eta = 0.0;     // absolute volatility per sqrt(year)
};

enum class OptionType { Call, Put };
enum class SwaptionType { Payer, Receiver };

class HullWhite {
   public:
    HullWhite(YieldCurve curve, HullWhiteParams params);

    const YieldCurve& curve() const { return curve_; }
    const HullWhiteParams& params() const { return params_; }
    double lambda() const { return params_.lambda; }
    double eta() const { return params_.eta; }

    /// B(tau) = -(1 - exp(-lambda tau)) / lambda (negative for tau > 0).
    double B(double tau) const;

    /// Deterministic shift phi(t) with r(t) = x(t) + phi(t).
    double phi(double t) const;

    /// theta(t) = f_t(0,t)/lambda + f(0,t) + eta^2/(2 lambda^2)(1 - e^{-2 lambda t}).
    double theta(double t) const;

    /// Variance of x(t) and of int_0^t x(s) ds, both under Q with x(0) = 0.
    double factor_variance(double t) const;
    double integrated_variance(double t) const;

    /// P(t,T) given the OU factor x(t).
    double bond_price_x(double t, double T, double x_t) const;

    /// P(t,T) = exp(A(tau) + B(tau) r(t)).
    double bond_price(double t, double T, double r_t) const;

    /// European option at time t (state x_t) expiring at T on a zero bond
    /// maturing at S > T, unit face, strike X.
    double bond_option(OptionType type, double t, double x_t, double T, double S,
                       double strike) const;

   private:
    YieldCurve curve_;
    HullWhiteParams params_;
};

// --------------------------------------------------------------------------
// Swaptions (Jamshidian decomposition)

/// Pre-solved decomposition of a swaption with annual fixed leg into zero
/// bond options. The critical factor value does not depend on the valuation
/// state, so one decomposition prices the swaption at any (t, x_t) with t < expiry.
class JamshidianSwaption {
   public:
    JamshidianSwaption(const HullWhite& model, double expiry, double end, double strike,
                       SwaptionType type);

    double price(const HullWhite& model, double t = 0.0, double x_t = 0.0) const;

    double expiry() const { return expiry_; }
    double end() const { return end_; }
    double strike() const { return strike_; }
    double critical_factor() const { return x_star_; }
    SwaptionType type() const { return type_; }
    const std::vector<double>& pay_times() const { return pay_times_; }
    const std::vector<double>& coupons() const { return coupons_; }
    const std::vector<double>& bond_strikes() const { return bond_strikes_; }

   private:
    double expiry_, end_, strike_;
    SwaptionType type_;
    std::vector<double> pay_times_;
    std::vector<double> coupons_;
    std::vector<double> bond_strikes_;
    double x_star_ = 0.0;
};

/// Swaption value per unit notional at t = 0; `tenor` in whole years.
double hw_swaption_price(const HullWhite& model, double expiry, double tenor, double strike,
                         SwaptionType type);

/// Floorlet paying (K - L(T1;T1,T2))^+ at T2 (unit notional, tau = T2 - T1).
double hw_floorlet_price(const HullWhite& model, double t1, double t2, double strike);

/// Forward swap rate and annuity of the swap (expiry, expiry + tenor] on the model curve.
struct ForwardSwap {
    double rate;
    double annuity;
};
ForwardSwap forward_swap(const YieldCurve& curve, double expiry, double tenor);

// --------------------------------------------------------------------------
// Bachelier (normal) model

/// Price of a payer/receiver swaption under a normal model of the swap rate.
double bachelier_price(SwaptionType type, double forward, double strike, double normal_vol,
                       double expiry, double annuity);

/// Normal implied vol of an ATM swaption. Inverts price = A sigma sqrt(T/(2 pi)).
double bachelier_implied_vol(double price, double forward, double annuity, double expiry);

/// Normal implied vol for a general strike (safeguarded Newton on vega).
double bachelier_implied_vol(SwaptionType type, double price, double forward, double strike,
                             double annuity, double expiry);

// --------------------------------------------------------------------------
// Calibration

struct SwaptionQuote {
    double expiry_years = 0.0;
    double tenor_years = 0.0;
    double normal_vol = 0.0;  // decimal: 0.006198 = 61.98 bps
};

struct HwCalibration {
    HullWhiteParams params;
    std::vector<double> model_vols;  // normal vols implied by the fitted model
    std::vector<double> model_prices;
    std::vector<double> market_prices;
    double objective = 0.0;  // sum of squared vol errors
    int iterations = 0;
};

struct CalibrationOptions {
    HullWhiteParams initial{0.05, 0.01};
    double tolerance = 1e-10;
    int max_iterations = 2000;
    // Keep lambda fixed and fit eta only (one-quote calibration).
    bool fix_lambda = false;
};

/// Nelder-Mead on (log lambda, log eta) minimizing squared normal-vol errors
/// of ATM swaptions. Throws CalibrationError on non-convergence.
HwCalibration calibrate_hw(const YieldCurve& curve, std::span<const SwaptionQuote> quotes,
                           const CalibrationOptions& options = {});

/// Thrown when the optimizer does not converge; carries the best point found.
class CalibrationError : public std::runtime_error {
   public:
    CalibrationError(const std::string& what, HwCalibration best)
        : std::runtime_error(what), best_(std::move(best)) {}
    const HwCalibration& best() const { return best_; }

   private:
    HwCalibration best_;
};

/// ATM normal vol implied by the model for the (expiry, tenor) swaption.
double hw_implied_normal_vol(const HullWhite& model, double expiry, double tenor);

// --------------------------------------------------------------------------
// Market swaption vol matrix (rows = expiries, columns = tenors, cells in bps)

struct VolMatrix {
    std::vector<std::string> expiry_labels;
    std::vector<std::string> tenor_labels;
    std::vector<double> expiries;  // years
    std::vector<double> tenors;    // years
    std::vector<std::vector<double>> vols_bps;

    /// Exact lookup; InputError if the node is not in the matrix.
    double vol_bps(double expiry, double tenor) const;
};

/// Parses labels like "1Mo", "3Mo", "1Yr", "10Yr" (also "1M"/"1Y") to years.
double parse_tenor_label(const std::string& label);

VolMatrix read_vol_matrix_csv(const std::filesystem::path& path);

/// Named instrument sets. "counterdiag10y" = 1Y-10Y, 3Y-7Y, 5Y-5Y, 7Y-3Y, 9Y-1Y.
std::vector<SwaptionQuote> select_instruments(const VolMatrix& m, const std::string& set_name);

// --------------------------------------------------------------------------
// Path simulation

struct PathSet {
    std::vector<double> grid;  // T_0 = 0 < T_1 < ... < T_M
    RowMatrix factor;          // x(T_i)        [n_paths x (M+1)]
    RowMatrix short_rate;      // r(T_i)        [n_paths x (M+1)]
    RowMatrix money_market;    // M(T_i), M(0) = 1
    std::uint64_t seed = 0;
    bool antithetic = true;

    std::size_t n_paths() const { return static_cast<std::size_t>(factor.rows()); }
    std::size_t n_dates() const { return grid.size(); }
};

/// Exact Gaussian transitions on the grid: x(T_{i+1}) and int x ds over the
/// step are drawn jointly from their conditional law (two normals per step),
/// and the deterministic part of int r is added analytically, so 1/M(T)
/// discounts without bias. With antithetic on, path 2k+1 uses the negated
/// normals of path 2k (n_paths must then be even).
PathSet simulate_paths(const HullWhite& model, std::span<const double> grid, std::size_t n_paths,
                       std::uint64_t seed, bool antithetic = true);

}  // namespace prepay
