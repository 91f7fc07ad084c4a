#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "output.hpp"
#include "prepay/curve.hpp"
#include "prepay/greeks.hpp"
#include "prepay/ias_pricer.hpp"
#include "prepay/shortrate.hpp"

namespace prepay::cli {

// Every option the tool understands. Config-file keys are the long option
// names without dashes ("cpr.model = logistic").
struct Settings {
    // market data
    std::string curve = "data/reference_curve.csv";
    bool extrapolate = false;
    std::string vols;
    std::string instruments = "counterdiag10y";
    std::optional<double> hw_lambda, hw_eta;

    // contract
    std::string kind = "bullet";
    double notional = 1e6;
    std::string rate = "atm";
    int maturity = 10;

    // behaviour
    std::string cpr_model = "logistic";
    double cpr_lambda = 0.0;
    double lambda_max = 0.12;
    double epsilon_star = 0.0;
    std::vector<double> alpha{0.06, 0.14, -300.0, 4.0};
    double zeta = 0.0;

    // simulation
    std::size_t paths = 100000;
    std::optional<std::uint64_t> seed;
    bool no_antithetic = false;
    double bump = 1e-4;

    // output and execution
    std::string out;
    std::string output_dir;
    std::size_t threads = 0;

    // subcommand options
    std::string loans;
    std::size_t bins = 56;
    std::string range = "-0.015:0.04";
    bool synthesize = false;
    std::size_t periods = 120;
    std::size_t loans_per_period = 2000;
    std::size_t export_paths = 0;
    std::vector<std::string> strategies{"diag9"};
    bool no_short = false;
    bool no_vega = false;
    std::string report;
};

// Lazily resolved market, contract and scenario objects. Every file that is
// read is registered with the output directory for the manifest.
class Context {
   public:
    Context(Settings s, OutputDir& out, std::ostream& err);

    Settings& settings() { return s_; }
    const std::vector<SwapQuote>& quotes();
    const YieldCurve& curve();
    const VolMatrix& vol_matrix();
    std::vector<SwaptionQuote> calibration_quotes();
    HwCalibration calibration();
    HullWhiteParams hw_params();  // explicit hw.* values, else calibrated
    HullWhite model();

    MortgageSpec mortgage(MortgageKind kind);
    MortgageSpec mortgage() { return mortgage(parse_mortgage_kind(s_.kind)); }
    CprModel cpr() const;
    IasScenario scenario(MortgageKind kind, const CprModel& cpr);
    IasScenario scenario() { return scenario(parse_mortgage_kind(s_.kind), cpr()); }
    MarketSetup market();

    std::uint64_t seed() const;  // InputError when unset
    // Hedging runs on the zero-spread incentive; warns once when zeta was set.
    void force_zero_zeta();

    Json resolved() const;  // config for the manifest (no output paths, no thread count)
    Json scenario_json(const IasScenario& sc) const;

   private:
    Settings s_;
    OutputDir& out_;
    std::ostream& err_;
    std::optional<std::vector<SwapQuote>> quotes_;
    std::optional<YieldCurve> curve_;
    std::optional<VolMatrix> vols_;
    std::optional<HwCalibration> calibration_;
};

}  // namespace prepay::cli
