#include "settings.hpp"

#include <cmath>
#include <filesystem>

#include "prepay/csv.hpp"
#include "prepay/errors.hpp"

namespace prepay::cli {

namespace {

void require_file(const std::string& path, const std::string& key) {
    if (path.empty()) throw InputError("missing required setting '" + key + "'");
    if (!std::filesystem::is_regular_file(path))
        throw InputError(key + ": file not found: " + path);
}

}  // namespace

Context::Context(Settings s, OutputDir& out, std::ostream& err)
    : s_(std::move(s)), out_(out), err_(err) {}

const std::vector<SwapQuote>& Context::quotes() {
    if (!quotes_) {
        require_file(s_.curve, "curve");
        out_.add_input(s_.curve);
        quotes_ = read_swap_quotes_csv(s_.curve);
    }
    return *quotes_;
}

const YieldCurve& Context::curve() {
    if (!curve_) curve_ = bootstrap(quotes(), s_.extrapolate);
    return *curve_;
}

const VolMatrix& Context::vol_matrix() {
    if (!vols_) {
        require_file(s_.vols, "vols");
        out_.add_input(s_.vols);
        vols_ = read_vol_matrix_csv(s_.vols);
    }
    return *vols_;
}

std::vector<SwaptionQuote> Context::calibration_quotes() {
    return select_instruments(vol_matrix(), s_.instruments);
}

HwCalibration Context::calibration() {
    if (!calibration_) calibration_ = calibrate_hw(curve(), calibration_quotes());
    return *calibration_;
}

HullWhiteParams Context::hw_params() {
    if (s_.hw_lambda.has_value() != s_.hw_eta.has_value())
        throw InputError("hw.lambda and hw.eta must be given together");
    if (s_.hw_lambda) return {*s_.hw_lambda, *s_.hw_eta};
    if (s_.vols.empty())
        throw InputError("no Hull-White parameters: set hw.lambda and hw.eta or give vols to calibrate");
    return calibration().params;
}

HullWhite Context::model() { return HullWhite(curve(), hw_params()); }

MortgageSpec Context::mortgage(MortgageKind kind) {
    MortgageSpec m;
    m.kind = kind;
    m.notional = s_.notional;
    m.maturity_years = s_.maturity;
    if (s_.rate == "atm") {
        m.rate = atm_mortgage_rate(curve(), kind, s_.maturity);
    } else {
        m.rate = csv::to_double(s_.rate, "setting 'rate'");
    }
    m.validate();
    return m;
}

CprModel Context::cpr() const {
    if (s_.cpr_model == "constant") return CprModel(ConstantCpr{s_.cpr_lambda});
    if (s_.cpr_model == "rational") return CprModel(RationalCpr{s_.lambda_max, s_.epsilon_star});
    if (s_.cpr_model == "logistic") {
        if (s_.alpha.size() != 4) throw InputError("cpr.alpha needs exactly 4 values");
        return CprModel(LogisticCpr{{s_.alpha[0], s_.alpha[1], s_.alpha[2], s_.alpha[3]}});
    }
    throw InputError("cpr.model: unknown model '" + s_.cpr_model + "' (constant|rational|logistic)");
}

IasScenario Context::scenario(MortgageKind kind, const CprModel& cpr) {
    IasScenario sc;
    sc.mortgage = mortgage(kind);
    sc.cpr = cpr;
    require(s_.zeta >= 0.0, "zeta must be >= 0");
    sc.zeta = s_.zeta;
    sc.n_paths = s_.paths;
    sc.seed = seed();
    sc.antithetic = !s_.no_antithetic;
    require(sc.n_paths >= 2, "paths must be at least 2");
    if (sc.antithetic && sc.n_paths % 2 != 0)
        throw InputError("paths must be even with antithetic sampling");
    return sc;
}

MarketSetup Context::market() {
    MarketSetup m;
    m.quotes = quotes();
    m.extrapolate = s_.extrapolate;
    m.params = hw_params();
    if (!s_.vols.empty()) m.vols = calibration_quotes();
    return m;
}

std::uint64_t Context::seed() const {
    if (!s_.seed) throw InputError("missing required setting 'seed' (no default seed is used)");
    return *s_.seed;
}

void Context::force_zero_zeta() {
    if (s_.zeta != 0.0) {
        err_ << "warning: zeta = " << s_.zeta << " ignored; hedging uses zeta = 0\n";
        s_.zeta = 0.0;
    }
}

Json Context::resolved() const {
    Json j;
    j["curve"] = s_.curve;
    j["extrapolate"] = s_.extrapolate;
    j["vols"] = s_.vols;
    j["instruments"] = s_.instruments;
    j["hw.lambda"] = s_.hw_lambda ? Json(*s_.hw_lambda) : Json(nullptr);
    j["hw.eta"] = s_.hw_eta ? Json(*s_.hw_eta) : Json(nullptr);
    j["kind"] = s_.kind;
    j["notional"] = s_.notional;
    j["rate"] = s_.rate;
    j["maturity"] = s_.maturity;
    j["cpr.model"] = s_.cpr_model;
    j["cpr.lambda"] = s_.cpr_lambda;
    j["cpr.lambda_max"] = s_.lambda_max;
    j["cpr.epsilon_star"] = s_.epsilon_star;
    j["cpr.alpha"] = s_.alpha;
    j["zeta"] = s_.zeta;
    j["paths"] = s_.paths;
    j["seed"] = s_.seed ? Json(*s_.seed) : Json(nullptr);
    j["antithetic"] = !s_.no_antithetic;
    j["bump"] = s_.bump;
    j["loans"] = s_.loans;
    j["bins"] = s_.bins;
    j["range"] = s_.range;
    j["synthesize"] = s_.synthesize;
    j["periods"] = s_.periods;
    j["loans_per_period"] = s_.loans_per_period;
    j["export_paths"] = s_.export_paths;
    j["strategy"] = s_.strategies;
    j["no_short"] = s_.no_short;
    j["no_vega"] = s_.no_vega;
    j["report"] = s_.report;
    return j;
}

Json Context::scenario_json(const IasScenario& sc) const {
    Json j;
    j["kind"] = to_string(sc.mortgage.kind);
    j["notional"] = sc.mortgage.notional;
    j["rate_k"] = sc.mortgage.rate;
    j["maturity_years"] = sc.mortgage.maturity_years;
    j["cpr"] = sc.cpr.describe();
    j["zeta"] = sc.zeta;
    j["n_paths"] = sc.n_paths;
    j["seed"] = sc.seed;
    j["antithetic"] = sc.antithetic;
    return j;
}

}  // namespace prepay::cli
