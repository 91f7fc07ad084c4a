#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "prepay/csv.hpp"
#include "prepay/errors.hpp"
#include "prepay/numerics.hpp"
#include "prepay/shortrate.hpp"

namespace prepay {

namespace {

struct FitPoint {
    std::vector<double> vols, model_prices;
    double objective;
};

FitPoint evaluate(const YieldCurve& curve, std::span<const SwaptionQuote> quotes,
                  HullWhiteParams p) {
    FitPoint out{{}, {}, 0.0};
    const HullWhite model(curve, p);
    for (const auto& q : quotes) {
        const auto fs = forward_swap(curve, q.expiry_years, q.tenor_years);
        const double price =
            hw_swaption_price(model, q.expiry_years, q.tenor_years, fs.rate, SwaptionType::Receiver);
        const double vol = bachelier_implied_vol(price, fs.rate, fs.annuity, q.expiry_years);
        out.vols.push_back(vol);
        out.model_prices.push_back(price);
        const double err_bps = (vol - q.normal_vol) * 1e4;
        out.objective += err_bps * err_bps;
    }
    return out;
}

}  // namespace

HwCalibration calibrate_hw(const YieldCurve& curve, std::span<const SwaptionQuote> quotes,
                           const CalibrationOptions& options) {
    require(!quotes.empty(), "calibrate_hw: no quotes");
    require(options.fix_lambda || quotes.size() >= 2,
            "calibrate_hw: need at least 2 quotes to fit (lambda, eta)");
    require(options.initial.lambda > 0.0 && options.initial.eta > 0.0,
            "calibrate_hw: initial guess must be positive");
    for (const auto& q : quotes)
        require(q.expiry_years > 0.0 && q.tenor_years > 0.0 && q.normal_vol >= 0.0,
                "calibrate_hw: invalid swaption quote");

    auto to_params = [&](const std::vector<double>& z) {
        if (options.fix_lambda) return HullWhiteParams{options.initial.lambda, std::exp(z[0])};
        return HullWhiteParams{std::exp(z[0]), std::exp(z[1])};
    };
    auto objective = [&](const std::vector<double>& z) {
        const auto p = to_params(z);
        if (!(p.lambda > 1e-6 && p.lambda < 50.0 && p.eta > 1e-8 && p.eta < 1.0)) return 1e12;
        try {
            return evaluate(curve, quotes, p).objective;
        } catch (const std::exception&) {
            return 1e12;
        }
    };

    std::vector<double> start = options.fix_lambda
                                    ? std::vector<double>{std::log(options.initial.eta)}
                                    : std::vector<double>{std::log(options.initial.lambda),
                                                          std::log(options.initial.eta)};
    const double x_tol = 1e-9;
    NelderMeadResult res;
    int total_iterations = 0;
    // Restarting from the best vertex guards against premature collapse.
    for (int restart = 0; restart < 4; ++restart) {
        const int budget = options.max_iterations - total_iterations;
        if (budget <= 0) break;
        res = nelder_mead(objective, start, restart == 0 ? 0.5 : 0.05, options.tolerance, x_tol,
                          budget);
        total_iterations += res.iterations;
        const bool same_point =
            std::equal(start.begin(), start.end(), res.x.begin(),
                       [](double a, double b) { return std::abs(a - b) <= 1e-8; });
        start = res.x;
        if (res.converged && restart > 0 && same_point) break;
    }

    HwCalibration out;
    out.params = to_params(res.x);
    out.iterations = total_iterations;
    const auto fit = evaluate(curve, quotes, out.params);
    out.model_vols = fit.vols;
    out.model_prices = fit.model_prices;
    out.objective = fit.objective;
    for (const auto& q : quotes) {
        const auto fs = forward_swap(curve, q.expiry_years, q.tenor_years);
        out.market_prices.push_back(bachelier_price(SwaptionType::Receiver, fs.rate, fs.rate,
                                                    q.normal_vol, q.expiry_years, fs.annuity));
    }
    if (!res.converged) {
        std::ostringstream msg;
        msg << "calibrate_hw: Nelder-Mead did not converge in " << options.max_iterations
            << " iterations (best lambda=" << out.params.lambda << ", eta=" << out.params.eta << ")";
        throw CalibrationError(msg.str(), out);
    }
    return out;
}

// ---------------------------------------------------------------------------

double parse_tenor_label(const std::string& label) {
    std::size_t pos = 0;
    while (pos < label.size() && (std::isdigit(static_cast<unsigned char>(label[pos])) || label[pos] == '.'))
        ++pos;
    if (pos == 0) throw InputError("bad tenor label: '" + label + "'");
    const double n = csv::to_double(label.substr(0, pos), "tenor label '" + label + "'");
    std::string unit = label.substr(pos);
    std::transform(unit.begin(), unit.end(), unit.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (unit == "mo" || unit == "m") return n / 12.0;
    if (unit == "yr" || unit == "y") return n;
    throw InputError("bad tenor label: '" + label + "'");
}

double VolMatrix::vol_bps(double expiry, double tenor) const {
    for (std::size_t i = 0; i < expiries.size(); ++i) {
        if (std::abs(expiries[i] - expiry) > 1e-9) continue;
        for (std::size_t j = 0; j < tenors.size(); ++j)
            if (std::abs(tenors[j] - tenor) <= 1e-9) return vols_bps[i][j];
    }
    std::ostringstream msg;
    msg << "vol matrix has no " << expiry << "Y x " << tenor << "Y node";
    throw InputError(msg.str());
}

VolMatrix read_vol_matrix_csv(const std::filesystem::path& path) {
    const auto table = csv::read(path);
    require(table.header.size() >= 2, path.string() + ": vol matrix needs at least one tenor column");
    VolMatrix m;
    for (std::size_t j = 1; j < table.header.size(); ++j) {
        m.tenor_labels.push_back(table.header[j]);
        m.tenors.push_back(parse_tenor_label(table.header[j]));
    }
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string ctx = path.string() + ":" + std::to_string(table.line_numbers[r]);
        m.expiry_labels.push_back(row[0]);
        m.expiries.push_back(parse_tenor_label(row[0]));
        std::vector<double> vols;
        for (std::size_t j = 1; j < row.size(); ++j) {
            const double v = csv::to_double(row[j], ctx + " column " + table.header[j]);
            require(v >= 0.0, ctx + ": negative volatility");
            vols.push_back(v);
        }
        m.vols_bps.push_back(std::move(vols));
    }
    return m;
}

std::vector<SwaptionQuote> select_instruments(const VolMatrix& m, const std::string& set_name) {
    std::vector<std::pair<double, double>> nodes;
    if (set_name == "counterdiag10y") {
        nodes = {{1, 10}, {3, 7}, {5, 5}, {7, 3}, {9, 1}};
    } else {
        // Explicit list "1x10,5x5,..." (expiry x tenor, years).
        std::stringstream ss(set_name);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto x = item.find('x');
            if (x == std::string::npos) throw InputError("unknown instrument set: '" + set_name + "'");
            nodes.emplace_back(csv::to_double(item.substr(0, x), "instrument " + item),
                               csv::to_double(item.substr(x + 1), "instrument " + item));
        }
    }
    std::vector<SwaptionQuote> out;
    for (const auto& [e, t] : nodes) out.push_back({e, t, m.vol_bps(e, t) * 1e-4});
    return out;
}

}  // namespace prepay
