#include "prepay/curve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "prepay/csv.hpp"
#include "prepay/errors.hpp"

namespace prepay {

namespace {

constexpr double kTimeSlack = 1e-12;
constexpr double kForwardStep = 1e-4;

}  // namespace

YieldCurve::YieldCurve(std::vector<double> times, std::vector<double> discount_factors,
                       bool allow_extrapolation)
    : allow_extrapolation_(allow_extrapolation) {
    require(!times.empty(), "YieldCurve: at least one pillar required");
    require(times.size() == discount_factors.size(), "YieldCurve: times/discount size mismatch");
    times_.reserve(times.size() + 1);
    dfs_.reserve(times.size() + 1);
    times_.push_back(0.0);
    dfs_.push_back(1.0);
    for (std::size_t i = 0; i < times.size(); ++i) {
        require(std::isfinite(times[i]) && times[i] > times_.back(),
                "YieldCurve: pillar times must be positive and strictly increasing");
        require(std::isfinite(discount_factors[i]) && discount_factors[i] > 0.0,
                "YieldCurve: discount factors must be positive");
        times_.push_back(times[i]);
        dfs_.push_back(discount_factors[i]);
    }
    log_dfs_.resize(dfs_.size());
    std::transform(dfs_.begin(), dfs_.end(), log_dfs_.begin(), [](double d) { return std::log(d); });
}

YieldCurve YieldCurve::with_extrapolation(bool allow) const {
    YieldCurve c = *this;
    c.allow_extrapolation_ = allow;
    return c;
}

double YieldCurve::discount(double t) const {
    if (!(t >= -kTimeSlack)) throw InputError("discount: negative time " + std::to_string(t));
    if (t <= 0.0) return 1.0;
    const double tmax = times_.back();
    if (t > tmax + kTimeSlack) {
        if (!allow_extrapolation_) {
            std::ostringstream msg;
            msg << "discount: t=" << t << " beyond last pillar " << tmax
                << " (extrapolation disabled)";
            throw InputError(msg.str());
        }
        const std::size_t n = times_.size();
        const double fwd = (log_dfs_[n - 2] - log_dfs_[n - 1]) / (times_[n - 1] - times_[n - 2]);
        return std::exp(log_dfs_.back() - fwd * (t - tmax));
    }
    t = std::min(t, tmax);
    const auto it = std::lower_bound(times_.begin(), times_.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
    if (*it == t) return dfs_[hi];
    const std::size_t lo = hi - 1;
    const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
    return std::exp((1.0 - w) * log_dfs_[lo] + w * log_dfs_[hi]);
}

double YieldCurve::forward_libor(double t_start, double t_end) const {
    require(t_end > t_start, "forward_libor: degenerate interval");
    const double tau = t_end - t_start;
    return (discount(t_start) - discount(t_end)) / (tau * discount(t_end));
}

std::vector<double> fixed_schedule(double t_start, double t_end, int frequency) {
    require(frequency >= 1, "fixed_schedule: frequency must be >= 1");
    require(t_end > t_start, "fixed_schedule: empty schedule");
    const double step = 1.0 / frequency;
    const auto n = static_cast<long>(std::llround((t_end - t_start) * frequency));
    require(n >= 1 && std::abs(t_start + n * step - t_end) < 1e-9,
            "fixed_schedule: tenor is not a whole number of periods");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (long k = 1; k <= n; ++k) out[static_cast<std::size_t>(k - 1)] = t_start + k * step;
    out.back() = t_end;
    return out;
}

double YieldCurve::annuity(double t_start, double t_end, int frequency) const {
    const auto sched = fixed_schedule(t_start, t_end, frequency);
    double prev = t_start;
    double sum = 0.0;
    for (double t : sched) {
        sum += (t - prev) * discount(t);
        prev = t;
    }
    return sum;
}

double YieldCurve::swap_rate(double t_start, double t_end, int frequency) const {
    return (discount(t_start) - discount(t_end)) / annuity(t_start, t_end, frequency);
}

double YieldCurve::instantaneous_forward(double t) const {
    const double h = kForwardStep;
    const double tmax = times_.back();
    if (t < h) return -(std::log(discount(t + h)) - std::log(discount(t))) / h;
    if (!allow_extrapolation_ && t + h > tmax)
        return -(std::log(discount(t)) - std::log(discount(t - h))) / h;
    return -(std::log(discount(t + h)) - std::log(discount(t - h))) / (2.0 * h);
}

double YieldCurve::forward_slope(double t) const {
    const double h = kForwardStep;
    const double tmax = times_.back();
    double lo = t - h, mid = t, hi = t + h;
    if (lo < 0.0) {
        lo = 0.0;
        mid = h;
        hi = 2.0 * h;
    } else if (!allow_extrapolation_ && hi > tmax) {
        hi = tmax;
        mid = tmax - h;
        lo = tmax - 2.0 * h;
    }
    return -(std::log(discount(hi)) - 2.0 * std::log(discount(mid)) + std::log(discount(lo))) /
           (h * h);
}

YieldCurve bootstrap(std::span<const SwapQuote> quotes, bool allow_extrapolation) {
    require(!quotes.empty(), "bootstrap: no quotes");
    std::vector<double> times;
    std::vector<double> dfs;
    int prev_maturity = 0;
    for (const auto& q : quotes) {
        require(q.maturity_years >= 1, "bootstrap: maturity must be >= 1 year");
        require(std::isfinite(q.par_rate), "bootstrap: non-finite par rate");
        require(q.fixed_frequency >= 1, "bootstrap: fixed frequency must be >= 1");
        if (q.maturity_years <= prev_maturity) {
            std::ostringstream msg;
            msg << "bootstrap: maturities must be strictly increasing (" << q.maturity_years
                << "Y after " << prev_maturity << "Y)";
            throw InputError(msg.str());
        }
        const double t_prev = prev_maturity;
        const double t_new = q.maturity_years;
        const double log_prev = dfs.empty() ? 0.0 : std::log(dfs.back());
        const auto sched = fixed_schedule(0.0, t_new, q.fixed_frequency);

        // Discounts up to the previous pillar are fixed; beyond it they are
        // log-linear between the previous pillar and the unknown new one.
        std::vector<double> known(sched.size(), 0.0);
        {
            YieldCurve partial = times.empty() ? YieldCurve({t_new}, {1.0})
                                               : YieldCurve(times, dfs);
            for (std::size_t k = 0; k < sched.size(); ++k)
                if (sched[k] <= t_prev + kTimeSlack) known[k] = partial.discount(sched[k]);
        }
        auto residual = [&](double p_new) {
            const double log_new = std::log(p_new);
            double ann = 0.0;
            double prev = 0.0;
            for (std::size_t k = 0; k < sched.size(); ++k) {
                const double t = sched[k];
                double df = known[k];
                if (t > t_prev + kTimeSlack) {
                    const double w = (t - t_prev) / (t_new - t_prev);
                    df = std::exp((1.0 - w) * log_prev + w * log_new);
                }
                ann += (t - prev) * df;
                prev = t;
            }
            return q.par_rate * ann + p_new - 1.0;
        };

        double lo = 1e-8, hi = 2.0;
        double f_lo = residual(lo), f_hi = residual(hi);
        if (!(f_lo < 0.0 && f_hi > 0.0)) {
            std::ostringstream msg;
            msg << "bootstrap: cannot bracket discount factor for " << q.maturity_years
                << "Y quote " << q.par_rate;
            throw NumericalError(msg.str());
        }
        while (hi - lo > 1e-14) {
            const double mid = 0.5 * (lo + hi);
            const double f_mid = residual(mid);
            if (f_mid == 0.0) {
                lo = hi = mid;
                break;
            }
            (f_mid < 0.0 ? lo : hi) = mid;
        }
        times.push_back(t_new);
        dfs.push_back(0.5 * (lo + hi));
        prev_maturity = q.maturity_years;
    }
    return YieldCurve(std::move(times), std::move(dfs), allow_extrapolation);
}

std::vector<SwapQuote> read_swap_quotes_csv(const std::filesystem::path& path) {
    const auto table = csv::read(path);
    const auto c_mat = csv::column(table, "maturity_years", path);
    const auto c_rate = csv::column(table, "par_rate", path);
    const auto c_freq = csv::column(table, "fixed_frequency", path);
    std::vector<SwapQuote> quotes;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string ctx = path.string() + ":" + std::to_string(table.line_numbers[r]);
        SwapQuote q;
        q.maturity_years = static_cast<int>(csv::to_int(row[c_mat], ctx + " maturity_years"));
        q.par_rate = csv::to_double(row[c_rate], ctx + " par_rate");
        q.fixed_frequency = static_cast<int>(csv::to_int(row[c_freq], ctx + " fixed_frequency"));
        quotes.push_back(q);
    }
    return quotes;
}

std::string quote_label(const SwapQuote& q) { return std::to_string(q.maturity_years) + "Y"; }

}  // namespace prepay
