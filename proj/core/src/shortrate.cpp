#include <cmath>
#include <numbers>

#include "prepay/errors.hpp"
#include "prepay/numerics.hpp"
#include "prepay/shortrate.hpp"

namespace prepay {

HullWhite::HullWhite(YieldCurve curve, HullWhiteParams params)
    : curve_(std::move(curve)), params_(params) {
    require(std::isfinite(params.lambda) && params.lambda > 0.0,
            "HullWhite: lambda must be positive");
    require(std::isfinite(params.eta) && params.eta >= 0.0, "HullWhite: eta must be non-negative");
}

double HullWhite::B(double tau) const { return -(-std::expm1(-lambda() * tau)) / lambda(); }

double HullWhite::phi(double t) const {
    const double a = lambda();
    const double s = -std::expm1(-a * t);
    return curve_.instantaneous_forward(t) + eta() * eta() / (2.0 * a * a) * s * s;
}

double HullWhite::theta(double t) const {
    const double a = lambda();
    return curve_.forward_slope(t) / a + curve_.instantaneous_forward(t) +
           eta() * eta() / (2.0 * a * a) * (-std::expm1(-2.0 * a * t));
}

double HullWhite::factor_variance(double t) const {
    const double a = lambda();
    return eta() * eta() * (-std::expm1(-2.0 * a * t)) / (2.0 * a);
}

double HullWhite::integrated_variance(double t) const {
    const double a = lambda();
    double core = 0.0;
    if (a * t < 0.1) {
        // t - 2b + b2 cancels badly for small a t: sum its Taylor series
        // sum_{n>=3} (-1)^{n+1} (2^{n-1} - 2) a^{n-1} t^n / n!
        double term = t;  // a^{n-1} t^n / n! at n = 1
        double pow2 = 1.0;
        for (int n = 2; n <= 20; ++n) {
            term *= a * t / n;
            pow2 *= 2.0;
            const double sign = (n % 2 == 1) ? 1.0 : -1.0;
            core += sign * (pow2 - 2.0) * term;
        }
    } else {
        const double b = -std::expm1(-a * t) / a;
        const double b2 = -std::expm1(-2.0 * a * t) / (2.0 * a);
        core = t - 2.0 * b + b2;
    }
    return eta() * eta() / (a * a) * core;
}

double HullWhite::bond_price_x(double t, double T, double x_t) const {
    if (T <= t) return 1.0;
    const double tau = T - t;
    const double convexity =
        0.5 * (integrated_variance(tau) - integrated_variance(T) + integrated_variance(t));
    return curve_.discount(T) / curve_.discount(t) * std::exp(convexity + B(tau) * x_t);
}

double HullWhite::bond_price(double t, double T, double r_t) const {
    require(T >= t, "hw_bond_price: requires t <= T");
    return bond_price_x(t, T, r_t - phi(t));
}

double HullWhite::bond_option(OptionType type, double t, double x_t, double T, double S,
                              double strike) const {
    require(S > T && T >= t, "bond_option: requires t <= T < S");
    const double p_t = bond_price_x(t, T, x_t);
    const double p_s = bond_price_x(t, S, x_t);
    const double sigma_p = std::sqrt(factor_variance(T - t)) * (-B(S - T));
    if (sigma_p <= 1e-300 || strike <= 0.0) {
        const double fwd = p_s - strike * p_t;
        return type == OptionType::Call ? std::max(fwd, 0.0) : std::max(-fwd, 0.0);
    }
    const double h = std::log(p_s / (strike * p_t)) / sigma_p + 0.5 * sigma_p;
    if (type == OptionType::Call)
        return p_s * normal_cdf(h) - strike * p_t * normal_cdf(h - sigma_p);
    return strike * p_t * normal_cdf(sigma_p - h) - p_s * normal_cdf(-h);
}

// ---------------------------------------------------------------------------

double bachelier_price(SwaptionType type, double forward, double strike, double normal_vol,
                       double expiry, double annuity) {
    require(normal_vol >= 0.0 && expiry >= 0.0, "bachelier_price: negative vol or expiry");
    const double w = type == SwaptionType::Payer ? 1.0 : -1.0;
    const double sd = normal_vol * std::sqrt(expiry);
    const double intrinsic = std::max(w * (forward - strike), 0.0);
    if (sd <= 0.0) return annuity * intrinsic;
    const double d = w * (forward - strike) / sd;
    return annuity * (w * (forward - strike) * normal_cdf(d) + sd * normal_pdf(d));
}

double bachelier_implied_vol(double price, double /*forward*/, double annuity, double expiry) {
    require(annuity > 0.0 && expiry > 0.0, "bachelier_implied_vol: annuity and expiry must be positive");
    require(std::isfinite(price) && price >= 0.0,
            "bachelier_implied_vol: ATM price must be non-negative");
    return price / (annuity * std::sqrt(expiry / (2.0 * std::numbers::pi)));
}

double bachelier_implied_vol(SwaptionType type, double price, double forward, double strike,
                             double annuity, double expiry) {
    require(annuity > 0.0 && expiry > 0.0, "bachelier_implied_vol: annuity and expiry must be positive");
    if (strike == forward) return bachelier_implied_vol(price, forward, annuity, expiry);
    const double w = type == SwaptionType::Payer ? 1.0 : -1.0;
    const double intrinsic = annuity * std::max(w * (forward - strike), 0.0);
    require(std::isfinite(price) && price >= intrinsic,
            "bachelier_implied_vol: price below intrinsic value");
    if (price == intrinsic) return 0.0;
    auto f = [&](double v) { return bachelier_price(type, forward, strike, v, expiry, annuity) - price; };
    double lo = 0.0, hi = 0.01;
    while (f(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 10.0) throw NumericalError("bachelier_implied_vol: cannot bracket vol");
    }
    double v = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double fv = f(v);
        if (fv > 0.0) hi = v; else lo = v;
        const double vega = annuity * std::sqrt(expiry) *
                            normal_pdf((forward - strike) / (v * std::sqrt(expiry)));
        double next = vega > 0.0 ? v - fv / vega : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - v) < 1e-16 + 1e-14 * v) return next;
        v = next;
    }
    return v;
}

}  // namespace prepay
