#include <cmath>
#include <limits>
#include <sstream>

#include "prepay/errors.hpp"
#include "prepay/shortrate.hpp"

namespace prepay {

JamshidianSwaption::JamshidianSwaption(const HullWhite& model, double expiry, double end,
                                       double strike, SwaptionType type)
    : expiry_(expiry), end_(end), strike_(strike), type_(type) {
    require(expiry > 0.0, "swaption: expiry must be positive");
    require(end > expiry, "swaption: tenor must be positive");
    require(std::isfinite(strike), "swaption: non-finite strike");
    pay_times_ = fixed_schedule(expiry, end, 1);
    coupons_.assign(pay_times_.size(), 0.0);
    double prev = expiry;
    for (std::size_t k = 0; k < pay_times_.size(); ++k) {
        coupons_[k] = strike * (pay_times_[k] - prev);
        prev = pay_times_[k];
    }
    coupons_.back() += 1.0;

    if (coupons_.back() <= 0.0) {
        // The coupon bond is worth less than par in every state: no critical point.
        x_star_ = -std::numeric_limits<double>::infinity();
        return;
    }

    // Coupon bond value at expiry minus par, as a function of x(expiry).
    auto g = [&](double x, double* dg) {
        double v = -1.0, d = 0.0;
        for (std::size_t k = 0; k < pay_times_.size(); ++k) {
            const double p = model.bond_price_x(expiry, pay_times_[k], x);
            v += coupons_[k] * p;
            d += coupons_[k] * p * model.B(pay_times_[k] - expiry);
        }
        if (dg) *dg = d;
        return v;
    };

    double lo = -0.05, hi = 0.05;
    int expansions = 0;
    while (g(lo, nullptr) <= 0.0 && expansions++ < 60) lo *= 2.0;
    expansions = 0;
    while (g(hi, nullptr) >= 0.0 && expansions++ < 60) hi *= 2.0;
    if (!(g(lo, nullptr) > 0.0 && g(hi, nullptr) < 0.0)) {
        std::ostringstream msg;
        msg << "Jamshidian: cannot bracket critical rate for " << expiry << "Y-" << (end - expiry)
            << "Y strike " << strike;
        throw NumericalError(msg.str());
    }
    double x = 0.0;
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    bool done = false;
    for (int it = 0; it < 200 && !done; ++it) {
        double d = 0.0;
        const double v = g(x, &d);
        if (v > 0.0) lo = x; else hi = x;
        double next = d < 0.0 ? x - v / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        done = std::abs(next - x) < 1e-15 || hi - lo < 1e-15;
        x = next;
    }
    if (!done) {
        std::ostringstream msg;
        msg << "Jamshidian: critical rate did not converge for " << expiry << "Y-"
            << (end - expiry) << "Y";
        throw NumericalError(msg.str());
    }
    x_star_ = x;
    bond_strikes_.resize(pay_times_.size());
    for (std::size_t k = 0; k < pay_times_.size(); ++k)
        bond_strikes_[k] = model.bond_price_x(expiry, pay_times_[k], x_star_);
}

double JamshidianSwaption::price(const HullWhite& model, double t, double x_t) const {
    require(t < expiry_, "swaption: valuation time must precede expiry");
    if (std::isinf(x_star_)) {
        if (type_ == SwaptionType::Receiver) return 0.0;
        double fwd = model.bond_price_x(t, expiry_, x_t);
        for (std::size_t k = 0; k < pay_times_.size(); ++k)
            fwd -= coupons_[k] * model.bond_price_x(t, pay_times_[k], x_t);
        return fwd;
    }
    // Receiver = call on the coupon bond struck at par; payer = put.
    const OptionType opt = type_ == SwaptionType::Receiver ? OptionType::Call : OptionType::Put;
    double v = 0.0;
    for (std::size_t k = 0; k < pay_times_.size(); ++k)
        v += coupons_[k] * model.bond_option(opt, t, x_t, expiry_, pay_times_[k], bond_strikes_[k]);
    return v;
}

double hw_swaption_price(const HullWhite& model, double expiry, double tenor, double strike,
                         SwaptionType type) {
    return JamshidianSwaption(model, expiry, expiry + tenor, strike, type).price(model);
}

double hw_floorlet_price(const HullWhite& model, double t1, double t2, double strike) {
    require(t1 > 0.0 && t2 > t1, "floorlet: requires 0 < T1 < T2");
    const double tau = t2 - t1;
    const double gross = 1.0 + tau * strike;
    if (gross <= 0.0) return 0.0;
    return gross * model.bond_option(OptionType::Call, 0.0, 0.0, t1, t2, 1.0 / gross);
}

ForwardSwap forward_swap(const YieldCurve& curve, double expiry, double tenor) {
    const double ann = curve.annuity(expiry, expiry + tenor, 1);
    return {(curve.discount(expiry) - curve.discount(expiry + tenor)) / ann, ann};
}

double hw_implied_normal_vol(const HullWhite& model, double expiry, double tenor) {
    const auto fs = forward_swap(model.curve(), expiry, tenor);
    const double price = hw_swaption_price(model, expiry, tenor, fs.rate, SwaptionType::Receiver);
    return bachelier_implied_vol(price, fs.rate, fs.annuity, expiry);
}

}  // namespace prepay
