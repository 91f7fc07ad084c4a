#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "prepay/errors.hpp"
#include "prepay/greeks.hpp"

using namespace prepay;
using doctest::Approx;

namespace {

MarketSetup reference_market() {
    MarketSetup m;
    m.quotes = fixtures::reference_quotes();
    m.params = fixtures::kHw;
    m.vols = select_instruments(read_vol_matrix_csv(fixtures::data_dir() / "swaption_vols_2018-01-23.csv"),
                                "counterdiag10y");
    return m;
}

std::size_t bucket(const GreekProfile& g, const std::string& label) {
    for (std::size_t b = 0; b < g.buckets.size(); ++b)
        if (g.buckets[b] == label) return b;
    FAIL("missing bucket " << label);
    return 0;
}

// Receiver swap on notional N struck at K, curve only.
Pricer swap_pricer(double K, double N, int years) {
    return [=](const HullWhite& m) {
        std::vector<double> n(static_cast<std::size_t>(years), N);
        return InstrumentSamples{{price_amortizing_swap(m.curve(), K, n)}};
    };
}

}  // namespace

TEST_CASE("par swap DV01 is the annuity") {
    auto market = reference_market();
    auto curve = bootstrap(market.quotes);
    const double K = curve.swap_rate(0.0, 10.0);
    const double N = 1e6;
    auto g = rate_greeks(market, swap_pricer(K, N, 10), {"swap"});
    const auto b10 = bucket(g.delta, "10Y");
    const double analytic = -curve.annuity(0.0, 10.0) * N * 1e-4;
    CHECK(g.delta.values(b10, 0) == Approx(analytic).epsilon(1e-3));
    for (std::size_t b = 0; b < g.delta.buckets.size(); ++b)
        if (b != b10) CHECK(std::abs(g.delta.values(b, 0)) < 1e-6 * N * 1e-4);
    // swaps carry only the bootstrap's own curvature
    CHECK(std::abs(g.gamma.values(b10, 0)) < 1e-3 * std::abs(g.delta.values(b10, 0)));

    const auto par = parallel_delta(market, swap_pricer(K, N, 10));
    CHECK(par(0) == Approx(g.delta.values.col(0).sum()).epsilon(1e-3));

    // central differences converge at second order
    auto half = rate_greeks(market, swap_pricer(K, N, 10), {"swap"}, 0.5e-4);
    const double e1 = std::abs(g.delta.values(b10, 0) - analytic);
    const double e2 = std::abs(half.delta.values(b10, 0) - analytic);
    CHECK(e2 <= e1);
}

TEST_CASE("swap portfolios have no Vega") {
    auto market = reference_market();
    auto v = vega_profile(market, swap_pricer(0.01, 1e6, 10), {"swap"});
    REQUIRE(v.buckets.size() == 5);
    CHECK(v.scheme == "forward");
    for (Eigen::Index b = 0; b < v.values.rows(); ++b) CHECK(v.values(b, 0) == 0.0);
}

TEST_CASE("long and short swaptions have opposite Vega") {
    auto market = reference_market();
    Pricer p = [](const HullWhite& m) {
        const double s = JamshidianSwaption(m, 5.0, 10.0, 0.01, SwaptionType::Receiver).price(m);
        return InstrumentSamples{{s}, {-s}};
    };
    auto v = vega_profile(market, p, {"long", "short"});
    const double total = v.values.col(0).sum();
    CHECK(total > 0.0);
    CHECK(v.values.col(1).sum() == Approx(-total));
}

TEST_CASE("Gamma is affine in the swaption weights") {
    auto market = reference_market();
    const double K = 0.009;
    auto portfolio = [&](double w5, double w7) {
        return [=](const HullWhite& m) {
            std::vector<double> n(10, 1e6);
            double v = price_amortizing_swap(m.curve(), K, n);
            v -= w5 * JamshidianSwaption(m, 5.0, 10.0, K, SwaptionType::Receiver).price(m);
            v -= w7 * JamshidianSwaption(m, 7.0, 10.0, K, SwaptionType::Receiver).price(m);
            return InstrumentSamples{{v}};
        };
    };
    auto g0 = rate_greeks(market, portfolio(0, 0), {"p"}).gamma.values;
    auto g1 = rate_greeks(market, portfolio(2e5, 0), {"p"}).gamma.values;
    auto g2 = rate_greeks(market, portfolio(0, 3e5), {"p"}).gamma.values;
    auto g12 = rate_greeks(market, portfolio(2e5, 3e5), {"p"}).gamma.values;
    const double scale = g1.cwiseAbs().maxCoeff() + g2.cwiseAbs().maxCoeff();
    CHECK((g12 - (g1 + g2 - g0)).cwiseAbs().maxCoeff() < 1e-4 * scale);
    // short receiver swaptions: positive gamma sold, so portfolio gamma falls at 10Y
    CHECK(g1(9, 0) < g0(9, 0));
}

TEST_CASE("common random numbers keep IAS Greeks stable across seeds") {
    auto market = reference_market();
    IasScenario sc;
    auto curve = bootstrap(market.quotes);
    sc.mortgage = {MortgageKind::Bullet, 1e6, curve.swap_rate(0.0, 10.0), 10};
    sc.cpr = CprModel(LogisticCpr{{0.06, 0.14, -300.0, 4.0}});
    sc.n_paths = 10000;
    sc.seed = 1;
    auto a = rate_greeks(market, ias_sample_pricer(sc), {"ias"});
    sc.seed = 2;
    auto b = rate_greeks(market, ias_sample_pricer(sc), {"ias"});
    const auto k = bucket(a.delta, "10Y");
    const double se = std::hypot(a.delta.std_errors(k, 0), b.delta.std_errors(k, 0));
    CHECK(a.delta.std_errors(k, 0) > 0.0);
    CHECK(std::abs(a.delta.values(k, 0) - b.delta.values(k, 0)) < 3.0 * se);
    // receive fixed: losing value when the 10Y rate rises
    CHECK(a.delta.values(k, 0) < 0.0);
}

TEST_CASE("failed bump names the quote") {
    auto market = reference_market();
    try {
        rate_greeks(market, swap_pricer(0.01, 1.0, 10), {"swap"}, 1.5);
        FAIL("expected a numerical error");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("1Y") != std::string::npos);
    }
    CHECK_THROWS_AS(rate_greeks(market, swap_pricer(0.01, 1.0, 10), {"a", "b"}), InputError);
}
