#include <doctest.h>

#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "prepay/errors.hpp"
#include "prepay/hedge.hpp"

using namespace prepay;
using doctest::Approx;

namespace {

struct Fixture {
    HullWhite hw = fixtures::reference_model();
    IasScenario sc;
    PathSet paths;
    NotionalPathSet np;

    Fixture(CprModel cpr, std::size_t n, MortgageKind kind = MortgageKind::Bullet) {
        sc.mortgage = {kind, 1.0, atm_mortgage_rate(hw.curve(), kind, 10), 10};
        sc.cpr = std::move(cpr);
        sc.n_paths = n;
        sc.seed = 7;
        paths = simulate_paths(hw, mortgage_grid(sc.mortgage), n, sc.seed);
        np = simulate_notional(hw, sc, paths);
    }
    double K() const { return sc.mortgage.rate; }
};

HedgePortfolio with_weights(HedgePortfolio p, const SwaptionGrid& w) {
    p.swaptions = w;
    return p;
}

// Two paths, M = 2: one never prepays, one exercises at T_1 and loses g.
NotionalPathSet two_path_case(double g) {
    NotionalPathSet np;
    np.grid = {0.0, 1.0, 2.0};
    np.notional = RowMatrix(2, 3);
    np.notional << 1.0, 1.0, 0.0, 1.0, 1.0 - g, 0.0;
    np.kappa = RowMatrix::Zero(2, 3);
    np.exercise = RowMatrix::Zero(2, 3);
    np.exercise(1, 1) = 1.0;
    return np;
}

}  // namespace

TEST_CASE("closed-form weight on the smallest grid") {
    auto np = two_path_case(0.3);
    auto fit = calibrate_diagonal(np, 0.01);
    REQUIRE(fit.A.rows() == 1);
    CHECK(fit.A(0, 0) == Approx(1.0));
    CHECK(fit.b(0) == Approx(0.3));
    CHECK(fit.weights(1, 2) == Approx(0.3).epsilon(1e-14));
    CHECK(fit.objective == Approx(0.0).epsilon(1e-14));
    CHECK(fit.null_cells.empty());

    np.exercise(1, 1) = 0.0;
    auto none = calibrate_diagonal(np, 0.01);
    CHECK(none.weights(1, 2) == 0.0);
    REQUIRE(none.null_cells.size() == 1);
    CHECK(none.null_cells[0] == Cell{1, 2});
}

TEST_CASE("portfolio notional convention") {
    auto np = two_path_case(0.3);
    auto p = build_envelope_hedge(np, 0.01);
    CHECK(p.swap_notional == std::vector<double>{1.0, 1.0});
    p.swaptions(1, 2) = 0.1;
    CHECK(portfolio_notional(np, p, 0, 1) == 1.0);
    CHECK(portfolio_notional(np, p, 1, 1) == Approx(0.9));
    CHECK(portfolio_notional(np, p, 1, 0) == 1.0);
}

TEST_CASE("linear hedge") {
    Fixture f(CprModel(ConstantCpr{0.0}), 64);
    auto lin = build_linear_hedge(f.np, f.K());
    auto d = lin.ladder();
    CHECK(d[0] == 1.0);
    for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] == 0.0);

    HedgePortfolio stepped;
    stepped.rate = 0.01;
    stepped.swap_notional = {1.0, 0.5, 0.5};
    CHECK(stepped.ladder() == std::vector<double>{1.0, -0.5, 0.0});

    // ladder of co-terminal swaps reprices the amortizing swap
    Fixture g(CprModel(LogisticCpr{{0.06, 0.14, -300.0, 4.0}}), 2048);
    auto l = build_linear_hedge(g.np, g.K());
    const auto& c = g.hw.curve();
    auto lad = l.ladder();
    double ladder_value = 0.0;
    for (int q = 0; q < 10; ++q) {
        double fixed = 0.0;
        for (int k = q + 1; k <= 10; ++k) fixed += c.discount(k);
        ladder_value += lad[q] * (g.K() * fixed - c.discount(q) + c.discount(10));
    }
    auto v = price_portfolio(l, g.hw);
    CHECK(v.swap_value == Approx(ladder_value).epsilon(1e-10));
    auto avg = average_notional(g.np, g.sc.mortgage);
    std::vector<double> mean(avg.mean.begin(), avg.mean.end() - 1);
    CHECK(v.swap_value == Approx(price_amortizing_swap(c, g.K(), mean)).epsilon(1e-12));
    CHECK(v.swaption_cost == 0.0);
}

TEST_CASE("upper envelope") {
    Fixture f(CprModel(RationalCpr{0.12, 0.0}), 2048);
    auto env = upper_envelope(f.np);
    for (int k = 1; k <= 10; ++k) CHECK(env[k] <= env[k - 1]);
    for (std::size_t j = 0; j < f.np.n_paths(); ++j)
        for (int k = 0; k <= 10; ++k) CHECK(f.np.notional(j, k) <= env[k]);

    Fixture c(CprModel(ConstantCpr{0.12}), 64);
    auto e = upper_envelope(c.np);
    for (int k = 0; k <= 10; ++k) CHECK(e[k] == c.np.notional(0, k));
}

TEST_CASE("diagonal closed form agrees with the generic normal equations") {
    Fixture f(CprModel(RationalCpr{0.12, 0.0}), 4096);
    auto diag = calibrate_diagonal(f.np, f.K());
    auto num = calibrate_numeric(f.np, f.K(), diagonal_cells(10));
    for (const auto& [i, l] : diagonal_cells(10))
        CHECK(diag.weights(i, l) == Approx(num.weights(i, l)).epsilon(1e-8));
    CHECK(diag.objective == Approx(num.objective).epsilon(1e-10));
}

TEST_CASE("single swaption weight by hand") {
    Fixture f(CprModel(RationalCpr{0.12, 0.0}), 4096);
    auto env = upper_envelope(f.np);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < f.np.n_paths(); ++j) {
        if (f.np.exercise(j, 5) == 0.0) continue;
        for (int k = 5; k < 10; ++k) num += env[k] - f.np.notional(j, k);
        den += 5.0;
    }
    auto fit = calibrate_numeric(f.np, f.K(), single_cell(5, 10));
    CHECK(fit.weights(5, 10) == Approx(num / den).epsilon(1e-10));
}

TEST_CASE("bigger cell sets never fit worse") {
    Fixture f(CprModel(LogisticCpr{{0.06, 0.14, -300.0, 4.0}}), 4096);
    const double none = notional_mismatch(f.np, build_envelope_hedge(f.np, f.K()));
    auto single = calibrate_numeric(f.np, f.K(), single_cell(5, 10));
    auto diag = calibrate_diagonal(f.np, f.K());
    auto full = calibrate_numeric(f.np, f.K(), full_cells(10));
    CHECK(single.objective <= none);
    CHECK(diag.objective <= none);
    CHECK(full.objective <= diag.objective * (1 + 1e-12));
    CHECK(full.objective <= single.objective * (1 + 1e-12));
    CHECK(full_cells(10).size() == 45);

    auto ns = calibrate_numeric(f.np, f.K(), full_cells(10), false);
    for (const auto& [i, l] : full_cells(10)) CHECK(ns.weights(i, l) >= 0.0);
    CHECK(ns.objective >= full.objective * (1 - 1e-12));
}

TEST_CASE("mismatch gradient matches finite differences and vanishes at the optimum") {
    Fixture f(CprModel(RationalCpr{0.12, 0.0}), 1024);
    auto cells = diagonal_cells(10);
    auto base = build_envelope_hedge(f.np, f.K());
    base.swaptions(3, 10) = 0.05;
    auto g = notional_mismatch_gradient(f.np, base, cells);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        auto up = base, dn = base;
        up.swaptions(cells[c].first, cells[c].second) += 1e-4;
        dn.swaptions(cells[c].first, cells[c].second) -= 1e-4;
        const double fd = (notional_mismatch(f.np, up) - notional_mismatch(f.np, dn)) / 2e-4;
        CHECK(g(static_cast<Eigen::Index>(c)) == Approx(fd).epsilon(1e-6).scale(1e-9));
    }
    auto fit = calibrate_diagonal(f.np, f.K());
    auto at = notional_mismatch_gradient(f.np, with_weights(base, fit.weights), cells);
    CHECK(at.norm() < 1e-10);
}

TEST_CASE("portfolio pricing is affine in the weights") {
    Fixture f(CprModel(LogisticCpr{{0.06, 0.14, -300.0, 4.0}}), 2048);
    auto base = build_envelope_hedge(f.np, f.K());
    auto w1 = calibrate_diagonal(f.np, f.K()).weights;
    SwaptionGrid w2(10);
    w2(5, 10) = 0.2;
    SwaptionGrid mid(10);
    mid.w = 0.5 * (w1.w + w2.w);
    const double a = price_portfolio(with_weights(base, w1), f.hw).value;
    const double b = price_portfolio(with_weights(base, w2), f.hw).value;
    const double m = price_portfolio(with_weights(base, mid), f.hw).value;
    CHECK(m == Approx(0.5 * (a + b)).epsilon(1e-12));

    auto v = price_portfolio(with_weights(base, w2), f.hw);
    REQUIRE(v.rows.size() == 1);
    const double unit = JamshidianSwaption(f.hw, 5.0, 10.0, f.K(), SwaptionType::Receiver).price(f.hw);
    CHECK(v.rows[0].unit_price == Approx(unit).epsilon(1e-14));
    CHECK(v.value == Approx(v.swap_value - 0.2 * unit).epsilon(1e-14));
}

TEST_CASE("constant CPR is hedged by its own swap") {
    Fixture f(CprModel(ConstantCpr{0.12}), 20000, MortgageKind::Annuity);
    auto lin = build_linear_hedge(f.np, f.K());
    auto prof = hedge_error_profile(f.hw, f.sc, f.paths, f.np, lin);
    REQUIRE(prof.error.size() == 10);
    auto mc = summarize(ias_path_values(f.hw, f.sc, f.paths, f.np), true);
    CHECK(prof.error[0] <= 3.0 * mc.std_error);
    for (double e : prof.error) CHECK(e < 1e-3);
}

TEST_CASE("Gamma weights") {
    auto cells = diagonal_cells(10);
    SwaptionGrid value(10);
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(9);
    Eigen::MatrixXd G = Eigen::MatrixXd::Identity(9, 9);
    auto fit = calibrate_gamma(zero, zero, G, cells, value);
    CHECK(fit.gamma_weights.w.norm() == 0.0);

    Eigen::VectorXd gi = Eigen::VectorXd::LinSpaced(9, -1.0, 1.0);
    Eigen::VectorXd ga = Eigen::VectorXd::Zero(9);
    value(4, 10) = 2.0;
    auto f2 = calibrate_gamma(gi, ga, G, cells, value);
    for (int c = 0; c < 9; ++c) CHECK(f2.gamma_weights(c + 1, 10) == Approx(-gi(c)).epsilon(1e-14));
    CHECK(f2.averaged(4, 10) == Approx(0.5 * (2.0 - gi(3))).epsilon(1e-14));
    auto f3 = calibrate_gamma(gi, ga, G, cells, value, false);
    for (int c = 0; c < 9; ++c) CHECK(f3.gamma_weights(c + 1, 10) >= 0.0);
}

TEST_CASE("strategy names") {
    CHECK(parse_strategy("diag9") == Strategy::Diagonal);
    CHECK(parse_strategy("single-5y5y") == Strategy::Single5y5y);
    CHECK(to_string(Strategy::Full) == "full");
    CHECK_THROWS_AS(parse_strategy("best"), InputError);
    CHECK(cell_label({5, 10}) == "5Y-5Y");
}
