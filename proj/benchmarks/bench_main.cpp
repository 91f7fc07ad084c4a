#include <benchmark/benchmark.h>

#include <filesystem>

#include "prepay/curve.hpp"
#include "prepay/hedge.hpp"
#include "prepay/ias_pricer.hpp"
#include "prepay/shortrate.hpp"

using namespace prepay;

namespace {

const std::filesystem::path kData = PREPAY_DATA_DIR;

const YieldCurve& curve() {
    static const YieldCurve c = bootstrap(read_swap_quotes_csv(kData / "reference_curve.csv"));
    return c;
}

HullWhite model() { return {curve(), {0.217345, 0.0144904}}; }

IasScenario bullet(std::size_t n) {
    IasScenario sc;
    sc.mortgage = {MortgageKind::Bullet, 1e6, atm_mortgage_rate(curve(), MortgageKind::Bullet, 10), 10};
    sc.cpr = CprModel(LogisticCpr{{0.06, 0.14, -300.0, 4.0}});
    sc.n_paths = n;
    sc.seed = 7;
    return sc;
}

void BM_Bootstrap(benchmark::State& st) {
    const auto q = read_swap_quotes_csv(kData / "reference_curve.csv");
    for (auto _ : st) benchmark::DoNotOptimize(bootstrap(q));
}
BENCHMARK(BM_Bootstrap);

void BM_SimulatePaths(benchmark::State& st) {
    const auto hw = model();
    const auto grid = mortgage_grid(bullet(2).mortgage);
    for (auto _ : st) benchmark::DoNotOptimize(simulate_paths(hw, grid, static_cast<std::size_t>(st.range(0)), 7));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_SimulatePaths)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_PriceIas(benchmark::State& st) {
    const auto hw = model();
    const auto sc = bullet(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(price_ias_mc(hw, sc));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_PriceIas)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_JamshidianSwaption(benchmark::State& st) {
    const auto hw = model();
    for (auto _ : st)
        benchmark::DoNotOptimize(JamshidianSwaption(hw, 5.0, 10.0, 0.009, SwaptionType::Receiver).price(hw));
}
BENCHMARK(BM_JamshidianSwaption);

void BM_CalibrateHw(benchmark::State& st) {
    const auto q = select_instruments(read_vol_matrix_csv(kData / "swaption_vols_2018-01-23.csv"), "counterdiag10y");
    for (auto _ : st) benchmark::DoNotOptimize(calibrate_hw(curve(), q));
}
BENCHMARK(BM_CalibrateHw)->Unit(benchmark::kMillisecond);

struct HedgeInputs {
    HullWhite hw = model();
    IasScenario sc = bullet(20000);
    PathSet paths = simulate_paths(hw, mortgage_grid(sc.mortgage), sc.n_paths, sc.seed);
    NotionalPathSet np = simulate_notional(hw, sc, paths);
};

const HedgeInputs& hedge_inputs() {
    static const HedgeInputs h;
    return h;
}

void BM_CalibrateDiagonal(benchmark::State& st) {
    const auto& h = hedge_inputs();
    for (auto _ : st) benchmark::DoNotOptimize(calibrate_diagonal(h.np, h.sc.mortgage.rate));
}
BENCHMARK(BM_CalibrateDiagonal)->Unit(benchmark::kMillisecond);

void BM_CalibrateFullGrid(benchmark::State& st) {
    const auto& h = hedge_inputs();
    const auto cells = full_cells(10);
    for (auto _ : st) benchmark::DoNotOptimize(calibrate_numeric(h.np, h.sc.mortgage.rate, cells));
}
BENCHMARK(BM_CalibrateFullGrid)->Unit(benchmark::kMillisecond);

void BM_HedgeErrorProfile(benchmark::State& st) {
    const auto& h = hedge_inputs();
    auto pf = build_envelope_hedge(h.np, h.sc.mortgage.rate);
    pf.swaptions = calibrate_diagonal(h.np, h.sc.mortgage.rate).weights;
    for (auto _ : st) benchmark::DoNotOptimize(hedge_error_profile(h.hw, h.sc, h.paths, h.np, pf));
}
BENCHMARK(BM_HedgeErrorProfile)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
