#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "prepay/curve.hpp"
#include "prepay/ias_pricer.hpp"
#include "prepay/shortrate.hpp"

namespace fixtures {

inline std::filesystem::path data_dir() { return PREPAY_DATA_DIR; }

inline std::vector<prepay::SwapQuote> reference_quotes() {
    return prepay::read_swap_quotes_csv(data_dir() / "reference_curve.csv");
}

inline prepay::YieldCurve reference_curve() { return prepay::bootstrap(reference_quotes()); }

// Continuously compounded flat curve on yearly pillars out to 40y.
inline prepay::YieldCurve flat_curve(double rate) {
    std::vector<double> t, p;
    for (int i = 1; i <= 40; ++i) {
        t.push_back(i);
        p.push_back(std::exp(-rate * i));
    }
    return {t, p};
}

// Parameters used throughout the examples and configs.
inline constexpr prepay::HullWhiteParams kHw{0.264, 0.017};
// Fit of the counter-diagonal on the reference curve (what `calibrate` reports).
inline constexpr prepay::HullWhiteParams kHwCalibrated{0.217345, 0.0144904};

inline prepay::HullWhite reference_model(prepay::HullWhiteParams p = kHw) {
    return {reference_curve(), p};
}

}  // namespace fixtures
