#pragma once

#include <string>

#include "volcast/garch.hpp"

namespace volcast {

struct SyntheticOhlc {
    PriceSeries prices;
    std::vector<Date> dates;
    std::vector<double> sigma_true;  // generator volatility, return-scale units
    ReturnSeries returns;            // close-to-close log returns implied by the path
};

// Builds an OHLC series around a simulated GARCH return path. A fraction of
// each day's variance is assigned to the overnight open gap; the intraday
// high/low come from the max/min laws of a Brownian bridge between the log
// open and log close.
SyntheticOhlc synthesize_ohlc(const GarchSpec& spec, const GarchParams& params, std::size_t days,
                              std::uint64_t seed, double scale = 100.0,
                              double initial_price = 100.0, double overnight_fraction = 0.2,
                              Date start_date = Date(2000, 1, 3));

void write_ohlc_csv(const std::string& path, const PriceSeries& prices);
void write_true_volatility_csv(const std::string& path, const SyntheticOhlc& data);

}  // namespace volcast
