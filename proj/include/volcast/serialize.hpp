#pragma once

#include <string>

#include "volcast/garch.hpp"
#include "volcast/gru.hpp"

namespace volcast {

// JSON round-trips for fitted models. Readers validate shape metadata and
// throw DataError on mismatch or malformed input.
std::string garch_fit_to_json(const GarchFit& fit);
GarchFit garch_fit_from_json(const std::string& text);

std::string gru_weights_to_json(const GruWeights& weights, const GruConfig& config);
GruWeights gru_weights_from_json(const std::string& text, const GruConfig& expected);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace volcast
