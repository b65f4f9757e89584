#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "mwstats/analysis.hpp"
#include "mwstats/dualpath.hpp"
#include "mwstats/states.hpp"

namespace mwstats {

using Json = nlohmann::ordered_json;

/// Writes `<base>.bin` (little-endian float64 I1,Q1,I2,Q2 per sample) and
/// `<base>.json` (N, gains, if_frequency, seed).
void write_record_binary(const DetectionRecord& rec, const std::filesystem::path& base);
DetectionRecord read_record_binary(const std::filesystem::path& base);

/// CSV with header `index,I1,Q1,I2,Q2`. Gains and seed are not stored; the
/// returned record has unit gains unless overridden by the caller.
void write_record_csv(const DetectionRecord& rec, const std::filesystem::path& path);
DetectionRecord read_record_csv(const std::filesystem::path& path);

/// {"ordering": ..., "moments": {"n,m": [re, im], ...}}
Json moments_to_json(const MomentSet& m);
MomentSet moments_from_json(const Json& j);

/// {"moments": {"n,m,k,l": [value, 0], ...}}
Json cross_moments_to_json(const CrossMomentSet& cm);
CrossMomentSet cross_moments_from_json(const Json& j);

/// Parameters, standard errors, correlation matrix, residual norm and convergence.
Json fit_to_json(const FitResult& fit);

/// "%.17g" formatting used by every CSV writer so outputs round-trip exactly.
std::string format_double(double v);

}  // namespace mwstats
