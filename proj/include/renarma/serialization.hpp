#pragma once

/// @file
/// JSON and CSV encodings of specs, models, Markov tables and count series.
/// Every document carries a "schema" tag of the form renewal-arma/<kind>/v1;
/// the matching JSON Schema files live in schemas/.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "renarma/arma.hpp"
#include "renarma/lifetime.hpp"
#include "renarma/markov.hpp"
#include "renarma/simulate.hpp"

namespace renarma {

using Json = nlohmann::json;

inline constexpr const char* kSeriesSchema = "renewal-arma/series/v1";
inline constexpr const char* kModelSchema = "renewal-arma/model/v1";
inline constexpr const char* kFactorizeSchema = "renewal-arma/factorize/v1";
inline constexpr const char* kMarkovSchema = "renewal-arma/markov/v1";
inline constexpr const char* kVerifySchema = "renewal-arma/verify/v1";
inline constexpr const char* kManifestSchema = "renewal-arma/manifest/v1";

/// {"head": [...], "r": ...}
Json to_json(const LifetimeSpec& spec);
LifetimeSpec spec_from_json(const Json& j, LifetimeOptions options = {});

/// {"phi": [...], "theta": [...], "k": ..., "M": ..., "mu": ..., "sigma2": ...}
Json to_json(const ArmaModel& model);
ArmaModel model_from_json(const Json& j);

Json to_json(const TriJointTable& table);
Json to_json(const ConditionalTableP2& table);
Json to_json(const CausalityReport& report);

/// {"head", "r", "M", "steps", "seed"}
Json to_json(const SimConfig& config);

/// Metadata object embedded in series files.
Json series_meta(const SimConfig& config);

/// CSV: one "# meta: {json}" line, then "t,y" and one row per step, LF endings.
void write_series_csv(std::ostream& out, const CountSeries& series);
/// JSON: {"meta": {...}, "values": [...]}.
void write_series_json(std::ostream& out, const CountSeries& series);

/// Reads either encoding back; detects the format from the first byte.
CountSeries read_series(std::istream& in);

}  // namespace renarma
