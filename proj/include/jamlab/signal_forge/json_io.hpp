#pragma once

#include "jamlab/common/json_util.hpp"
#include "jamlab/signal_forge/dataset.hpp"

namespace jamlab::signal_forge {

void to_json(Json& j, const RadarParams& p);
void from_json(const Json& j, RadarParams& p);
void to_json(Json& j, const Range& r);
void from_json(const Json& j, Range& r);
void to_json(Json& j, const DatasetConfig& c);
// Missing keys keep their defaults.
void from_json(const Json& j, DatasetConfig& c);

}  // namespace jamlab::signal_forge
