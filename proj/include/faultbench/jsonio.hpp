#pragma once

#include <json.hpp>

namespace faultbench {

/// ordered_json keeps object keys in insertion order, which together with
/// integer-only numeric fields gives byte-stable serialization for traces
/// and datasets.
using Json = nlohmann::ordered_json;

} // namespace faultbench
