#pragma once

#include <string>

#include <json.hpp>

#include "slrd/config.hpp"
#include "slrd/experiment.hpp"

namespace slrd {

using Json = nlohmann::ordered_json;

Json to_json(const LimitVariance& v);
Json to_json(const CltReport& r);
Json to_json(const GrowthFit& g);
Json to_json(const VarianceDecomposition& v);
Json to_json(const LambdaRow& row);

/// JSON document with version, materialized config and `body` under `result`.
std::string json_document(const RunConfig& config, const Json& body);

/// CSV preceded by '#' lines carrying the version and the materialized config.
std::string csv_document(const RunConfig& config, const std::string& csv);

std::string scan_csv(const ExperimentReport& report);
std::string decomposition_csv(const ExperimentReport& report);

}  // namespace slrd
