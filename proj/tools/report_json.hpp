#pragma once

#include <json.hpp>

#include "mlandscape/analysis.hpp"

namespace mlandscape::cli {

/// Finite doubles as numbers; infinities and NaN as the strings "inf", "-inf", "nan".
nlohmann::json num(double x);
nlohmann::json one_based(const IndexSet& s);

nlohmann::json to_json(const MatrixClass& c);
nlohmann::json to_json(const EigenQuality& q);
nlohmann::json to_json(const LocalizationReport& r);
nlohmann::json to_json(const DecouplingReport& r);
nlohmann::json to_json(const CountingReport& r);
nlohmann::json to_json(const ScatterData& s);
nlohmann::json to_json(const IdentityCheck& c);
nlohmann::json to_json(const InequalityCheck& c);
nlohmann::json to_json(const WellPartition& p);
nlohmann::json to_json(const PartitionRun& r);

/// Counts and failures of every check family in the bundle.
nlohmann::json summary_json(const VerificationBundle& b);

}  // namespace mlandscape::cli
