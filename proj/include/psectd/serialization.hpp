#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "psectd/core.hpp"
#include "psectd/empirical.hpp"
#include "psectd/learners.hpp"

namespace psectd {

// All table payloads are row-major with explicit shape fields; doubles
// round-trip losslessly through nlohmann's shortest-representation printer.

nlohmann::json mdp_to_json(const TabularMDP& model);
TabularMDP mdp_from_json(const nlohmann::json& j);

nlohmann::json policy_to_json(const TabularPolicy& policy);
TabularPolicy policy_from_json(const nlohmann::json& j);

nlohmann::json value_estimate_to_json(const ValueEstimate& estimate);
ValueEstimate value_estimate_from_json(const nlohmann::json& j);

nlohmann::json fit_report_to_json(const FitReport& report);

/// Counts and MLE tables with an explicit visited-state index map
/// (state id <-> dense matrix index in canonical order).
nlohmann::json empirical_to_json(const EmpiricalModel& em);

/// JSON lines: a header object first, then one episode object per line.
void write_batch_jsonl(std::ostream& os, const Batch& batch);
Batch read_batch_jsonl(std::istream& is);

void save_json(const nlohmann::json& j, const std::string& path);
nlohmann::json load_json(const std::string& path);
void save_batch(const Batch& batch, const std::string& path);
Batch load_batch(const std::string& path);

}  // namespace psectd
