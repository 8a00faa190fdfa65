#pragma once

#include "normcase/reasoner/engine.hpp"

#include <json.hpp>

#include <string>

namespace normcase::reasoner {

/// Canonical JSON: sorted object keys, sorted base facts, duties by
/// creation, trace by seq. Byte-equal snapshots mean equal states.
std::string snapshot(const ReasonerState& state);

/// Inverse of snapshot(). Throws ReasonerError: Malformed for bad
/// documents, IncompatibleVersion when the snapshot names types the model
/// lacks or uses them with a different shape.
ReasonerState restore(std::shared_ptr<const Model> model, std::string_view serialized);

// Shared wire encodings.
nlohmann::json literal_to_json(const Literal& lit);
Literal literal_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);
nlohmann::json truth_to_json(TruthValue v);  // true / false / "unknown"
TruthValue truth_from_json(const nlohmann::json& j);
nlohmann::json duty_to_json(const DutyInstance& d);
nlohmann::json violation_to_json(const Violation& v);
nlohmann::json act_status_to_json(const ActStatus& s);
nlohmann::json report_to_json(const ExecutionReport& r);
nlohmann::json input_to_json(const InputEvent& e);
InputEvent input_from_json(const nlohmann::json& j);

} // namespace normcase::reasoner
