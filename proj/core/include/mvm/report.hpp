#pragma once

#include <string>
#include <vector>

#include "mvm/applications.hpp"
#include "mvm/hjb.hpp"
#include "mvm/sde.hpp"

#include <json.hpp>

namespace mvm {

// Result emission. Every document carries schema "mvm/1"; deterministic
// payload lives under "records" and wall-clock data under "meta", so two
// runs of the same config and seed produce byte-identical records.

nlohmann::json mc_record(const McResult& r);
nlohmann::json hjb_record(const HjbSolution& s);
nlohmann::json validation_record(const ValidationReport& r);

/// Wrap records into a schema-versioned document. `config_echo` may be empty.
nlohmann::json make_document(const std::string& command, const std::string& config_echo,
                             std::vector<nlohmann::json> records, double runtime_seconds);

void write_json(const nlohmann::json& doc, const std::string& path);

/// Nodal dump: header p_1..p_N,value,policy_index.
void write_hjb_csv(const SimplexGrid& grid, const HjbSolution& sol, const std::string& path);

/// Axis-explicit dumps for the time-extended solvers.
void write_root_csv(const RootSolution& sol, const std::string& path);
void write_asian_csv(const AsianSolution& sol, const std::string& path);
void write_game_csv(const GameSolution& sol, const std::string& path);

} // namespace mvm
