/*
 *  Copyright 2026 The covsel Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "covsel/fit.hpp"
#include "covsel/population.hpp"
#include "covsel/select.hpp"
#include "covsel/simulate.hpp"
#include "json.hpp"

namespace covsel::io {

using Json = nlohmann::json;

// A family file may also carry a penalty and a population target.
struct FamilyDocument {
    CandidateFamily family;
    std::optional<PenaltySystem> penalty;
    std::optional<PopulationTarget> target;
};

[[nodiscard]] Json read_json_file(const std::string& path);
// Two-space indent, sorted keys, trailing newline.
void write_json_file(const std::string& path, const Json& j);
void write_text_file(const std::string& path, const std::string& text);

[[nodiscard]] FamilyDocument parse_family(const Json& j);
[[nodiscard]] Json family_to_json(const CandidateFamily& family);
[[nodiscard]] PopulationTarget parse_target(const Json& j, const std::string& where = "target");
[[nodiscard]] DataLaw parse_law(const Json& j);
[[nodiscard]] PenaltySystem parse_penalty(const Json& j, const std::string& where = "penalty");
// bic|caic|hbic|ssbic|hq|aic|custom:<file>
[[nodiscard]] PenaltySystem parse_penalty_flag(const std::string& flag);
[[nodiscard]] MonteCarloPlan parse_plan(const Json& j);

[[nodiscard]] SampleMoments parse_moments(const Json& j);
[[nodiscard]] Json to_json(const SampleMoments& m);

// Rows are observations; a header line is skipped when `header` is set.
[[nodiscard]] Matrix read_csv(const std::string& path, bool header);

[[nodiscard]] Json to_json(const Matrix& m);
[[nodiscard]] Json to_json(const FitResult& r);
[[nodiscard]] Json to_json(const SelectionReport& r);
[[nodiscard]] Json to_json(const PopulationSummary& s);
[[nodiscard]] Json to_json(const AssumptionDiagnostics& d);
[[nodiscard]] Json to_json(const McReport& r);
[[nodiscard]] Json to_json(const PathologyReport& r);
[[nodiscard]] Json to_json(const PenaltyClassification& c);

// Flat system,n,order,frequency table.
[[nodiscard]] std::string mc_csv(const McReport& r);

}  // namespace covsel::io
