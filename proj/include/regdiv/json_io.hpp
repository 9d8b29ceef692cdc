#pragma once

#include <string>

#include "json.hpp"

#include "regdiv/mc_sim.hpp"
#include "regdiv/model.hpp"
#include "regdiv/policy.hpp"
#include "regdiv/sweep.hpp"

namespace regdiv {

using Json = nlohmann::ordered_json;

// Accepts the nine parameter names plus an optional "allow_equal_thetas";
// missing names keep the value already in `base`. Unknown keys are rejected.
ModelParams params_from_json(const Json& j, ModelParams base, ValidationOptions* opts = nullptr);
Json to_json(const ModelParams& p);

// Accepts a bare policy object or any document with a "policy" member.
Policy policy_from_json(const Json& j);
Json to_json(const Policy& p);

Json to_json(const ConditionReport& c);
Json to_json(const VerificationReport& r);
Json to_json(const PiecewiseValue& w);
Json to_json(const CaseBSolution& s);
Json to_json(const CaseCDSolution& s);
Json to_json(const CandidateAttempt& a);
Json to_json(const Selection& s);
Json to_json(const SimEstimate& e);
Json to_json(const SweepTable& t);
Json to_json(const TableReproduction& t);
Json to_json(const FigureData& f);

// Rounds every floating-point leaf to `precision` significant digits.
Json round_numbers(const Json& j, int precision);
std::string dump(const Json& j, int precision = 6);

}  // namespace regdiv
