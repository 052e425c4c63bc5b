#pragma once

// JSON form of the intensity models.
//
//   {"kind": "feller", "kappa": 1, "theta": 1, "sigma": 0.5, "lambda0": 1, "R": 0.001}
//   {"kind": "affine", "kappa": [[..]], "theta": [..], "sigma": [[..]], "a": [..],
//    "b": [[..]], "rho0": 0, "rho1": [..], "x0": [..]}
//
// "R" (measurement-noise std) is optional and only read by the estimator.

#include <optional>
#include <string>

#include <json.hpp>

#include "coxaff/model.hpp"

namespace coxaff {

enum class ModelKind { feller, affine };

struct ModelSpec {
  ModelKind kind = ModelKind::feller;
  FellerModel feller;  // kind == feller
  AffineModel affine;  // always filled; as_affine(feller) for Feller documents
  std::optional<double> R;
};

// Throws DataError on missing or mistyped fields, DomainError or
// StructuralError on invalid values.
ModelSpec parse_model(const nlohmann::json& doc);
ModelSpec load_model(const std::string& path);

nlohmann::json to_json(const FellerModel& m);
nlohmann::json to_json(const AffineModel& m);
nlohmann::json to_json(const ModelSpec& m);

}  // namespace coxaff
