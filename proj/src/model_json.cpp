#include "coxaff/model_json.hpp"

#include <fstream>

#include "coxaff/error.hpp"

namespace coxaff {

namespace {

using nlohmann::json;

double number(const json& doc, const char* key) {
  if (!doc.contains(key)) throw DataError(std::string("model: missing field '") + key + "'");
  const json& v = doc.at(key);
  if (!v.is_number()) throw DataError(std::string("model: field '") + key + "' must be a number");
  return v.get<double>();
}

Eigen::VectorXd vector(const json& doc, const char* key) {
  if (!doc.contains(key)) throw DataError(std::string("model: missing field '") + key + "'");
  const json& v = doc.at(key);
  if (!v.is_array()) throw DataError(std::string("model: field '") + key + "' must be an array");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw DataError(std::string("model: '") + key + "' has a non-number entry");
    out[Eigen::Index(i)] = v[i].get<double>();
  }
  return out;
}

Eigen::MatrixXd matrix(const json& doc, const char* key) {
  if (!doc.contains(key)) throw DataError(std::string("model: missing field '") + key + "'");
  const json& v = doc.at(key);
  if (!v.is_array() || v.empty() || !v[0].is_array())
    throw DataError(std::string("model: field '") + key + "' must be an array of rows");
  const std::size_t rows = v.size(), cols = v[0].size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols)
      throw StructuralError(std::string("model: rows of '") + key + "' differ in length");
    for (std::size_t j = 0; j < cols; ++j) {
      if (!v[i][j].is_number()) throw DataError(std::string("model: '") + key + "' has a non-number entry");
      out(Eigen::Index(i), Eigen::Index(j)) = v[i][j].get<double>();
    }
  }
  return out;
}

json rows(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    out.push_back(r);
  }
  return out;
}

json entries(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

ModelSpec parse_model(const json& doc) {
  if (!doc.is_object()) throw DataError("model: document must be a JSON object");
  const std::string kind = doc.value("kind", std::string("feller"));
  ModelSpec out;
  if (kind == "feller") {
    out.kind = ModelKind::feller;
    out.feller.kappa = number(doc, "kappa");
    out.feller.theta = number(doc, "theta");
    out.feller.sigma = number(doc, "sigma");
    out.feller.lambda0 = doc.contains("lambda0") ? number(doc, "lambda0") : out.feller.theta;
    out.feller.validate();
    out.affine = as_affine(out.feller);
  } else if (kind == "affine") {
    out.kind = ModelKind::affine;
    AffineModel& m = out.affine;
    m.kappa = matrix(doc, "kappa");
    m.theta = vector(doc, "theta");
    m.sigma = matrix(doc, "sigma");
    m.a = vector(doc, "a");
    m.b = matrix(doc, "b");
    m.rho0 = doc.contains("rho0") ? number(doc, "rho0") : 0.0;
    m.rho1 = vector(doc, "rho1");
    m.x0 = vector(doc, "x0");
    m.validate();
  } else {
    throw DataError("model: unknown kind '" + kind + "' (expected feller or affine)");
  }
  if (doc.contains("R")) {
    out.R = number(doc, "R");
    if (!(*out.R >= 0.0)) throw DomainError("model: R must be >= 0");
  }
  return out;
}

ModelSpec load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("model file " + path + ": " + e.what());
  }
  return parse_model(doc);
}

json to_json(const FellerModel& m) {
  return {{"kind", "feller"}, {"kappa", m.kappa}, {"theta", m.theta}, {"sigma", m.sigma}, {"lambda0", m.lambda0}};
}

json to_json(const AffineModel& m) {
  return {{"kind", "affine"}, {"kappa", rows(m.kappa)}, {"theta", entries(m.theta)},
          {"sigma", rows(m.sigma)}, {"a", entries(m.a)},        {"b", rows(m.b)},
          {"rho0", m.rho0},         {"rho1", entries(m.rho1)},  {"x0", entries(m.x0)}};
}

json to_json(const ModelSpec& m) {
  json out = m.kind == ModelKind::feller ? to_json(m.feller) : to_json(m.affine);
  if (m.R) out["R"] = *m.R;
  return out;
}

}  // namespace coxaff
