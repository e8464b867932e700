#include "core/model_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <vector>

#include "core/errors.hpp"

namespace hcr {

namespace {

using nlohmann::json;

constexpr const char* kSchema = "hcr-model";
constexpr int kVersion = 1;

json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

json rank_map_to_json(const RankMap& m) {
  return {
      {"kind", m.kind() == RankMapKind::redshift_analytic ? "redshift" : "empirical"},
      {"numeric", m.numeric()},
      {"count", m.fitted_count()},
      {"values", m.distinct_values()},
      {"text_values", m.distinct_text_values()},
      {"positions", m.positions()},
  };
}

RankMap rank_map_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind != "redshift" && kind != "empirical") {
    fail(ErrorCode::schema_mismatch, "unknown rank map kind \"" + kind + "\"");
  }
  return RankMap::restore(
      kind == "redshift" ? RankMapKind::redshift_analytic : RankMapKind::empirical,
      j.at("numeric").get<bool>(), j.at("count").get<std::size_t>(),
      j.at("values").get<std::vector<double>>(),
      j.at("text_values").get<std::vector<std::string>>(),
      j.at("positions").get<std::vector<double>>());
}

json column_spec_to_json(const ColumnSpec& spec) {
  json j{
      {"name", spec.name},
      {"kind", column_kind_name(spec.kind)},
      {"levels", spec.discrete_levels},
      {"numeric_levels", spec.numeric_levels},
  };
  j["missing_marker"] = spec.missing_marker ? json(*spec.missing_marker) : json();
  return j;
}

ColumnSpec column_spec_from_json(const json& j) {
  ColumnSpec spec;
  spec.name = j.at("name").get<std::string>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "continuous") {
    spec.kind = ColumnKind::continuous;
  } else if (kind == "discrete") {
    spec.kind = ColumnKind::discrete;
  } else if (kind == "mixed") {
    spec.kind = ColumnKind::mixed;
  } else {
    fail(ErrorCode::schema_mismatch, "unknown column kind \"" + kind + "\"");
  }
  spec.discrete_levels = j.at("levels").get<std::vector<std::string>>();
  spec.numeric_levels = j.at("numeric_levels").get<bool>();
  if (!j.at("missing_marker").is_null()) {
    spec.missing_marker = j.at("missing_marker").get<std::string>();
  }
  return spec;
}

json encoder_to_json(const FeatureEncoder& encoder) {
  json columns = json::array();
  for (const auto& enc : encoder.column_encodings()) {
    json c{{"spec", column_spec_to_json(enc.spec)}};
    c["rank"] = enc.rank ? rank_map_to_json(*enc.rank) : json();
    columns.push_back(std::move(c));
  }
  return {
      {"degree", encoder.degree()},
      {"pair_products", encoder.pair_products()},
      {"columns", std::move(columns)},
  };
}

FeatureEncoder encoder_from_json(const json& j) {
  std::vector<ColumnEncoding> columns;
  for (const auto& c : j.at("columns")) {
    std::optional<RankMap> rank;
    if (!c.at("rank").is_null()) rank = rank_map_from_json(c.at("rank"));
    columns.push_back(
        make_column_encoding(column_spec_from_json(c.at("spec")), std::move(rank)));
  }
  return FeatureEncoder::restore(std::move(columns), j.at("degree").get<int>(),
                                 j.at("pair_products").get<bool>());
}

json calibration_to_json(const CalibrationConfig& c) {
  return {
      {"kind", calibration_kind_name(c.kind)},
      {"lattice", c.lattice_size},
      {"softplus_scale", c.softplus_scale},
      {"softplus_offset", c.softplus_offset},
      {"clip_floor", c.clip_floor},
  };
}

CalibrationConfig calibration_from_json(const json& j) {
  CalibrationConfig c;
  c.kind = parse_calibration_kind(j.at("kind").get<std::string>());
  c.lattice_size = j.at("lattice").get<int>();
  c.softplus_scale = j.at("softplus_scale").get<double>();
  c.softplus_offset = j.at("softplus_offset").get<double>();
  c.clip_floor = j.at("clip_floor").get<double>();
  return c;
}

}  // namespace

std::string model_to_text(const DensityModel& model) {
  json columns = json::array();
  for (Eigen::Index c = 0; c < model.rotation.cols(); ++c) {
    columns.push_back(vector_to_json(model.rotation.col(c)));
  }
  json models = json::array();
  for (const auto& lm : model.coefficient_models) {
    models.push_back({
        {"name", lm.target_name},
        {"intercept", lm.intercept},
        {"lambda", lm.lambda},
        {"coefficients", vector_to_json(lm.coefficients)},
    });
  }
  const json j{
      {"schema", kSchema},
      {"version", kVersion},
      {"target", model.target_name},
      {"degree", model.degree},
      {"calibration", calibration_to_json(model.calibration)},
      {"target_map", rank_map_to_json(model.target_map)},
      {"encoder", encoder_to_json(model.encoder)},
      {"standardization",
       {{"mean", model.standardization.mean}, {"scale", model.standardization.scale}}},
      {"rotation", {{"rows", model.rotation.rows()}, {"columns", std::move(columns)}}},
      {"coefficient_models", std::move(models)},
  };
  return j.dump(2) + "\n";
}

DensityModel model_from_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, std::string("model document is not valid JSON: ") +
                               e.what());
  }
  try {
    if (j.at("schema").get<std::string>() != kSchema) {
      fail(ErrorCode::schema_mismatch, "not a model document");
    }
    if (j.at("version").get<int>() != kVersion) {
      fail(ErrorCode::schema_mismatch,
           "unsupported model version " + j.at("version").dump());
    }
    DensityModel model;
    model.target_name = j.at("target").get<std::string>();
    model.degree = j.at("degree").get<int>();
    model.calibration = calibration_from_json(j.at("calibration"));
    model.target_map = rank_map_from_json(j.at("target_map"));
    model.encoder = encoder_from_json(j.at("encoder"));
    model.standardization.mean =
        j.at("standardization").at("mean").get<std::vector<double>>();
    model.standardization.scale =
        j.at("standardization").at("scale").get<std::vector<double>>();
    const json& rot = j.at("rotation");
    const auto rows = rot.at("rows").get<Eigen::Index>();
    const auto& cols = rot.at("columns");
    model.rotation.resize(rows, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      Eigen::VectorXd col = vector_from_json(cols[c]);
      if (col.size() != rows) {
        fail(ErrorCode::schema_mismatch, "ragged rotation matrix");
      }
      model.rotation.col(static_cast<Eigen::Index>(c)) = col;
    }
    for (const auto& lm_json : j.at("coefficient_models")) {
      LassoModel lm;
      lm.target_name = lm_json.at("name").get<std::string>();
      lm.intercept = lm_json.at("intercept").get<double>();
      lm.lambda = lm_json.at("lambda").get<double>();
      lm.coefficients = vector_from_json(lm_json.at("coefficients"));
      model.coefficient_models.push_back(std::move(lm));
    }
    model.rebuild_cache();
    model.check();
    return model;
  } catch (const json::exception& e) {
    fail(ErrorCode::schema_mismatch,
         std::string("model document malformed: ") + e.what());
  }
}

void save_model(const DensityModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    fail(ErrorCode::io, "cannot open \"" + path + "\" for writing");
  }
  out << model_to_text(model);
  if (!out) {
    fail(ErrorCode::io, "write failed for \"" + path + "\"");
  }
}

DensityModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::io, "cannot open \"" + path + "\"");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_text(buffer.str());
}

}  // namespace hcr
