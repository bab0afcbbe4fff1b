#include "condgeo/serialize.hpp"

#include <charconv>
#include <fstream>

namespace condgeo {

std::string double_to_string(double v) {
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) {
    throw Error(ErrorCode::NumericalError, "number formatting failed");
  }
  return std::string(buf, ptr);
}

double string_to_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::DataError, "bad number string '" + s + "'");
  }
  return v;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  nlohmann::json values = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      values.push_back(double_to_string(m(i, c)));
    }
  }
  j["values"] = std::move(values);
  return j;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const auto& values = j.at("values");
  if (static_cast<Eigen::Index>(values.size()) != rows * cols) {
    throw Error(ErrorCode::DataError, "matrix value count mismatch");
  }
  Eigen::MatrixXd m(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c, ++k) {
      m(i, c) = string_to_double(values[k].get<std::string>());
    }
  }
  return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json values = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    values.push_back(double_to_string(v[i]));
  }
  return values;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = string_to_double(j[i].get<std::string>());
  }
  return v;
}

namespace {

nlohmann::json measure_to_json(const MeasureVariant& mv) {
  nlohmann::json j;
  if (const auto* d = std::get_if<DiscreteMeasure>(&mv)) {
    j["kind"] = "discrete";
    j["points"] = matrix_to_json(d->points);
    j["weights"] = vector_to_json(d->weights);
  } else {
    const auto& g = std::get<GaussianMeasure>(mv);
    j["kind"] = "gaussian";
    j["mean"] = vector_to_json(g.mean);
    j["covariance"] = matrix_to_json(g.covariance);
  }
  return j;
}

MeasureVariant measure_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "discrete") {
    DiscreteMeasure d;
    d.points = matrix_from_json(j.at("points"));
    d.weights = vector_from_json(j.at("weights"));
    return d;
  }
  if (kind == "gaussian") {
    GaussianMeasure g;
    g.mean = vector_from_json(j.at("mean"));
    g.covariance = matrix_from_json(j.at("covariance"));
    return g;
  }
  throw Error(ErrorCode::DataError, "unknown measure kind " + kind);
}

}  // namespace

nlohmann::json pipeline_to_json(const Pipeline& pipeline) {
  nlohmann::json j;
  j["schema"] = "condgeo.pipeline.v1";
  j["seed"] = pipeline.seed;
  j["p"] = double_to_string(pipeline.p);
  j["eps_label"] = double_to_string(pipeline.eps_label);

  nlohmann::json pair;
  pair["labels"] = nlohmann::json::array();
  pair["linear"] = nlohmann::json::array();
  pair["offset"] = nlohmann::json::array();
  for (std::size_t m = 0; m < pipeline.pair.num_labels(); ++m) {
    pair["labels"].push_back(vector_to_json(pipeline.pair.labels()[m]));
    pair["linear"].push_back(matrix_to_json(pipeline.pair.linear(m)));
    pair["offset"].push_back(vector_to_json(pipeline.pair.offset(m)));
  }
  j["pair"] = std::move(pair);

  nlohmann::json fam;
  fam["labels"] = nlohmann::json::array();
  fam["measures"] = nlohmann::json::array();
  for (std::size_t m = 0; m < pipeline.family.num_labels(); ++m) {
    fam["labels"].push_back(vector_to_json(pipeline.family.labels[m]));
    fam["measures"].push_back(measure_to_json(pipeline.family.measures[m]));
  }
  fam["label_weights"] = vector_to_json(pipeline.family.label_weights);
  j["family"] = std::move(fam);

  nlohmann::json tmap;
  tmap["provenance"] =
      pipeline.tmap.provenance == TransportMap::Provenance::exact_latent_ot
          ? "exact_latent_ot"
          : "fitted";
  tmap["labels"] = nlohmann::json::array();
  for (const auto& label : pipeline.tmap.labels) {
    tmap["labels"].push_back(vector_to_json(label));
  }
  tmap["entries"] = nlohmann::json::array();
  for (const auto& entry : pipeline.tmap.entries) {
    nlohmann::json e;
    e["affine"] = entry.affine;
    e["projected"] = entry.projected;
    if (entry.affine) {
      e["linear"] = matrix_to_json(entry.linear);
      e["offset"] = vector_to_json(entry.offset);
    } else {
      e["source_points"] = matrix_to_json(entry.source_points);
      e["images"] = matrix_to_json(entry.images);
      nlohmann::json idx = nlohmann::json::array();
      for (const Eigen::Index v : entry.image_index) idx.push_back(v);
      e["image_index"] = std::move(idx);
    }
    tmap["entries"].push_back(std::move(e));
  }
  j["tmap"] = std::move(tmap);
  return j;
}

Pipeline pipeline_from_json(const nlohmann::json& j) {
  if (j.value("schema", "") != "condgeo.pipeline.v1") {
    throw Error(ErrorCode::DataError, "unsupported pipeline schema");
  }
  Pipeline p;
  p.seed = j.at("seed").get<std::uint64_t>();
  p.p = string_to_double(j.at("p").get<std::string>());
  p.eps_label = string_to_double(j.at("eps_label").get<std::string>());

  const auto& pair = j.at("pair");
  std::vector<Eigen::VectorXd> labels;
  std::vector<Eigen::MatrixXd> linear;
  std::vector<Eigen::VectorXd> offset;
  for (std::size_t m = 0; m < pair.at("labels").size(); ++m) {
    labels.push_back(vector_from_json(pair.at("labels")[m]));
    linear.push_back(matrix_from_json(pair.at("linear")[m]));
    offset.push_back(vector_from_json(pair.at("offset")[m]));
  }
  p.pair = AffineBijectionPair(labels, linear, offset);

  const auto& fam = j.at("family");
  for (std::size_t m = 0; m < fam.at("labels").size(); ++m) {
    p.family.labels.push_back(vector_from_json(fam.at("labels")[m]));
    p.family.measures.push_back(measure_from_json(fam.at("measures")[m]));
  }
  p.family.label_weights = vector_from_json(fam.at("label_weights"));
  validate_family(p.family);

  const auto& tmap = j.at("tmap");
  p.tmap.provenance = tmap.at("provenance").get<std::string>() == "fitted"
                          ? TransportMap::Provenance::fitted
                          : TransportMap::Provenance::exact_latent_ot;
  for (std::size_t m = 0; m < tmap.at("labels").size(); ++m) {
    p.tmap.labels.push_back(vector_from_json(tmap.at("labels")[m]));
  }
  for (const auto& e : tmap.at("entries")) {
    TransportMapEntry entry;
    entry.affine = e.at("affine").get<bool>();
    entry.projected = e.at("projected").get<bool>();
    if (entry.affine) {
      entry.linear = matrix_from_json(e.at("linear"));
      entry.offset = vector_from_json(e.at("offset"));
    } else {
      entry.source_points = matrix_from_json(e.at("source_points"));
      entry.images = matrix_from_json(e.at("images"));
      for (const auto& v : e.at("image_index")) {
        entry.image_index.push_back(v.get<Eigen::Index>());
      }
    }
    p.tmap.entries.push_back(std::move(entry));
  }
  return p;
}

void save_pipeline(const std::string& path, const Pipeline& pipeline) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::DataError, "cannot write " + path);
  out << pipeline_to_json(pipeline).dump(2) << "\n";
}

Pipeline load_pipeline(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::DataError, "cannot open " + path);
  nlohmann::json j;
  in >> j;
  return pipeline_from_json(j);
}

}  // namespace condgeo
