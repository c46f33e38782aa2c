#include "clh/instance_io.hpp"

#include <fstream>
#include <json.hpp>

namespace clh {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  json entries = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      entries.push_back({m(r, c).real(), m(r, c).imag()});
    }
  }
  return json{{"dim", m.rows()}, {"entries", std::move(entries)}};
}

Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries")) {
    fail(ErrorKind::ParseError, where + ": matrix needs \"dim\" and \"entries\"");
  }
  Eigen::Index dim = j.at("dim").get<Eigen::Index>();
  const json& entries = j.at("entries");
  if (dim < 1 || !entries.is_array() || Eigen::Index(entries.size()) != dim * dim) {
    fail(ErrorKind::ParseError, where + ": entries length must equal dim^2");
  }
  Matrix m(dim, dim);
  Eigen::Index k = 0;
  for (const json& e : entries) {
    if (!e.is_array() || e.size() != 2) {
      fail(ErrorKind::ParseError, where + ": each entry must be [re, im]");
    }
    m(k / dim, k % dim) = Complex(e[0].get<double>(), e[1].get<double>());
    ++k;
  }
  return m;
}

}  // namespace

std::string instance_to_json_text(const Instance& inst) {
  json j;
  j["format"] = "clh-2d/v1";
  json lat{{"rows", inst.lattice.rows},
           {"cols", inst.lattice.cols},
           {"boundary", to_string(inst.lattice.boundary)},
           {"carrier", to_string(inst.lattice.carrier)}};
  if (inst.lattice.shift != 0) lat["shift"] = inst.lattice.shift;
  j["lattice"] = std::move(lat);
  j["qudit_dims"] = inst.qudit_dims;
  json terms = json::array();
  for (const Term& t : inst.terms) {
    json jt{{"id", t.id}, {"support", t.support}, {"matrix", matrix_to_json(t.matrix)}};
    if (t.factors) {
      json fs = json::array();
      for (const Matrix& f : *t.factors) fs.push_back(matrix_to_json(f));
      jt["factors"] = std::move(fs);
    }
    terms.push_back(std::move(jt));
  }
  j["terms"] = std::move(terms);
  j["tolerance"] = json{{"eps_eq", inst.tol.eps_eq},
                        {"eps_rank", inst.tol.eps_rank},
                        {"seed", inst.tol.seed}};
  return j.dump(2) + "\n";
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::ParseError, "cannot open " + path + " for writing");
  out << instance_to_json_text(inst);
}

Instance instance_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ParseError, e.what());
  }
  if (!j.is_object() || j.value("format", "") != "clh-2d/v1") {
    fail(ErrorKind::ParseError, "missing or unknown \"format\" (want clh-2d/v1)");
  }
  Instance inst;
  try {
    const json& lat = j.at("lattice");
    inst.lattice.rows = lat.at("rows").get<int>();
    inst.lattice.cols = lat.at("cols").get<int>();
    inst.lattice.boundary = boundary_from_string(lat.at("boundary").get<std::string>());
    inst.lattice.carrier = carrier_from_string(lat.at("carrier").get<std::string>());
    inst.lattice.shift = lat.value("shift", 0);
    inst.qudit_dims = j.at("qudit_dims").get<std::vector<Eigen::Index>>();
    for (const json& jt : j.at("terms")) {
      Term t;
      t.id = jt.at("id").get<int>();
      t.support = jt.at("support").get<std::vector<int>>();
      t.matrix = matrix_from_json(jt.at("matrix"), "term " + std::to_string(t.id));
      if (jt.contains("factors")) {
        std::vector<Matrix> fs;
        for (const json& jf : jt.at("factors")) {
          fs.push_back(matrix_from_json(jf, "term " + std::to_string(t.id) + " factor"));
        }
        t.factors = std::move(fs);
      }
      inst.terms.push_back(std::move(t));
    }
    if (j.contains("tolerance")) {
      const json& tl = j.at("tolerance");
      inst.tol.eps_eq = tl.value("eps_eq", inst.tol.eps_eq);
      inst.tol.eps_rank = tl.value("eps_rank", inst.tol.eps_rank);
      inst.tol.seed = tl.value("seed", inst.tol.seed);
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, e.what());
  }
  inst.validate();
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return instance_from_json_text(text);
}

}  // namespace clh
