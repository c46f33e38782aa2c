#include "clh/witness.hpp"

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

Matrix matrix_from_json(const json& j) {
  Eigen::Index dim = j.at("dim").get<Eigen::Index>();
  const json& entries = j.at("entries");
  if (dim < 0 || Eigen::Index(entries.size()) != dim * dim) {
    fail(ErrorKind::ParseError, "witness matrix entries length must be dim^2");
  }
  Matrix m(dim, dim);
  Eigen::Index k = 0;
  for (const json& e : entries) {
    m(k / dim, k % dim) = Complex(e[0].get<double>(), e[1].get<double>());
    ++k;
  }
  return m;
}

template <typename T>
std::map<int, T> int_map_from_json(const json& j) {
  std::map<int, T> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    out[std::stoi(it.key())] = it.value().get<T>();
  }
  return out;
}

template <typename T>
json int_map_to_json(const std::map<int, T>& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[std::to_string(k)] = v;
  return out;
}

}  // namespace

std::string witness_to_json_text(const Witness& w) {
  json steps = json::array();
  for (const WitnessStep& step : w.steps) {
    json js;
    if (const auto* p = std::get_if<ProjectStep>(&step)) {
      js["type"] = "project";
      js["lambdas"] = int_map_to_json(p->lambdas);
    } else if (const auto* r = std::get_if<ReduceStep>(&step)) {
      js["type"] = "reduce";
      js["site"] = r->site;
      json projs = json::array();
      for (const Matrix& m : r->projectors) projs.push_back(matrix_to_json(m));
      js["projectors"] = std::move(projs);
      js["exempt_term"] = r->exempt_term ? json(*r->exempt_term) : json(nullptr);
      js["chosen_block"] = r->chosen_block;
    } else if (const auto* rm = std::get_if<RemoveStep>(&step)) {
      js["type"] = "remove";
      js["site"] = rm->site;
      js["block_i"] = rm->block_i;
      js["block_j"] = rm->block_j;
    } else if (const auto* sp = std::get_if<SplitStep>(&step)) {
      js["type"] = "split";
      js["site"] = sp->site;
    } else if (const auto* lf = std::get_if<LeafStep>(&step)) {
      js["type"] = "leaf";
      json projs = json::array();
      for (const Matrix& m : lf->site_projectors) projs.push_back(matrix_to_json(m));
      js["site_projectors"] = std::move(projs);
      json units = json::array();
      for (const Matrix& m : lf->site_unitaries) units.push_back(matrix_to_json(m));
      js["site_unitaries"] = std::move(units);
      js["pauli_words"] = int_map_to_json(lf->pauli_words);
      js["eigenvalues"] = int_map_to_json(lf->eigenvalues);
    }
    steps.push_back(std::move(js));
  }
  json out{{"format", "clh-witness/v1"}, {"steps", std::move(steps)}};
  return out.dump(2) + "\n";
}

Witness witness_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ParseError, e.what());
  }
  if (j.value("format", "") != "clh-witness/v1") {
    fail(ErrorKind::ParseError, "missing or unknown witness format");
  }
  Witness out;
  try {
    for (const json& js : j.at("steps")) {
      std::string type = js.at("type").get<std::string>();
      if (type == "project") {
        ProjectStep p;
        p.lambdas = int_map_from_json<double>(js.at("lambdas"));
        out.steps.push_back(std::move(p));
      } else if (type == "reduce") {
        ReduceStep r;
        r.site = js.at("site").get<int>();
        for (const json& jm : js.at("projectors")) {
          r.projectors.push_back(matrix_from_json(jm));
        }
        if (!js.at("exempt_term").is_null()) {
          r.exempt_term = js.at("exempt_term").get<int>();
        }
        r.chosen_block = js.at("chosen_block").get<int>();
        out.steps.push_back(std::move(r));
      } else if (type == "remove") {
        RemoveStep r;
        r.site = js.at("site").get<int>();
        r.block_i = js.at("block_i").get<int>();
        r.block_j = js.at("block_j").get<int>();
        out.steps.push_back(r);
      } else if (type == "split") {
        SplitStep s;
        s.site = js.at("site").get<int>();
        out.steps.push_back(s);
      } else if (type == "leaf") {
        LeafStep lf;
        for (const json& jm : js.at("site_projectors")) {
          lf.site_projectors.push_back(matrix_from_json(jm));
        }
        for (const json& jm : js.at("site_unitaries")) {
          lf.site_unitaries.push_back(matrix_from_json(jm));
        }
        if (js.contains("pauli_words")) {
          lf.pauli_words = int_map_from_json<std::string>(js.at("pauli_words"));
        }
        lf.eigenvalues = int_map_from_json<int>(js.at("eigenvalues"));
        out.steps.push_back(std::move(lf));
      } else {
        fail(ErrorKind::ParseError, "unknown witness step type \"" + type + "\"");
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, e.what());
  }
  return out;
}

Witness load_witness(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return witness_from_json_text(text);
}

void save_witness(const Witness& w, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::ParseError, "cannot open " + path + " for writing");
  out << witness_to_json_text(w);
}

}  // namespace clh
