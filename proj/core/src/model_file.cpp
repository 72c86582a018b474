#include "rpwy/model_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rpwy/errors.hpp"

namespace rpwy {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ValidationError("unknown key '" + key + "' in " + where);
  }
}

double number(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(std::string("'") + key + "' in " + where + " must be a number");
  return v.get<double>();
}

Site parse_site(const json& v, const std::string& where) {
  if (!v.is_string()) throw ValidationError("'site' in " + where + " must be a string");
  const auto s = v.get<std::string>();
  if (s == "donor" || s == "D") return Site::Donor;
  if (s == "acceptor" || s == "A") return Site::Acceptor;
  throw ValidationError("'site' in " + where + " must be \"donor\" or \"acceptor\", got \"" + s + "\"");
}

}  // namespace

RadicalPairModel parse_model(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ValidationError("model file must contain a JSON object");
  reject_unknown(root, {"nuclei", "J", "kappa_st", "k"}, "model");

  RadicalPairModel model;
  if (root.contains("nuclei")) {
    const json& list = root.at("nuclei");
    if (!list.is_array()) throw ValidationError("'nuclei' must be an array");
    for (std::size_t j = 0; j < list.size(); ++j) {
      const json& n = list[j];
      const std::string where = "nuclei[" + std::to_string(j) + "]";
      if (!n.is_object()) throw ValidationError(where + " must be an object");
      reject_unknown(n, {"a", "site", "spin"}, where);
      NuclearSpec spec;
      spec.coupling = number(n, "a", 0.0, where);
      if (n.contains("site")) spec.site = parse_site(n.at("site"), where);
      spec.spin = number(n, "spin", 0.5, where);
      model.nuclei.push_back(spec);
    }
  }
  model.exchange = number(root, "J", 0.0, "model");
  model.kappa_st = number(root, "kappa_st", 0.0, "model");
  model.rate_k = number(root, "k", 1.0, "model");
  validate(model);
  return model;
}

RadicalPairModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::string format_model(const RadicalPairModel& model) {
  json root;
  root["nuclei"] = json::array();
  for (const auto& n : model.nuclei) {
    root["nuclei"].push_back({{"a", n.coupling}, {"site", n.site == Site::Donor ? "donor" : "acceptor"}});
  }
  root["J"] = model.exchange;
  root["kappa_st"] = model.kappa_st;
  root["k"] = model.rate_k;
  return root.dump(2);
}

}  // namespace rpwy
