#include "elicit/instance_io.hpp"

#include <fstream>

#include "elicit/errors.hpp"

namespace elicit {

namespace {

template <typename Scalar>
nlohmann::json to_json_impl(const TabularInstance<Scalar>& inst) {
  nlohmann::json j;
  j["points"] = nlohmann::json::array();
  for (const auto& p : inst.points()) {
    nlohmann::json pt{{"id", p.id}};
    pt["coord"] = p.coord ? nlohmann::json(*p.coord) : nlohmann::json(nullptr);
    j["points"].push_back(pt);
  }
  j["weights"] = nlohmann::json::array();
  j["utility"] = nlohmann::json::array();
  for (Index i = 0; i < inst.size(); ++i) {
    j["weights"].push_back(to_double(inst.weights()(i)));
    j["utility"].push_back({to_double(inst.utility()(i, 0)), to_double(inst.utility()(i, 1))});
  }
  return j;
}

}  // namespace

nlohmann::json instance_to_json(const TabularInstance<double>& inst) { return to_json_impl(inst); }

nlohmann::json instance_to_json(const TabularInstance<Rational>& inst) { return to_json_impl(inst); }

TabularInstance<double> instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("instance must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "points" && key != "weights" && key != "utility") {
      throw ConfigError("unknown instance key '" + key + "'");
    }
  }
  for (const char* key : {"points", "weights", "utility"}) {
    if (!j.contains(key) || !j.at(key).is_array()) {
      throw ConfigError(std::string("instance needs an array '") + key + "'");
    }
  }
  try {
    std::vector<Point> points;
    for (const auto& p : j.at("points")) {
      Point pt;
      pt.id = p.at("id").get<std::string>();
      if (p.contains("coord") && !p.at("coord").is_null()) pt.coord = p.at("coord").get<double>();
      points.push_back(std::move(pt));
    }
    const auto& w = j.at("weights");
    const auto& u = j.at("utility");
    Vector<double> weights(static_cast<Index>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) weights(static_cast<Index>(i)) = w[i].get<double>();
    UtilityTable<double> util(static_cast<Index>(u.size()), 2);
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (!u[i].is_array() || u[i].size() != 2) throw ConfigError("utility rows must be [u0, u1]");
      util(static_cast<Index>(i), 0) = u[i][0].get<double>();
      util(static_cast<Index>(i), 1) = u[i][1].get<double>();
    }
    return build_instance<double>(std::move(points), std::move(weights), std::move(util));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed instance: ") + e.what());
  }
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
}

TabularInstance<double> load_instance(const std::string& path) {
  return instance_from_json(read_json_file(path));
}

void save_instance(const std::string& path, const TabularInstance<double>& inst) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << instance_to_json(inst).dump(2) << "\n";
}

}  // namespace elicit
