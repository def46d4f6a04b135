#include "lorentz/table_io.hpp"

#include <cmath>
#include <fstream>

#include "lorentz/error.hpp"

namespace lorentz {

namespace {

double finite_number(const nlohmann::json& v, const char* what) {
  if (!v.is_number()) throw ConfigError(std::string("expected a number for ") + what);
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(std::string("non-finite value for ") + what);
  return x;
}

}  // namespace

BilliardTable table_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("disks") || !doc["disks"].is_array()) {
    throw ConfigError("table spec needs a 'disks' array");
  }
  std::vector<Disk> disks;
  for (const auto& d : doc["disks"]) {
    if (!d.is_object() || !d.contains("center") || !d.contains("radius")) {
      throw ConfigError("each disk needs 'center' and 'radius'");
    }
    const auto& c = d["center"];
    if (!c.is_array() || c.size() != 2) throw ConfigError("disk center must be [x, y]");
    disks.push_back(Disk{{finite_number(c[0], "center.x"), finite_number(c[1], "center.y")},
                         finite_number(d["radius"], "radius")});
  }
  return BilliardTable(std::move(disks));
}

BilliardTable read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open table file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed table file " + path.string() + ": " + e.what());
  }
  return table_from_json(doc);
}

nlohmann::json table_to_json(const BilliardTable& table) {
  nlohmann::json disks = nlohmann::json::array();
  for (const auto& d : table.disks()) {
    disks.push_back({{"center", {d.center.x, d.center.y}}, {"radius", d.radius}});
  }
  return {{"disks", disks}};
}

}  // namespace lorentz
