#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "lorentz/geometry.hpp"

namespace lorentz {

/// Parses `{"disks": [{"center": [x, y], "radius": r}, ...]}`. Non-finite or
/// missing numbers raise ConfigError; geometry violations propagate.
BilliardTable table_from_json(const nlohmann::json& doc);
BilliardTable read_table(const std::filesystem::path& path);
nlohmann::json table_to_json(const BilliardTable& table);

}  // namespace lorentz
