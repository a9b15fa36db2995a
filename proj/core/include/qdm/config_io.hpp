#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qdm/geometry.hpp"

namespace qdm {

struct GeometryConfig {
  std::string name;
  std::string kind;  // "space" or "blowup"
  long field_order = 1;
  std::shared_ptr<CohomologyModel> space;    // kind == "space"
  std::shared_ptr<BlowupGeometry> blowup;    // kind == "blowup"

  const CohomologyModel& gw_model() const {
    return kind == "space" ? *space : blowup->total;
  }
};

// Parses and fully validates a geometry description; throws ConfigError with
// the violated invariant named.
GeometryConfig load_geometry_json(const std::string& json_text);
GeometryConfig load_geometry_file(const std::string& path);

// Resolves a bundled config name or a filesystem path. Bundled configs live
// in the data directory: the QDM_DATA_DIR environment variable wins, then the
// build-tree default, then the install prefix.
std::string resolve_geometry_path(const std::string& name_or_path);
GeometryConfig load_geometry(const std::string& name_or_path);
std::vector<std::string> bundled_geometry_names();

}  // namespace qdm
