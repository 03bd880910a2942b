#ifndef AHEM_SERIALIZE_HPP
#define AHEM_SERIALIZE_HPP

// .ahf field dumps: one line of JSON header (schema version, chart, grid
// sizes, field descriptors, payload CRC-32) followed by the payload of
// little-endian float64 values, field by field, component by component,
// each component in node order (ρ-major, θ-minor).

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ahem/grid.hpp"
#include "json.hpp"

namespace ahem {

inline constexpr int kAhfVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};
class ChecksumError : public FormatError {
 public:
  using FormatError::FormatError;
};

struct StateBundle {
  GridPtr grid;
  std::vector<Field> fields;
  nlohmann::json metadata;
};

std::string serialize_state(const GridPtr& grid, const std::vector<Field>& fields,
                            const nlohmann::json& metadata = nlohmann::json::object());
StateBundle deserialize_state(std::string_view bytes);

void write_state_file(const std::filesystem::path& path, const GridPtr& grid, const std::vector<Field>& fields,
                      const nlohmann::json& metadata = nlohmann::json::object());
StateBundle read_state_file(const std::filesystem::path& path);

}  // namespace ahem

#endif  // AHEM_SERIALIZE_HPP
