#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "rsplan/model.hpp"

namespace rsplan {

/// Malformed instance document. `path` is a JSON pointer to the offending field.
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

    [[nodiscard]] const std::string& path() const { return path_; }

private:
    std::string path_;
};

inline constexpr int kInstanceSchemaVersion = 1;

/// Parses a schema-1 instance document:
///
///   { "schema": 1, "n": 1, "radius": 1.0,
///     "a1": 1.0, "a2": 2.0, "alpha1": 0.05, "alpha2": 0.10,
///     "sigma1": 0.4, "sigma2": 0.6,
///     "f1": {"kind": "radial_quadratic", "m": 1.0},
///     "f2": {"kind": "quadratic_diagonal", "c": [2.0], "bound": 2.0},
///     "y0": [0.0], "eps0": 1 }
///
/// Cost kinds: radial_quadratic {m}, quadratic_diagonal {c}, tabulated_radial
/// {radii, values, bound}. "bound" is optional for the quadratic kinds and
/// defaults to the tight constant. Only structure is checked here; the model
/// assumptions are checked by validate().
ProblemInstance instance_from_json(const nlohmann::json& doc);

nlohmann::json instance_to_json(const ProblemInstance& instance);
nlohmann::json cost_to_json(const CostFunction& f);

/// Reads and parses a file; I/O and JSON syntax problems surface as SchemaError
/// with path "/".
ProblemInstance load_instance(const std::filesystem::path& file);

}  // namespace rsplan
