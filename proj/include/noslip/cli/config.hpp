#pragma once

#include "noslip/dynamics.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace noslip::cli {

/// Config problem tied to a dotted field path. line and column are 1-based;
/// 0 means the value came from an override or is missing from the file.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message, int line = 0, int column = 0);

    const std::string& field() const { return field_; }
    int line() const { return line_; }
    int column() const { return column_; }

private:
    std::string field_;
    int line_;
    int column_;
};

/// An explicit starting state in boundary coordinates.
struct InitialState {
    std::size_t piece = 0;
    double s = 0.0;
    double u1 = 0.0;
    double u2 = 0.0;
};

struct RunConfig {
    YAML::Node root;  // kept for subcommand sections
    std::filesystem::path base_dir;  // relative paths resolve against the config file

    std::string table_type;
    std::optional<Table> table;
    double length_scale = 1.0;

    MassParams mass;
    bool specular = false;
    CollisionModel model() const;

    std::uint64_t seed = 0;
    std::size_t collisions = 0;

    std::vector<InitialState> states;
    std::size_t random_count = 0;
    std::optional<std::filesystem::path> from_csv;

    std::filesystem::path output_dir;

    /// Concrete starting states: explicit ones, then the CSV continuation, then
    /// random draws from seed.
    std::vector<State> initial_states() const;
};

/// Applies "a.b.c=value" to the tree. The value is parsed as a YAML scalar.
void apply_override(YAML::Node& root, const std::string& assignment);

RunConfig parse_config(const YAML::Node& root, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides = {});

/// Section reader with typed getters that report the field path and file
/// position on failure. Unknown keys are rejected by finish().
class Section {
public:
    Section(YAML::Node node, std::string path);

    bool has(const std::string& key) const;
    YAML::Node node(const std::string& key) const;
    double number(const std::string& key) const;
    double number(const std::string& key, double fallback) const;
    long integer(const std::string& key) const;
    long integer(const std::string& key, long fallback) const;
    std::string text(const std::string& key) const;
    std::string text(const std::string& key, const std::string& fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    std::vector<double> numbers(const std::string& key) const;
    Section child(const std::string& key) const;

    /// Throws unless every key present was read or listed in extra.
    void finish(std::initializer_list<const char*> extra = {}) const;

    [[noreturn]] void fail(const std::string& key, const std::string& message) const;
    std::string path_of(const std::string& key) const;
    const YAML::Node& raw() const { return node_; }

private:
    YAML::Node require(const std::string& key) const;

    YAML::Node node_;
    std::string path_;
    mutable std::vector<std::string> seen_;
};

/// Worker count from NOSLIP_WORKERS, default 1.
std::size_t workers_from_env();

}  // namespace noslip::cli
