#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "adelica/instances.hpp"

namespace adelica {

struct ParseError : std::runtime_error {
    int line;
    ParseError(int l, const std::string& what)
        : std::runtime_error("line " + std::to_string(l) + ": " + what), line(l) {}
};

struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// Line-oriented `key = value` text with JSON values, '#' comments, and a
// mandatory `format = 1` header.
std::map<std::string, nlohmann::json> parse_instance_text(const std::string& text);

enum class InstanceKind { NumberRing, Polynomial, Torus };

struct ParsedInstance {
    InstanceKind kind = InstanceKind::NumberRing;
    HasseInstance hasse;
    MonomialIdeal ideal;
    KoszulVariant koszul_variant = KoszulVariant::Local;
    TorusRank1Instance torus;
    std::optional<Window> window;
};

ParsedInstance load_instance(const std::string& text);

// Window syntax: "lo..hi" for every axis or comma-separated per-axis ranges.
Window parse_window_arg(const std::string& s, std::size_t nvars);

// exponent vector of "x", "x^2*y", ... over the named variables
Multidegree parse_monomial(const std::string& s, const std::vector<std::string>& vars);

nlohmann::json table_to_json(const CohomologyTable& t);
std::string table_to_csv(const CohomologyTable& t);
std::string table_to_pretty(const CohomologyTable& t);

nlohmann::json module_to_json(const Module& m);
nlohmann::json map_to_json(const Map& m);
nlohmann::json cube_to_json(const CubeDiagram& cube);

}  // namespace adelica
