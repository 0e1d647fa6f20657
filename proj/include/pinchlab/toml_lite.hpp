#ifndef PINCHLAB_TOML_LITE_HPP
#define PINCHLAB_TOML_LITE_HPP

#include <nlohmann/json_fwd.hpp>
#include <string>

namespace pinchlab {

// Minimal TOML-subset reader producing the same DOM the JSON path uses.
// Supported: comments, [tables], [[arrays of tables]], bare and quoted keys,
// string/integer/float/boolean values, arrays of scalars, inline tables.
// Unsupported TOML (dates, multiline strings, dotted keys) raises SchemaError.
nlohmann::json parse_toml_lite(const std::string& text);

} // namespace pinchlab

#endif
