#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "hypoco/models.hpp"

namespace hypoco::cli {

using nlohmann::json;

inline constexpr const char* kSchema = "hypoco.model/1";

// Input error carrying the JSON path of the offending field.
class SpecError : public InputError {
 public:
  SpecError(const std::string& path, const std::string& what)
      : InputError(path.empty() ? what : path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct LoadedModel {
  Model model;
  json spec;
  std::string hash;  // FNV-1a 64 of the canonical dump, hex
};

LoadedModel parse_model(const json& spec);
LoadedModel load_model_file(const std::string& path);

// Parse text as JSON, reporting the line and column of syntax errors.
json parse_json_text(const std::string& text, const std::string& source);
json read_json_file(const std::string& path);

std::string fnv1a_hex(const std::string& data);

// Dense complex matrix from rows of numbers or [re, im] pairs.
Matrix parse_matrix(const json& j, const std::string& path);
json matrix_to_json(const Matrix& m);

}  // namespace hypoco::cli
