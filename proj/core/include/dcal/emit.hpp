// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

namespace dcal {

// Formats a double with 12 significant digits ("%.12g"); the fixed width
// keeps all emitted JSON/CSV byte-reproducible across runs.
std::string format_g12(double v);

// Minimal ordered JSON object writer for the CLI output paths (the library
// never needs to parse JSON; config parsing lives in the tools layer).
class JsonObject {
 public:
  JsonObject& number(const std::string& key, double v);
  JsonObject& integer(const std::string& key, long long v);
  JsonObject& text(const std::string& key, const std::string& v);
  JsonObject& boolean(const std::string& key, bool v);
  JsonObject& raw(const std::string& key, const std::string& json);
  std::string str() const;  // single-line {"k":v,...}

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

std::string json_escape(const std::string& s);

}  // namespace dcal
