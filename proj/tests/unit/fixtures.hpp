#pragma once

#include <fstream>

#include "json.hpp"

inline const nlohmann::json& fixtures() {
  static const nlohmann::json j = [] {
    std::ifstream in(EXPANDERLAB_FIXTURES);
    return nlohmann::json::parse(in);
  }();
  return j;
}
