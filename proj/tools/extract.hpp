#pragma once

#include <filesystem>
#include <string>

#include "bonefrag/diagnostics.hpp"
#include "bonefrag/feature_table.hpp"

namespace bonefrag::cli {

struct ExtractInputs {
  std::filesystem::path mesh_dir;  // holds <fragment_id>.ply
  std::filesystem::path annotations;
  std::filesystem::path break_meta;
  std::filesystem::path fragment_meta;
};

struct ExtractResult {
  FeatureTable breaks;
  FeatureTable fragments;
  std::string manifest;
};

ExtractResult extract_features(const ExtractInputs& inputs, Diagnostics& diagnostics);

}  // namespace bonefrag::cli
