#pragma once

#include <filesystem>
#include <string>

#include "outbreak/classifiers.hpp"
#include "outbreak/imputation.hpp"
#include "outbreak/scaling.hpp"

// Versioned JSON serialization for fitted state, so each pipeline stage
// can run standalone on disk artifacts. Documents carry a "format" tag and
// a "version" number; loading rejects anything it does not recognize.

namespace outbreak {

std::string imputer_to_json(const ImputerModel& model);
ImputerModel imputer_from_json(const std::string& text);

std::string scaler_to_json(const ScalerParams& params);
ScalerParams scaler_from_json(const std::string& text);

std::string classifier_to_json(const ClassifierModel& model);
ClassifierModel classifier_from_json(const std::string& text);

void save_text(const std::string& text, const std::filesystem::path& path);
std::string load_text(const std::filesystem::path& path);

}  // namespace outbreak
