#pragma once

#include <string>

namespace cldforge::detail {

extern const std::string kBaselineInstruction;
extern const std::string kGuidedInstruction;
extern const std::string kTwoStageVariablesInstruction;
extern const std::string kTwoStageLinksInstruction;

} // namespace cldforge::detail
