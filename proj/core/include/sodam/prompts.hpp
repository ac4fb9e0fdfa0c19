#pragma once

#include <string_view>

namespace sodam::prompts {

/// Annotation prompt for coarse boundary segmentation of a clip.
std::string_view stage1();

/// Annotation prompt for multi-dimensional structured captions, given Stage-1
/// segmentations as scaffolding.
std::string_view stage2();

/// The checklist judge prompt template with unfilled placeholders (the judge
/// module renders the concrete per-pair instantiation).
std::string_view judge_template();

}  // namespace sodam::prompts
