#include "sodam/prompts.hpp"

#include "sodam/judge.hpp"

namespace sodam::prompts {

namespace {

constexpr std::string_view kStage1 = R"(You are given a video clip of around 3 minutes. Your task is to generate dense captions for the video. The goal is to segment the video into multiple meaningful intervals and provide detailed descriptions for each segment.

1. Segmentation Logic:
- Split the video into natural segments according to scene changes, shot transitions, events, character actions, or core content shifts.
- Each minute usually contains 4-5 segments, but prioritize the video's logic over strict numbers.

2. Caption Requirements:
- For each segment, provide a time range in the format: start_time(0:00) - end_time(0:05): caption
- The caption should be concise but descriptive, summarizing what happens in that segment.
- Include characters, actions, objects, emotions, and scene details where relevant.
- Avoid redundancy, but ensure that important visual and narrative information is captured.

3. Output Format:
- A clean list of captions, each starting with the time range followed by the description.
- Timestamp format: minutes:seconds (e.g., 0:00 - 0:11).
- Segment boundaries should be clear and non-overlapping - the end time of one segment and start time of the next should be at least 1 second apart.
- Example: if one segment ends at 0:11, the next one should begin at 0:12 or later.

Output Example:
**0:00 - 0:07**
A man walks into the dimly lit room and looks around cautiously.

**0:08 - 0:15**
He notices a woman sitting by the window, staring outside in silence.

**0:16 - 0:25**
The camera cuts to a close-up of his nervous expression.
)";

constexpr std::string_view kStage2 = R"(You are given:
- A video (with both visual and audio content).
- A set of ground-truth captions (GT captions) with timestamps.

Your task is to use the GT captions as rough references for segmentation, but generate richer and more detailed descriptions directly from the video itself.

1. Segmentation:
- Follow the timestamps provided in the GT captions. Each GT caption defines the rough boundaries of a segment.
- Timestamp format: minutes:seconds (e.g., 0:00 - 0:11).
- Segment boundaries should be clear and non-overlapping - at least 1 second apart between consecutive segments.

2. Generation Logic:
Do not simply extract or paraphrase the GT caption. Use the video itself to expand with details:
- Characters: actions, gestures, facial expressions, emotions.
- Objects & Setting: relevant items, props, environment.
- Camera: framing, movement, zoom, transitions.
- Storyline: how the segment advances or changes the plot.
- Speech: actual dialogue attributed to speakers.
- Acoustics: speech tone, background music, sound effects.
- Shooting Style: special techniques (montage, flashback, dissolve, long take, etc.).

3. Output Format (JSON Schema):
{
  "timestamp": "start_time - end_time",
  "segment_detail_caption": "Detailed description of what happens (gestures, expressions, setting details, etc.).",
  "camera_state": "Camera angle, framing, zoom, and movement.",
  "video_background": "Setting, environment, or background elements.",
  "storyline": "How this segment fits into the larger narrative.",
  "shooting_style": "Long take, montage, flashback, intercut, or special transition effects.",
  "speech_content": "Full character dialogues with speaker attribution.",
  "acoustics_content": "1) Tone of speech. 2) Background sounds or music."
}
)";

// The judge template is the rendered prompt with its lists left unfilled; the
// concrete per-pair instantiation comes from render_judge_prompt.
const std::string kJudgeTemplate = [] {
    JudgeRequest placeholder;
    for (Dimension d : kDimensions) {
        placeholder.caption[d] = "<model_caption:" + std::string(wire_key(d)) + ">";
        placeholder.keypoints.by_dim[d] = {"<keypoint_1>", "<keypoint_2>"};
    }
    return render_judge_prompt(placeholder);
}();

}  // namespace

std::string_view stage1() { return kStage1; }
std::string_view stage2() { return kStage2; }
std::string_view judge_template() { return kJudgeTemplate; }

}  // namespace sodam::prompts
