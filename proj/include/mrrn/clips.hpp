/* Copyright 2026 The MRRN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef MRRN_CLIPS_HPP_
#define MRRN_CLIPS_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace mrrn {

struct ClipProtocol {
  std::size_t clip_len = 30;
  std::size_t stride = 8;
  std::size_t max_clips = 20;

  void Validate() const;
};

struct ClipIndex {
  std::string video_id;
  std::vector<std::size_t> frames;  // exactly clip_len entries
};

// Clips start at 0, stride, 2*stride, ... while start + clip_len <= frames,
// keeping at most max_clips. A video shorter than clip_len yields one clip
// that loops back to frame 0.
std::vector<ClipIndex> SplitClips(std::size_t num_frames,
                                  const ClipProtocol& protocol = {},
                                  const std::string& video_id = "");

// Closed form of the number of clips SplitClips returns.
std::size_t ExpectedClipCount(std::size_t num_frames,
                              const ClipProtocol& protocol = {});

}  // namespace mrrn

#endif  // MRRN_CLIPS_HPP_
