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

#include "mrrn/clips.hpp"

#include <algorithm>

#include "mrrn/error.hpp"

namespace mrrn {

void ClipProtocol::Validate() const {
  if (clip_len == 0 || stride == 0 || max_clips == 0) {
    throw ValidationError("clip protocol: clip_len, stride and max_clips must "
                          "be >= 1");
  }
}

std::vector<ClipIndex> SplitClips(std::size_t num_frames,
                                  const ClipProtocol& protocol,
                                  const std::string& video_id) {
  protocol.Validate();
  if (num_frames == 0) {
    throw ValidationError("split_clips: video '" + video_id + "' has 0 frames");
  }
  std::vector<ClipIndex> clips;
  if (num_frames < protocol.clip_len) {
    ClipIndex looped{video_id, {}};
    for (std::size_t i = 0; i < protocol.clip_len; ++i) {
      looped.frames.push_back(i % num_frames);
    }
    clips.push_back(std::move(looped));
    return clips;
  }
  for (std::size_t start = 0;
       start + protocol.clip_len <= num_frames &&
       clips.size() < protocol.max_clips;
       start += protocol.stride) {
    ClipIndex clip{video_id, {}};
    for (std::size_t i = 0; i < protocol.clip_len; ++i) {
      clip.frames.push_back(start + i);
    }
    clips.push_back(std::move(clip));
  }
  return clips;
}

std::size_t ExpectedClipCount(std::size_t num_frames,
                              const ClipProtocol& protocol) {
  if (num_frames < protocol.clip_len) return 1;
  const std::size_t candidates =
      (num_frames - protocol.clip_len) / protocol.stride + 1;
  return std::min(protocol.max_clips, std::max<std::size_t>(1, candidates));
}

}  // namespace mrrn
