// include/olsad/frame-window.h

// Copyright 2026  The olsad Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef OLSAD_FRAME_WINDOW_H_
#define OLSAD_FRAME_WINDOW_H_

#include <deque>
#include <stdexcept>

#include "olsad/common.h"

namespace olsad {

/// Bounded buffer over a streamed frame sequence for stages that need
/// `left` frames of history and `right` frames of lookahead. Reads outside
/// the sequence replicate the first/last frame, so once the input is
/// finished every frame can be produced; before that a frame is produced
/// only when its full right context has arrived.
class FrameWindow {
 public:
  FrameWindow(int left, int right) : left_(left), right_(right) {
    if (left < 0 || right < 0)
      throw std::invalid_argument("FrameWindow: negative context");
  }

  void Push(Vector frame) {
    if (finished_) throw std::logic_error("FrameWindow: push after finish");
    frames_.push_back(std::move(frame));
    ++received_;
  }

  void Finish() { finished_ = true; }

  /// True when frame `next()` can be computed.
  bool Ready() const {
    if (next_ >= received_) return false;
    return finished_ || next_ + right_ < received_;
  }

  int64_t next() const { return next_; }
  int64_t received() const { return received_; }

  /// Frame at absolute index t, clamped to the frames received so far.
  const Vector &At(int64_t t) const {
    const int64_t c = ClampIndex(t, received_);
    if (c < base_) throw std::logic_error("FrameWindow: frame already dropped");
    return frames_[static_cast<size_t>(c - base_)];
  }

  int64_t Clamp(int64_t t) const { return ClampIndex(t, received_); }

  void Advance() {
    ++next_;
    while (base_ < next_ - left_ && !frames_.empty()) {
      frames_.pop_front();
      ++base_;
    }
  }

  size_t buffered() const { return frames_.size(); }

 private:
  int left_;
  int right_;
  bool finished_ = false;
  int64_t received_ = 0;
  int64_t next_ = 0;
  int64_t base_ = 0;
  std::deque<Vector> frames_;
};

}  // namespace olsad

#endif  // OLSAD_FRAME_WINDOW_H_
