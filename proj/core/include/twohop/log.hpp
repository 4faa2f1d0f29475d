// Copyright 2026 The twohop Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TWOHOP_LOG_HPP_
#define TWOHOP_LOG_HPP_

#include <functional>
#include <string>
#include <string_view>

namespace twohop {

using WarningSink = std::function<void(std::string_view)>;

// Emits a warning through the installed sink (stderr by default).
void warn(std::string_view message);

// Installs a new sink and returns the previous one. Passing an empty
// function restores the stderr sink.
WarningSink set_warning_sink(WarningSink sink);

// Routes warnings into a caller-owned buffer for the lifetime of the object.
class ScopedWarningCapture {
 public:
  ScopedWarningCapture();
  ~ScopedWarningCapture();
  ScopedWarningCapture(const ScopedWarningCapture&) = delete;
  ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

  const std::string& text() const { return text_; }
  int count() const { return count_; }

 private:
  WarningSink previous_;
  std::string text_;
  int count_ = 0;
};

}  // namespace twohop

#endif  // TWOHOP_LOG_HPP_
