// Copyright 2026 The dgparse Authors.
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

#ifndef DGPARSE_LOGGING_H_
#define DGPARSE_LOGGING_H_

#include <cstdlib>
#include <iostream>
#include <string>

namespace dgparse {

// DGPARSE_LOG_LEVEL: 0 = errors only, 1 = warnings, 2 = info (default), 3 = debug.
inline int log_level() {
  static const int level = [] {
    const char* env = std::getenv("DGPARSE_LOG_LEVEL");
    return env ? std::atoi(env) : 2;
  }();
  return level;
}

inline void log_warning(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[warn] " << msg << "\n";
}

inline void log_info(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[info] " << msg << "\n";
}

inline void log_debug(const std::string& msg) {
  if (log_level() >= 3) std::cerr << "[debug] " << msg << "\n";
}

}  // namespace dgparse

#endif  // DGPARSE_LOGGING_H_
