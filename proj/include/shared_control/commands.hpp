/*
 * Copyright 2026 The shared_control Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command line: train, eval, replay, serve.
//
// Exit codes: 0 success, 1 runtime failure (unreadable checkpoint, malformed
// log, numeric failure, port in use), 2 usage error.

#ifndef SHARED_CONTROL_COMMANDS_HPP_
#define SHARED_CONTROL_COMMANDS_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace shared_control {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shared_control

#endif  // SHARED_CONTROL_COMMANDS_HPP_
