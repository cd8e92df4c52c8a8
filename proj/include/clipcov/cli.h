// Copyright 2026 The Authors.
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

#ifndef CLIPCOV_CLI_H_
#define CLIPCOV_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace clipcov {

inline constexpr char kVersion[] = "1.0.0";

// Entry point of the `clipcov` tool. Subcommands: synth, partition, select,
// baseline, diagnose, eval. Returns 0 on success, 2 on input or usage
// errors, 1 on internal errors. Phase logs go to `log`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& log);

}  // namespace clipcov

#endif  // CLIPCOV_CLI_H_
