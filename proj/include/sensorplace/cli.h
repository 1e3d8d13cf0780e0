// Copyright 2026 The sensorplace Authors.
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

#ifndef SENSORPLACE_CLI_H_
#define SENSORPLACE_CLI_H_

namespace sensorplace {

// Exit codes: 0 success, 1 data or validation error, 2 configuration error
// (including unknown flags and missing seeds).
int run_cli(int argc, char** argv);

}  // namespace sensorplace

#endif  // SENSORPLACE_CLI_H_
