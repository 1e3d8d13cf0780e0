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

#ifndef SENSORPLACE_TESTS_FIXTURES_H_
#define SENSORPLACE_TESTS_FIXTURES_H_

#include <filesystem>
#include <string>

#include "oracles.h"

namespace sensorplace::fixture {

// Two adjacent segments, two days, four observations.
inline std::filesystem::path minimal_bundle(const std::string& name) {
  const auto dir = oracle::scratch_dir(name);
  oracle::write_file(dir / "segments.csv",
                     "segment_id,midpoint_x,midpoint_y,endpoint_a,endpoint_b\n"
                     "1,50,0,1,2\n"
                     "2,100,50,2,3\n");
  oracle::write_file(dir / "static_features.csv",
                     "segment_id,lanes,street_type\n"
                     "1,2,primary\n"
                     "2,1,residential\n");
  oracle::write_file(dir / "observations.csv",
                     "segment_id,date,count\n"
                     "1,2023-05-01,120\n"
                     "1,2023-05-02,130\n"
                     "2,2023-05-01,40\n"
                     "2,2023-05-02,45\n");
  oracle::write_file(dir / "boundary.json", "[[0,-10],[110,-10],[110,110],[0,110]]");
  return dir;
}

}  // namespace sensorplace::fixture

#endif  // SENSORPLACE_TESTS_FIXTURES_H_
