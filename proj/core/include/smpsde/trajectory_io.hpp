// Copyright 2026 The smpsde Authors.
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

// CSV writers for trajectories and coupled paths. Each file opens with
// "# key=value" metadata lines so a run can be traced back to its inputs.

#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "smpsde/coupling.hpp"
#include "smpsde/solver.hpp"

namespace smpsde {

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Shortest decimal form that reads back as the same double.
std::string format_double(double x);

void write_metadata(std::ostream& os, const Metadata& meta);

/// Header "n,T_n,state"; row 0 carries T_0 = -Y_0 and X_0.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const Metadata& meta = {});

/// Header "time,component,state1,state2" with component 1, 2 or both.
void write_coupled_csv(std::ostream& os, const CoupledPath& path, const Metadata& meta = {});

}  // namespace smpsde
