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

#include "smpsde/trajectory_io.hpp"

#include <charconv>

namespace smpsde {

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_metadata(std::ostream& os, const Metadata& meta) {
  for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const Metadata& meta) {
  write_metadata(os, meta);
  os << "n,T_n,state\n";
  os << traj.initial.count << ',' << format_double(0.0 - traj.initial.age) << ','
     << traj.initial.state << '\n';
  Count n = traj.initial.count;
  for (const auto& j : traj.jumps) {
    os << ++n << ',' << format_double(j.time) << ',' << j.state << '\n';
  }
}

void write_coupled_csv(std::ostream& os, const CoupledPath& path, const Metadata& meta) {
  write_metadata(os, meta);
  os << "time,component,state1,state2\n";
  os << "0,init," << path.first.initial.state << ',' << path.second.initial.state << '\n';
  for (const auto& e : path.events) {
    os << format_double(e.time) << ',' << to_string(e.mover) << ',' << e.state1 << ','
       << e.state2 << '\n';
  }
}

}  // namespace smpsde
