// Copyright 2026 The Shopsense Authors. All Rights Reserved.
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

#include "shopsense/roles.hpp"

#include <algorithm>
#include <string>

namespace shopsense {

Role classify_role(const Track& track, const RoiConfig& roi) {
  if (track.detections.empty()) throw InvalidValue("classify_role on an empty track");
  return track.detections.front().bbox.y2() < roi.y_line ? Role::Employee : Role::Customer;
}

std::vector<Track> assign_roles(std::span<const Track> tracks, const RoiConfig& roi) {
  std::vector<Track> out(tracks.begin(), tracks.end());
  for (Track& t : out) t.role = classify_role(t, roi);
  return out;
}

std::vector<Track> consolidate_employees(std::span<const Track> tracks, const RoiConfig& roi,
                                         Diagnostics* diagnostics, std::size_t* dropped) {
  if (roi.employee_capacity > 1) {
    throw CapacityExceeded("employee_capacity " + std::to_string(roi.employee_capacity) +
                           " requested; only a single employee is supported");
  }
  if (dropped) *dropped = 0;
  std::vector<Track> out;
  std::vector<const Track*> staff;
  for (const Track& t : tracks) {
    if (t.role == Role::Employee) {
      staff.push_back(&t);
    } else {
      out.push_back(t);
    }
  }
  if (staff.empty()) {
    note(diagnostics, "no-employee", "no track starts in the staff area");
    return out;
  }
  std::stable_sort(staff.begin(), staff.end(), [](const Track* a, const Track* b) {
    if (a->first_frame() != b->first_frame()) return a->first_frame() < b->first_frame();
    return a->track_id < b->track_id;
  });
  Track employee = *staff.front();
  for (std::size_t i = 1; i < staff.size(); ++i) {
    const std::size_t lost = absorb(employee, *staff[i]);
    if (dropped) *dropped += lost;
  }
  if (staff.size() > 1) {
    note(diagnostics, "employee-consolidated",
         std::to_string(staff.size()) + " staff-area tracks merged into track " +
             std::to_string(employee.track_id));
  }
  out.push_back(std::move(employee));
  std::sort(out.begin(), out.end(),
            [](const Track& a, const Track& b) { return a.track_id < b.track_id; });
  return out;
}

const Track* find_employee(std::span<const Track> tracks) {
  const Track* found = nullptr;
  for (const Track& t : tracks) {
    if (t.role != Role::Employee) continue;
    if (found) throw AmbiguousEmployee("more than one employee track");
    found = &t;
  }
  return found;
}

}  // namespace shopsense
