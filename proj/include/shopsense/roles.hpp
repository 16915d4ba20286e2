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

// Staff/customer split by the ROI line, and folding of fragmented staff
// tracks into a single employee identity.

#pragma once

#include <span>
#include <vector>

#include "shopsense/error.hpp"
#include "shopsense/model.hpp"

namespace shopsense {

// Employee iff the first detection's bottom edge lies strictly above the
// line (y2 < y_line); a box resting on the line is a customer.
Role classify_role(const Track& track, const RoiConfig& roi);

std::vector<Track> assign_roles(std::span<const Track> tracks, const RoiConfig& roi);

// Merges every Employee track into the earliest one. Customer tracks pass
// through untouched. Throws CapacityExceeded for employee_capacity > 1.
// `dropped` receives the number of detections lost to frame conflicts.
std::vector<Track> consolidate_employees(std::span<const Track> tracks, const RoiConfig& roi,
                                         Diagnostics* diagnostics = nullptr,
                                         std::size_t* dropped = nullptr);

// Employee track, or nullptr. Throws AmbiguousEmployee if there are several.
const Track* find_employee(std::span<const Track> tracks);

}  // namespace shopsense
