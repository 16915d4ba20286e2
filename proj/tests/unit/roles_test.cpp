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


#include <gtest/gtest.h>

#include "shopsense/roles.hpp"
#include "test_util.hpp"

namespace shopsense {
namespace {

using testing::foot;
using testing::still;
using testing::track;

TEST(ClassifyRole, RoiRule) {
  const RoiConfig roi{240, 1};
  EXPECT_EQ(classify_role(track(1, Role::Unknown, {foot(0, 100, 150)}), roi), Role::Employee);
  EXPECT_EQ(classify_role(track(1, Role::Unknown, {foot(0, 100, 300)}), roi), Role::Customer);
  EXPECT_EQ(classify_role(track(1, Role::Unknown, {foot(0, 100, 240)}), roi), Role::Customer);
  EXPECT_THROW(classify_role(Track{}, roi), InvalidValue);
}

TEST(ClassifyRole, OnlyFirstDetectionCounts) {
  const RoiConfig roi{240, 1};
  const Track t = track(1, Role::Unknown, {foot(0, 100, 150), foot(1, 100, 400)});
  EXPECT_EQ(classify_role(t, roi), Role::Employee);
}

TEST(AssignRoles, LeavesInputUntouched) {
  const std::vector<Track> in = {still(1, Role::Unknown, 0, 2, 100, 150),
                                 still(2, Role::Unknown, 0, 2, 100, 400)};
  const auto out = assign_roles(in, RoiConfig{});
  EXPECT_EQ(in[0].role, Role::Unknown);
  EXPECT_EQ(out[0].role, Role::Employee);
  EXPECT_EQ(out[1].role, Role::Customer);
}

TEST(Consolidate, FragmentsBecomeOneEmployee) {
  const std::vector<Track> in = {still(4, Role::Employee, 50, 80, 300, 200),
                                 still(2, Role::Employee, 0, 20, 300, 200),
                                 still(7, Role::Employee, 100, 140, 300, 200),
                                 still(3, Role::Customer, 0, 140, 300, 400)};
  Diagnostics diags;
  const auto out = consolidate_employees(in, RoiConfig{}, &diags);
  ASSERT_EQ(out.size(), 2u);
  const Track* e = find_employee(out);
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->track_id, 2);
  EXPECT_EQ(e->first_frame(), 0);
  EXPECT_EQ(e->last_frame(), 140);
  EXPECT_EQ(e->detections.size(), 21u + 31u + 41u);
  EXPECT_EQ(e->merged_from, (std::set<int>{4, 7}));
  EXPECT_EQ(out[0].track_id, 2);
  EXPECT_EQ(out[1], in[3]);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, "employee-consolidated");
}

TEST(Consolidate, NoEmployeeWarns) {
  const std::vector<Track> in = {still(1, Role::Customer, 0, 5, 100, 400)};
  Diagnostics diags;
  EXPECT_EQ(consolidate_employees(in, RoiConfig{}, &diags), in);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, "no-employee");
  EXPECT_EQ(find_employee(in), nullptr);
}

TEST(Consolidate, SameFrameConflictsCounted) {
  const std::vector<Track> in = {still(1, Role::Employee, 0, 10, 300, 200),
                                 still(2, Role::Employee, 8, 20, 310, 200)};
  std::size_t dropped = 0;
  const auto out = consolidate_employees(in, RoiConfig{}, nullptr, &dropped);
  EXPECT_EQ(dropped, 3u);
  EXPECT_EQ(out[0].detections.size(), 21u);
}

TEST(Consolidate, CapacityAboveOneUnsupported) {
  EXPECT_THROW(consolidate_employees({}, RoiConfig{240, 2}), CapacityExceeded);
}

TEST(FindEmployee, Ambiguous) {
  const std::vector<Track> in = {still(1, Role::Employee, 0, 2, 1, 1),
                                 still(2, Role::Employee, 5, 7, 1, 1)};
  EXPECT_THROW(find_employee(in), AmbiguousEmployee);
}

}  // namespace
}  // namespace shopsense
