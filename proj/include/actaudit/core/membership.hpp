//
// Copyright 2026 The ActAudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef ACTAUDIT_CORE_MEMBERSHIP_HPP
#define ACTAUDIT_CORE_MEMBERSHIP_HPP

#include <vector>

namespace actaudit {

// A trajectory is a member when the fraction of member samples reaches rho.
// rho in (0, 1]; with rho = 1 every sample must be a member.
bool label_trajectory(const std::vector<bool>& member_flags, double rho);

// Threshold decision: member iff score >= gamma. Score must be finite.
bool decide(double score, double gamma);

}  // namespace actaudit

#endif  // ACTAUDIT_CORE_MEMBERSHIP_HPP
