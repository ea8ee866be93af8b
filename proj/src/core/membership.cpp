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

#include "actaudit/core/membership.hpp"

#include <cmath>
#include <cstddef>

#include "actaudit/core/errors.hpp"

namespace actaudit {

bool label_trajectory(const std::vector<bool>& member_flags, double rho) {
  if (member_flags.empty()) {
    raise(ErrorKind::kEmptyTrajectory,
          "cannot label an empty trajectory");
  }
  if (!(rho > 0.0 && rho <= 1.0)) {
    raise(ErrorKind::kUsage, "rho must lie in (0, 1]");
  }
  size_t members = 0;
  for (bool f : member_flags) members += f ? 1 : 0;
  const double fraction =
      static_cast<double>(members) / static_cast<double>(member_flags.size());
  return fraction >= rho;
}

bool decide(double score, double gamma) {
  if (!std::isfinite(score)) {
    raise(ErrorKind::kNonFiniteScore, "decision score is not finite");
  }
  return score >= gamma;
}

}  // namespace actaudit
