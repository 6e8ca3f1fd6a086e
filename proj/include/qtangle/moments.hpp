// Copyright 2026 The qtangle Authors
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

#pragma once

#include <array>
#include <optional>

namespace qtangle {

/// Power sums p[k] = Tr((rho rho~)^(k+1)) for k = 0..3.
struct MomentSet {
    enum class Source { exact, sampled };

    std::array<double, 4> p{};
    Source source = Source::exact;
    std::optional<std::array<double, 4>> stderr_ = std::nullopt;
    /// Absolute rounding error of each p, when it exceeds that of storing p.
    std::optional<std::array<double, 4>> rounding = std::nullopt;

    double moment(int m) const {
        return p.at(static_cast<std::size_t>(m - 1));
    }
    double max_stderr() const {
        if (!stderr_) {
            return 0.0;
        }
        double s = 0;
        for (double e : *stderr_) {
            s = e > s ? e : s;
        }
        return s;
    }
};

}  // namespace qtangle
