// Copyright 2026 The qtransport Authors
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

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtransport/model.hpp"
#include "qtransport/transport.hpp"

namespace qtransport::cli {

struct SolverConfig {
    std::optional<double> dt;     ///< defaults to 0.05 / max-rate
    std::optional<double> t_end;  ///< defaults to 4000 / max-rate
    double residual_tolerance = 1e-8;
    double cross_method_tolerance = 1e-9;
    std::size_t samples = 201;
};

struct SweepConfig {
    SweepParameter parameter = SweepParameter::alpha;
    std::vector<double> grid;
};

struct ModelConfig {
    double eps0 = 0.0, eps1 = 1.0, eps2 = 2.0;
    std::vector<Complex> chi;
    std::vector<Complex> psi;
    std::array<ReservoirSpec, 3> reservoirs{};
    SolverConfig solver;
    std::optional<SweepConfig> sweep;

    SystemSpec system() const;
    RateSet rates() const;
};

/// Parses and validates a configuration document. Errors are ConfigurationError
/// and name the offending field.
ModelConfig parse_config(const nlohmann::json& doc);
ModelConfig load_config(const std::filesystem::path& path);

/// Canonical form; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const ModelConfig& config);

}  // namespace qtransport::cli
