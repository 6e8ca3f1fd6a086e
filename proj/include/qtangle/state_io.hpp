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

// JSON state files:
//   {"dims": [2,2], "kind": "mixed", "matrix": [[[re,im], ...], ...]}
//   {"dims": [2,2,2], "kind": "pure", "amplitudes": [[re,im], ...]}

#pragma once

#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "qtangle/states.hpp"

namespace qtangle {

namespace detail {

inline cplx parse_complex(const nlohmann::json &j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw InvalidInput("state file: complex entries must be [re, im] number pairs");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

inline nlohmann::json complex_json(cplx z) {
    return nlohmann::json::array({z.real(), z.imag()});
}

}  // namespace detail

inline State state_from_json(const nlohmann::json &j) {
    if (!j.is_object() || !j.contains("dims") || !j.contains("kind")) {
        throw InvalidInput("state file: expected an object with 'dims' and 'kind'");
    }
    Dims dims;
    for (const auto &d : j.at("dims")) {
        if (!d.is_number_unsigned()) {
            throw InvalidInput("state file: dims must be positive integers");
        }
        dims.push_back(d.get<std::size_t>());
    }
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "pure") {
        if (!j.contains("amplitudes") || !j.at("amplitudes").is_array()) {
            throw InvalidInput("state file: pure state needs an 'amplitudes' array");
        }
        std::vector<cplx> amps;
        for (const auto &z : j.at("amplitudes")) {
            amps.push_back(detail::parse_complex(z));
        }
        return PureState::validate(std::move(amps), std::move(dims));
    }
    if (kind == "mixed") {
        if (!j.contains("matrix") || !j.at("matrix").is_array()) {
            throw InvalidInput("state file: mixed state needs a 'matrix' array");
        }
        const auto &rows = j.at("matrix");
        std::size_t n = rows.size();
        std::vector<cplx> data;
        data.reserve(n * n);
        for (const auto &row : rows) {
            if (!row.is_array() || row.size() != n) {
                throw InvalidInput("state file: matrix must be square");
            }
            for (const auto &z : row) {
                data.push_back(detail::parse_complex(z));
            }
        }
        return DensityMatrix::validate(CMatrix(n, n, std::move(data)), std::move(dims));
    }
    throw InvalidInput("state file: kind must be 'pure' or 'mixed', got '" + kind + "'");
}

inline nlohmann::json state_to_json(const State &state) {
    nlohmann::json j;
    if (const auto *p = std::get_if<PureState>(&state)) {
        j["dims"] = p->dims();
        j["kind"] = "pure";
        auto amps = nlohmann::json::array();
        for (const auto &z : p->amplitudes()) {
            amps.push_back(detail::complex_json(z));
        }
        j["amplitudes"] = amps;
        return j;
    }
    const auto &rho = std::get<DensityMatrix>(state);
    j["dims"] = rho.dims();
    j["kind"] = "mixed";
    auto rows = nlohmann::json::array();
    for (std::size_t r = 0; r < rho.dim(); r++) {
        auto row = nlohmann::json::array();
        for (std::size_t c = 0; c < rho.dim(); c++) {
            row.push_back(detail::complex_json(rho.matrix()(r, c)));
        }
        rows.push_back(row);
    }
    j["matrix"] = rows;
    return j;
}

inline State parse_state(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw InvalidInput(std::string("state file: malformed JSON: ") + e.what());
    }
    try {
        return state_from_json(j);
    } catch (const nlohmann::json::exception &e) {
        throw InvalidInput(std::string("state file: ") + e.what());
    }
}

inline State load_state(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot open state file '" + path + "'");
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_state(text);
}

}  // namespace qtangle
