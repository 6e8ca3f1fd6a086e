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

// Subcommand implementations of the qtangle command-line tool. Each returns
// the machine-readable output and a one-line human summary.

#pragma once

#include <cstdint>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>

#include "qtangle/qtangle.hpp"

namespace qtangle::cli {

using nlohmann::json;

struct RunConfig {
    std::string command;
    std::string in;
    std::string out;
    std::string method;
    std::string format = "json";
    std::string unitary = "identity";
    std::uint64_t shots = 0;
    std::optional<std::uint64_t> seed;
    std::size_t chi_points = 8;
    bool override_purity = false;
    int moment = 0;
    std::size_t qubits = 2;
    bool pure = false;
    std::size_t rank = 0;
};

struct CommandOutput {
    std::string text;
    std::string summary;
};

namespace detail {

inline std::string dump(const json &j) {
    return j.dump(2) + "\n";
}

inline std::string fmt(double x) {
    std::ostringstream ss;
    ss.precision(10);
    ss << x;
    return ss.str();
}

inline void require_input(const RunConfig &cfg) {
    if (cfg.in.empty()) {
        throw InvalidInput(cfg.command + ": --in PATH is required");
    }
}

inline std::uint64_t require_seed(const RunConfig &cfg) {
    if (cfg.shots > 0 && !cfg.seed) {
        throw InvalidInput("--seed is required when --shots > 0");
    }
    return cfg.seed.value_or(0);
}

inline DensityMatrix load_two_qubit(const RunConfig &cfg) {
    require_input(cfg);
    DensityMatrix rho = as_density(load_state(cfg.in));
    if (rho.dims() != Dims{2, 2}) {
        throw InvalidInput(cfg.command + ": needs a two-qubit state");
    }
    return rho;
}

inline json array_json(const std::array<double, 4> &a) {
    return json(std::vector<double>(a.begin(), a.end()));
}

/// {"matrix": ...} for one unitary or {"terms": [{"weight": w, "matrix": ...}]}.
inline MixedUnitaryChannel load_channel(const std::string &path) {
    std::ifstream f(path);
    if (!f) {
        throw InvalidInput("cannot open unitary file '" + path + "'");
    }
    json j;
    try {
        j = json::parse(f);
    } catch (const json::exception &e) {
        throw InvalidInput(std::string("unitary file: malformed JSON: ") + e.what());
    }
    auto parse_matrix = [](const json &rows) {
        if (!rows.is_array()) {
            throw InvalidInput("unitary file: 'matrix' must be an array of rows");
        }
        std::size_t n = rows.size();
        std::vector<cplx> data;
        for (const auto &row : rows) {
            if (!row.is_array() || row.size() != n) {
                throw InvalidInput("unitary file: matrix must be square");
            }
            for (const auto &z : row) {
                data.push_back(qtangle::detail::parse_complex(z));
            }
        }
        return CMatrix(n, n, std::move(data));
    };
    try {
        if (j.contains("matrix")) {
            return MixedUnitaryChannel::single(parse_matrix(j.at("matrix")));
        }
        if (j.contains("terms")) {
            std::vector<MixedUnitaryChannel::Term> terms;
            for (const auto &t : j.at("terms")) {
                terms.push_back({t.at("weight").get<double>(), parse_matrix(t.at("matrix"))});
            }
            return MixedUnitaryChannel::validate(std::move(terms));
        }
    } catch (const json::exception &e) {
        throw InvalidInput(std::string("unitary file: ") + e.what());
    }
    throw InvalidInput("unitary file: expected 'matrix' or 'terms'");
}

inline json tangle_json(const TangleValue &t) {
    json j;
    j["tau"] = t.tau;
    j["components"] = t.components;
    j["unreliable"] = t.unreliable;
    return j;
}

inline json budget_json(const CopyBudget &b) {
    return {{"copies_per_run", b.copies_per_run}, {"runs", b.runs}, {"per_circuit", b.per_circuit}};
}

}  // namespace detail

/// Methods: direct, moments-exact, moments-sampled, per-term-sampled.
inline CommandOutput cmd_concurrence(const RunConfig &cfg) {
    DensityMatrix rho = detail::load_two_qubit(cfg);
    std::string method = cfg.method.empty() ? "direct" : cfg.method;
    json j;
    j["command"] = "concurrence";
    j["method"] = method;
    double c = 0;
    if (method == "direct") {
        auto r = wootters_concurrence(rho);
        c = r.concurrence;
        j["lambdas"] = detail::array_json(r.spectrum.lambdas);
        j["etas"] = detail::array_json(r.spectrum.etas);
        j["moments"] = detail::array_json(moments_direct(rho).p);
    } else if (method == "moments-exact" || method == "moments-sampled" || method == "per-term-sampled") {
        MomentSet moments;
        if (method == "moments-exact") {
            moments = moments_from_terms(rho);
        } else {
            std::uint64_t seed = detail::require_seed(cfg);
            auto mode = method == "moments-sampled" ? SamplingMode::full_circuit : SamplingMode::per_term;
            moments = sampled_moments(rho, mode, cfg.shots, chi_grid(cfg.chi_points), seed);
            j["stderr"] = detail::array_json(*moments.stderr_);
            j["shots"] = cfg.shots;
            j["seed"] = seed;
            j["chi_points"] = cfg.chi_points;
        }
        auto r = concurrence_from_moments(moments);
        c = r.concurrence;
        j["lambdas"] = detail::array_json(r.lambdas);
        j["etas"] = detail::array_json(r.etas);
        j["moments"] = detail::array_json(moments.p);
        j["power_sum_residual"] = r.power_sum_residual;
        j["max_imag_residue"] = r.max_imag_residue;
    } else {
        throw InvalidInput("concurrence: unknown method '" + method + "'");
    }
    j["C"] = c;
    return {detail::dump(j), "concurrence (" + method + "): C = " + detail::fmt(c)};
}

/// All three 3-tangle methods, pair identities and copy budgets.
inline CommandOutput cmd_tangle3(const RunConfig &cfg) {
    detail::require_input(cfg);
    State state = load_state(cfg.in);
    bool ov = cfg.override_purity;
    auto residual = tau3_residual(state, ov);
    auto taufinal = tau3_taufinal(state, ov);
    auto tracediff = tau3_tracediff(state, ov);
    auto ids = tangle_pair_identities(state, ov);
    auto naive = naive_tau_sq_circuit(state, CircuitMode::analytic, ov);
    auto purities = combined_purity_circuit(state);

    json j;
    j["command"] = "tangle3";
    j["methods"] = {{"residual", detail::tangle_json(residual)},
                    {"taufinal", detail::tangle_json(taufinal)},
                    {"tracediff", detail::tangle_json(tracediff)}};
    j["identities"] = {{"lambda12", ids.lambda12},
                       {"four_det", ids.four_det},
                       {"first_moment_residual", ids.first_moment_residual},
                       {"lambda_residual", ids.lambda_residual},
                       {"relabel_residual", ids.relabel_residual},
                       {"rank2_residual", ids.rank2_residual},
                       {"purity_circuit_residual", purities.max_residual}};
    j["naive_tau_sq"] = {{"visibility", naive.visibility},
                         {"tau_sq", naive.tau_sq},
                         {"ratio", naive.ratio},
                         {"stated_ratio", NaiveTauReport::kStatedRatio},
                         {"derived_ratio", NaiveTauReport::kDerivedRatio}};
    j["copy_budgets"] = {{"tangle3_method1", detail::budget_json(copy_budget("tangle3_method1"))},
                         {"tangle3_naive_tau_sq", detail::budget_json(copy_budget("tangle3_naive_tau_sq"))},
                         {"combined_purities", detail::budget_json(copy_budget("combined_purities"))}};
    j["unreliable"] = residual.unreliable;
    std::string summary = "tangle3: residual " + detail::fmt(residual.tau) + ", taufinal " +
                          detail::fmt(taufinal.tau) + ", tracediff " + detail::fmt(tracediff.tau);
    if (residual.unreliable) {
        summary += " (mixed input, unreliable)";
    }
    return {detail::dump(j), summary};
}

/// Fringe CSV for U = identity, a unitary/channel file, or the m-th moment
/// circuit (--moment m).
inline CommandOutput cmd_fringe(const RunConfig &cfg) {
    detail::require_input(cfg);
    State state = load_state(cfg.in);
    DensityMatrix rho = as_density(state);
    auto chis = chi_grid(cfg.chi_points);
    ProbabilityFn p0;
    std::string what;
    if (cfg.moment != 0) {
        if (rho.dims() != Dims{2, 2}) {
            throw InvalidInput("fringe --moment: needs a two-qubit state");
        }
        cplx t = full_circuit_visibility(cfg.moment, state, CircuitMode::analytic).trace;
        p0 = [t](double chi) { return intensity_from_trace(t, chi).p0; };
        what = "moment " + std::to_string(cfg.moment);
    } else {
        auto channel = cfg.unitary == "identity" ? MixedUnitaryChannel::single(CMatrix::identity(rho.dim()))
                                                 : detail::load_channel(cfg.unitary);
        cplx t = intensity_analytic(channel, rho, PhaseSetting(0.0)).visibility.trace;
        p0 = [t](double chi) { return intensity_from_trace(t, chi).p0; };
        what = "U = " + cfg.unitary;
    }
    FringeScan scan;
    if (cfg.shots == 0) {
        scan = exact_fringe(p0, chis);
    } else {
        scan = sample_fringe(p0, chis, cfg.shots, detail::require_seed(cfg));
    }
    auto fit = fit_fringe(scan);
    std::string summary = "fringe (" + what + "): v = " + detail::fmt(fit.v) + ", phi = " + detail::fmt(fit.phi);
    if (fit.stderr_v) {
        summary += " +- " + detail::fmt(*fit.stderr_v);
    }
    return {fringe_csv(scan), summary};
}

/// Moments from the term expansion; --format csv gives the term table.
inline CommandOutput cmd_moments(const RunConfig &cfg) {
    DensityMatrix rho = detail::load_two_qubit(cfg);
    if (cfg.moment != 0) {
        qtangle::detail::check_moment(cfg.moment);
    }
    int lo = cfg.moment == 0 ? 1 : cfg.moment;
    int hi = cfg.moment == 0 ? kMaxMoment : cfg.moment;
    if (cfg.format == "csv") {
        std::string out;
        for (int m = lo; m <= hi; m++) {
            std::string t = term_table_csv(m, rho);
            out += m == lo ? t : t.substr(t.find('\n') + 1);
        }
        return {out, "moments: term table for m = " + std::to_string(lo) + ".." + std::to_string(hi)};
    }
    if (cfg.format != "json") {
        throw InvalidInput("moments: unknown format '" + cfg.format + "'");
    }
    auto terms = moments_from_terms(rho);
    auto direct = moments_direct(rho);
    double diff = 0;
    for (std::size_t k = 0; k < 4; k++) {
        diff = std::max(diff, std::abs(terms.p[k] - direct.p[k]));
    }
    json j;
    j["command"] = "moments";
    j["moments"] = detail::array_json(terms.p);
    j["moments_direct"] = detail::array_json(direct.p);
    j["max_abs_diff"] = diff;
    j["terms_per_moment"] = {4, 16, 64, 256};
    return {detail::dump(j), "moments: p = (" + detail::fmt(terms.p[0]) + ", " + detail::fmt(terms.p[1]) + ", " +
                                 detail::fmt(terms.p[2]) + ", " + detail::fmt(terms.p[3]) + ")"};
}

/// Circuit counts; with --in also the class-value check, and --format csv
/// gives the class table.
inline CommandOutput cmd_circuits(const RunConfig &cfg) {
    auto counts = count_canonical();
    auto tau = count_tau_sq();
    std::optional<ClassReport> classes;
    if (!cfg.in.empty()) {
        classes = verify_class_values(detail::load_two_qubit(cfg));
    }
    std::string summary = "circuits: raw " + std::to_string(counts.raw_total) + ", cyclic " +
                          std::to_string(counts.cyclic_total) + " (bound " + std::to_string(counts.bound) +
                          "), reduced runs " + std::to_string(counts.runs) + ", tau^2 " + std::to_string(tau.total);
    if (cfg.format == "csv") {
        if (!classes) {
            throw InvalidInput("circuits --format csv: needs --in PATH to evaluate the classes");
        }
        return {class_table_csv(*classes), summary};
    }
    if (cfg.format != "json") {
        throw InvalidInput("circuits: unknown format '" + cfg.format + "'");
    }
    json j;
    j["command"] = "circuits";
    j["raw"] = {{"total", counts.raw_total}, {"per_moment", counts.raw}};
    j["canonical"] = {{"cyclic_per_moment", counts.cyclic},
                      {"cyclic_total", counts.cyclic_total},
                      {"bound", counts.bound},
                      {"reduced_new_per_moment", counts.reduced_new},
                      {"reduced_total", counts.reduced_total},
                      {"runs", counts.runs}};
    j["tau_sq"] = {{"first_moment", tau.first_moment}, {"second_moment", tau.second_moment}, {"total", tau.total}};
    if (classes) {
        j["class_check"] = {{"max_cyclic_spread", classes->max_cyclic_spread},
                            {"max_reduced_spread", classes->max_reduced_spread}};
    }
    return {detail::dump(j), summary};
}

/// Random state file: Haar pure (--pure) or Ginibre mixed of --rank.
inline CommandOutput cmd_random(const RunConfig &cfg) {
    std::uint64_t seed = cfg.seed.value_or(0);
    State s = cfg.pure ? State(random_pure(cfg.qubits, seed))
                       : State(random_mixed(cfg.qubits, cfg.rank == 0 ? std::size_t{1} << cfg.qubits : cfg.rank, seed));
    return {detail::dump(state_to_json(s)), "random: " + std::to_string(cfg.qubits) + "-qubit " +
                                                (cfg.pure ? "pure" : "mixed") + " state, seed " + std::to_string(seed)};
}

inline CommandOutput cmd_validate(const RunConfig &cfg) {
    detail::require_input(cfg);
    State s = load_state(cfg.in);
    DensityMatrix rho = as_density(s);
    json j;
    j["command"] = "validate";
    j["valid"] = true;
    j["kind"] = std::holds_alternative<PureState>(s) ? "pure" : "mixed";
    j["dims"] = rho.dims();
    j["purity"] = rho.purity();
    return {detail::dump(j), "validate: " + cfg.in + " is a valid " + j["kind"].get<std::string>() + " state"};
}

inline CommandOutput run(const RunConfig &cfg) {
    if (cfg.command == "concurrence") {
        return cmd_concurrence(cfg);
    }
    if (cfg.command == "tangle3") {
        return cmd_tangle3(cfg);
    }
    if (cfg.command == "fringe") {
        return cmd_fringe(cfg);
    }
    if (cfg.command == "moments") {
        return cmd_moments(cfg);
    }
    if (cfg.command == "circuits") {
        return cmd_circuits(cfg);
    }
    if (cfg.command == "random") {
        return cmd_random(cfg);
    }
    if (cfg.command == "validate") {
        return cmd_validate(cfg);
    }
    throw InvalidInput("unknown command '" + cfg.command + "'");
}

}  // namespace qtangle::cli
