#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semiflow/cocycle.hpp"
#include "semiflow/criteria.hpp"
#include "semiflow/spaces.hpp"

namespace semiflow {

/// Flow by gallery name: "dilation", "rotation(a)", "attraction", "identity",
/// "translation", or a generator-driven flow "generator(linear, re, im)" /
/// "generator(attraction)".
Semiflow parse_flow(const std::string& text);

/// Cocycle over `flow`: "derivative", "derivative(rho)", "exp_time(c)",
/// "exp_cayley(c)", "closed(exp_time, c)", "closed(exp_cayley, c)",
/// "coboundary(monomial, n)", "coboundary(one_minus_power, gamma)" or
/// "coboundary(exponential, c)".
Cocycle parse_cocycle(const std::string& text, const Semiflow& flow);

/// One scenario file: a JSON object with the keys below. Unknown keys are
/// rejected so that typos surface as configuration errors.
///
///   name, flow, cocycle, space       strings
///   t_grid                           array of times (command default when absent)
///   tolerance, seed                  numbers
///   scan: {angles, refine_rounds}    criterion sup scan
///   decay: {family_size}
///   bundle: {path, N}                matrix bundle read by intertwine / written by export-bundle
///   output: {dir, format}            format json|csv|both
struct Scenario {
    std::string name = "scenario";
    std::string flow;
    std::string cocycle;
    std::string space = "hardy:2";
    std::optional<std::vector<double>> t_grid;
    double tolerance = 1e-8;
    std::uint64_t seed = 1;
    int scan_angles = 16;
    int scan_refine_rounds = 3;
    int family_size = 10;
    std::string bundle_path;
    std::size_t bundle_n = 64;
    std::string out_dir = ".";
    std::string format = "both";
};

Scenario parse_scenario(const std::string& json_text, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

/// Checks that format is json, csv or both.
void check_format(const std::string& format);

}  // namespace semiflow
