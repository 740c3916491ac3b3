#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "semiflow/criteria.hpp"
#include "semiflow/error.hpp"
#include "semiflow/intertwine.hpp"
#include "semiflow/parallel.hpp"
#include "semiflow/report.hpp"
#include "semiflow/scenario.hpp"

using namespace semiflow;
namespace rep = semiflow::report;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Options {
    std::string scenario;
    std::string out;
    std::optional<std::size_t> threads;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::string format;
};

// Usage and configuration problems, as opposed to analytic failures.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool want_json(const Scenario& s) { return s.format != "csv"; }
bool want_csv(const Scenario& s) { return s.format != "json"; }

void require(const std::string& value, const char* key) {
    if (value.empty()) throw UsageError(std::string("scenario: '") + key + "' is required for this command");
}

void merge(rep::Json& into, const rep::Json& from) {
    for (const auto& [k, v] : from.items()) into[k] = v;
}

rep::Json header(const Scenario& s, const char* command) {
    rep::Json j;
    j["command"] = command;
    j["scenario"] = s.name;
    j["seed"] = s.seed;
    return j;
}

int flow_verify(const Scenario& s) {
    require(s.flow, "flow");
    const Semiflow flow = parse_flow(s.flow);
    const std::vector<double> times = s.t_grid.value_or(default_time_grid());
    const std::vector<cplx> points = default_point_grid();
    const FlowVerificationReport fr = verify_semiflow(flow, times, points, s.tolerance);
    rep::Json j = header(s, "flow-verify");
    j["flow"] = flow.name();
    j["flow_report"] = rep::to_json(fr);
    bool pass = fr.pass;
    if (!s.cocycle.empty()) {
        const Cocycle cc = parse_cocycle(s.cocycle, flow);
        const CocycleVerificationReport cr = verify_cocycle(cc, flow, times, points, s.tolerance);
        j["cocycle"] = cc.name();
        j["cocycle_report"] = rep::to_json(cr);
        pass = pass && cr.pass;
    }
    j["pass"] = pass;
    if (want_json(s)) rep::write_json(s.out_dir, "flow_verify", j);
    if (want_csv(s)) {
        std::string csv = "metric,value\n";
        for (const char* key : {"identity_residual", "semigroup_residual", "self_map_excess", "continuity_residual"}) {
            const auto& v = j["flow_report"][key];
            csv += std::string(key) + "," + (v.is_null() ? std::string("inf") : v.dump()) + "\n";
        }
        rep::write_text(s.out_dir, "flow_verify.csv", csv);
    }
    std::cout << "flow-verify " << flow.name() << ": " << (pass ? "PASS" : "FAIL") << "\n";
    for (const auto& f : fr.failures) std::cout << "  " << f << "\n";
    return pass ? kPass : kFail;
}

int verdict(const Scenario& s) {
    require(s.flow, "flow");
    require(s.cocycle, "cocycle");
    const SpaceSpec space = parse_space(s.space);
    if (!(space.p() > 1.0)) {
        throw UsageError("verdict needs p > 1; the integral criteria do not apply to p = " + std::to_string(space.p()) +
                         ", run the 'decay' command instead");
    }
    const std::vector<double> times = s.t_grid.value_or(default_verdict_times());
    for (double t : times) {
        if (!(t < 1.0)) throw UsageError("verdict: t_grid must lie in [0, 1)");
    }
    const Semiflow flow = parse_flow(s.flow);
    const Cocycle cc = parse_cocycle(s.cocycle, flow);
    SupScanConfig scan;
    scan.angles = s.scan_angles;
    scan.refine_rounds = s.scan_refine_rounds;
    const CriterionReport r = uniform_bound_verdict(flow, cc, space, times, scan);
    const SufficiencyResult suff = sufficiency_probe(cc);
    rep::Json j = header(s, "verdict");
    merge(j, rep::to_json(r));
    j["sufficiency"] = rep::to_json(suff);
    if (want_json(s)) rep::write_json(s.out_dir, "verdict", j);
    if (want_csv(s)) rep::write_text(s.out_dir, "verdict.csv", rep::criterion_csv(r));
    std::cout << "verdict " << r.flow << " / " << r.cocycle << " on " << r.space << ": " << to_string(r.verdict)
              << " (sup " << r.sup << ", sufficiency " << to_string(suff.tag) << ")\n";
    for (const auto& reason : r.reasons) std::cout << "  " << reason << "\n";
    return r.verdict == Verdict::Bounded ? kPass : kFail;
}

int decay(const Scenario& s) {
    require(s.flow, "flow");
    require(s.cocycle, "cocycle");
    const SpaceSpec space = parse_space(s.space);
    const Semiflow flow = parse_flow(s.flow);
    const Cocycle cc = parse_cocycle(s.cocycle, flow);
    const auto family = decay_family(space, s.family_size, s.seed);
    const DecayTable d = direct_decay_probe(flow, cc, space, family, s.t_grid.value_or(default_limsup_times()));
    rep::Json j = header(s, "decay");
    j["space"] = space.name();
    j["flow"] = flow.name();
    j["cocycle"] = cc.name();
    merge(j, rep::to_json(d));
    if (want_json(s)) rep::write_json(s.out_dir, "decay", j);
    if (want_csv(s)) rep::write_text(s.out_dir, "decay.csv", rep::decay_csv(d));
    std::cout << "decay " << flow.name() << " / " << cc.name() << " on " << space.name() << ": "
              << (d.decays ? "DECAYS" : "NO-DECAY") << "\n";
    return d.decays ? kPass : kFail;
}

int intertwine(const Scenario& s) {
    require(s.bundle_path, "bundle.path");
    const OperatorBundle b = read_bundle(s.bundle_path);
    rep::Json j = header(s, "intertwine");
    j["bundle"] = std::filesystem::path(s.bundle_path).filename().string();
    j["space"] = b.space;
    j["N"] = b.n;
    try {
        const Extraction e = extract_semigroup(bundle_family(b), b.t_values, s.tolerance);
        merge(j, rep::to_json(e.report));
        if (want_json(s)) rep::write_json(s.out_dir, "intertwine", j);
        if (want_csv(s)) rep::write_text(s.out_dir, "symbols.csv", rep::symbols_csv(e, intertwine_grid()));
        std::cout << "intertwine " << b.space << ": " << (e.report.pass ? "PASS" : "FAIL") << "\n";
        for (const auto& f : e.report.failures) std::cout << "  " << f << "\n";
        return e.report.pass ? kPass : kFail;
    } catch (const ExtractionError& e) {
        j["pass"] = false;
        j["failed_t"] = e.time();
        j["failures"] = {e.what()};
        if (want_json(s)) rep::write_json(s.out_dir, "intertwine", j);
        std::cout << "intertwine " << b.space << ": FAIL\n  " << e.what() << "\n";
        return kFail;
    }
}

int export_bundle(const Scenario& s) {
    require(s.flow, "flow");
    require(s.cocycle, "cocycle");
    const SpaceSpec space = parse_space(s.space);
    const Semiflow flow = parse_flow(s.flow);
    const Cocycle cc = parse_cocycle(s.cocycle, flow);
    const OperatorBundle b = make_bundle(flow, cc, space, s.bundle_n, s.t_grid.value_or(default_extraction_times()));
    const std::string dir = s.bundle_path.empty() ? (std::filesystem::path(s.out_dir) / "bundle").string() : s.bundle_path;
    write_bundle(dir, b);
    std::cout << "export-bundle: " << b.matrices.size() << " matrices of size " << b.n << " written to " << dir << "\n";
    return kPass;
}

std::size_t resolve_threads(const std::optional<std::size_t>& flag) {
    if (flag) {
        if (*flag < 1) throw UsageError("--threads must be >= 1");
        return *flag;
    }
    if (const char* env = std::getenv("SEMIFLOW_LAB_THREADS"); env != nullptr && *env != '\0') {
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(env, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != std::string(env).size() || v < 1) throw UsageError("SEMIFLOW_LAB_THREADS must be a positive integer");
        return static_cast<std::size_t>(v);
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical lab for analytic semiflows and weighted composition semigroups"};
    app.require_subcommand(1);
    app.fallthrough();
    Options opt;
    app.add_option("--scenario", opt.scenario, "Scenario file (JSON)")->required();
    app.add_option("--out", opt.out, "Output directory (overrides output.dir)");
    app.add_option("--threads", opt.threads, "Worker threads (default: SEMIFLOW_LAB_THREADS or 1)");
    app.add_option("--seed", opt.seed, "Seed for randomized test families (overrides seed)");
    app.add_option("--tol", opt.tol, "Verification tolerance (overrides tolerance)");
    app.add_option("--format", opt.format, "json, csv or both (overrides output.format)");

    using Command = int (*)(const Scenario&);
    Command command = nullptr;
    auto sub = [&](const char* name, const char* help, Command fn) {
        app.add_subcommand(name, help)->callback([&command, fn] { command = fn; });
    };
    sub("flow-verify", "Check the semiflow (and cocycle) laws", flow_verify);
    sub("verdict", "Uniform-bound verdict from the integral criterion (p > 1)", verdict);
    sub("decay", "Direct table of ||S_t f - f|| as t -> 0+", decay);
    sub("intertwine", "Extract a weighted composition semigroup from a matrix bundle", intertwine);
    sub("export-bundle", "Write matrix sections of S_t as a bundle", export_bundle);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kUsage;
    }

    try {
        set_thread_count(resolve_threads(opt.threads));
        Scenario s = load_scenario(opt.scenario);
        if (!opt.out.empty()) s.out_dir = opt.out;
        if (opt.seed) s.seed = *opt.seed;
        if (opt.tol) {
            if (!(*opt.tol > 0.0)) throw UsageError("--tol must be positive");
            s.tolerance = *opt.tol;
        }
        if (!opt.format.empty()) {
            check_format(opt.format);
            s.format = opt.format;
        }
        return command(s);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const AdmissibilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return kFail;
    }
}
