#include "semiflow/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "semiflow/error.hpp"

namespace semiflow::report {

namespace {

std::string cell(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

Json numbers(const std::vector<double>& vs) {
    Json out = Json::array();
    for (double v : vs) out.push_back(number(v));
    return out;
}

Json scan_config(const SupScanConfig& s) {
    Json j;
    j["radii"] = numbers(s.radii);
    j["angles"] = s.angles;
    j["refine_rounds"] = s.refine_rounds;
    j["contraction"] = s.contraction;
    j["eps"] = numbers(s.eps);
    j["min_circle_nodes"] = s.min_circle_nodes;
    j["circle_scale"] = s.circle_scale;
    j["disk"] = {{"radial_nodes", s.disk.radial_nodes},
                 {"angular_nodes", s.disk.angular_nodes},
                 {"rtol", s.disk.rtol},
                 {"max_levels", s.disk.max_levels}};
    j["threshold"] = s.threshold;
    j["a_slope_limit"] = s.a_slope_limit;
    j["eps_growth"] = s.eps_growth;
    j["t_slope_limit"] = s.t_slope_limit;
    return j;
}

}  // namespace

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json point(cplx z) { return Json::array({number(z.real()), number(z.imag())}); }

Json to_json(const FlowVerificationReport& r) {
    Json j;
    j["identity_residual"] = number(r.identity_residual);
    j["semigroup_residual"] = number(r.semigroup_residual);
    j["self_map_excess"] = number(r.self_map_excess);
    j["continuity_checked"] = r.continuity_checked;
    j["continuity_residual"] = number(r.continuity_residual);
    j["continuity_tail"] = number(r.continuity_tail);
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    j["failures"] = r.failures;
    return j;
}

Json to_json(const CocycleVerificationReport& r) {
    Json j;
    j["law_residual"] = number(r.law_residual);
    j["unit_residual"] = number(r.unit_residual);
    j["admissible"] = r.admissible;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    j["failures"] = r.failures;
    return j;
}

Json to_json(const CriterionReport& r) {
    Json j;
    j["space"] = r.space;
    j["flow"] = r.flow;
    j["cocycle"] = r.cocycle;
    j["p"] = r.p;
    j["gamma"] = number(r.gamma);
    Json ts = Json::array();
    Json crit = Json::array();
    Json wit = Json::array();
    Json notes = Json::array();
    for (const CriterionValue& v : r.values) {
        ts.push_back(v.t);
        crit.push_back(number(v.value));
        wit.push_back(point(v.witness));
        notes.push_back(v.note);
    }
    j["t_values"] = ts;
    j["criterion"] = crit;
    j["witness_a"] = wit;
    j["notes"] = notes;
    j["sup"] = number(r.sup);
    j["trend"] = number(r.trend);
    j["verdict"] = to_string(r.verdict);
    j["reasons"] = r.reasons;
    j["config"] = scan_config(r.config);
    return j;
}

Json to_json(const SufficiencyResult& s) {
    Json j;
    j["tag"] = to_string(s.tag);
    j["tail_max"] = number(s.probe.tail_max);
    j["regime"] = to_string(s.probe.regime);
    j["times"] = numbers(s.probe.times);
    j["values"] = numbers(s.probe.values);
    return j;
}

Json to_json(const DecayTable& d) {
    Json j;
    j["t_values"] = numbers(d.t_values);
    Json rows = Json::array();
    for (const auto& row : d.rows) rows.push_back(numbers(row));
    j["rows"] = rows;
    j["tol"] = d.tol;
    j["decays"] = d.decays;
    return j;
}

Json to_json(const IntertwinerReport& r) {
    Json j;
    j["label"] = r.label;
    j["degenerate"] = r.degenerate;
    Json masked = Json::array();
    for (cplx z : r.masked) masked.push_back(point(z));
    j["masked"] = masked;
    j["multiplier_residual"] = number(r.multiplier_residual);
    j["intertwining_residual"] = number(r.intertwining_residual);
    Json powers = Json::object();
    for (const auto& [n, v] : r.power_residuals) powers[std::to_string(n)] = number(v);
    j["power_residuals"] = powers;
    j["self_map_max"] = number(r.self_map_max);
    j["form_residual"] = number(r.form_residual);
    j["m_boundary_profile"] = numbers(r.m_boundary_profile);
    j["m_growing"] = r.m_growing;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    j["failures"] = r.failures;
    return j;
}

Json to_json(const ExtractionReport& r) {
    Json j;
    j["t_values"] = numbers(r.t_values);
    j["semiflow_residual"] = number(r.semiflow_residual);
    j["cocycle_residual"] = number(r.cocycle_residual);
    j["worst_pair"] = Json::array({r.worst_pair.first, r.worst_pair.second});
    j["min_abs_m"] = number(r.min_abs_m);
    j["continuity_residual"] = number(r.continuity_residual);
    j["norm_surrogate"] = r.norm_surrogate_available ? number(r.norm_surrogate) : Json(nullptr);
    j["caveat"] = r.caveat;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    j["failures"] = r.failures;
    Json per = Json::array();
    for (const auto& p : r.per_t) per.push_back(to_json(p));
    j["per_t"] = per;
    return j;
}

std::string criterion_csv(const CriterionReport& r) {
    std::ostringstream os;
    os << "t,criterion,witness_re,witness_im,a_slope,last_correction\n";
    for (const CriterionValue& v : r.values) {
        os << cell(v.t) << ',' << cell(v.value) << ',' << cell(v.witness.real()) << ',' << cell(v.witness.imag()) << ','
           << cell(v.a_slope) << ',' << cell(v.corrections.empty() ? 0.0 : v.corrections.back()) << '\n';
    }
    return os.str();
}

std::string decay_csv(const DecayTable& d) {
    std::ostringstream os;
    os << 't';
    for (std::size_t i = 0; i < d.rows.size(); ++i) os << ",f" << i;
    os << '\n';
    for (std::size_t k = 0; k < d.t_values.size(); ++k) {
        os << cell(d.t_values[k]);
        for (const auto& row : d.rows) os << ',' << cell(row[k]);
        os << '\n';
    }
    return os.str();
}

std::string symbols_csv(const Extraction& e, const std::vector<cplx>& grid) {
    std::ostringstream os;
    os << "t,z_re,z_im,m_re,m_im,phi_re,phi_im\n";
    for (double t : e.report.t_values) {
        for (cplx z : grid) {
            const cplx m = e.cocycle(t, z);
            const cplx w = e.flow.raw(t, z);
            os << cell(t) << ',' << cell(z.real()) << ',' << cell(z.imag()) << ',' << cell(m.real()) << ','
               << cell(m.imag()) << ',' << cell(w.real()) << ',' << cell(w.imag()) << '\n';
        }
    }
    return os.str();
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_json(const std::string& dir, const std::string& stem, const Json& body) {
    Json out;
    out["generated_at"] = utc_timestamp();
    for (const auto& [k, v] : body.items()) out[k] = v;
    write_text(dir, stem + ".json", out.dump(2) + "\n");
}

void write_text(const std::string& dir, const std::string& file, const std::string& text) {
    std::filesystem::create_directories(dir);
    const auto path = std::filesystem::path(dir) / file;
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
    out << text;
}

}  // namespace semiflow::report
