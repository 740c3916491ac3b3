#pragma once

#include <string>

#include <json.hpp>

#include "semiflow/criteria.hpp"
#include "semiflow/flow.hpp"
#include "semiflow/intertwine.hpp"

namespace semiflow::report {

using Json = nlohmann::ordered_json;

/// The value, or null when it is not finite.
Json number(double v);
/// [re, im], with null parts when not finite.
Json point(cplx z);

Json to_json(const FlowVerificationReport& r);
Json to_json(const CocycleVerificationReport& r);
/// {space, flow, cocycle, p, gamma, t_values, criterion, witness_a, sup, trend, verdict, reasons, config}.
Json to_json(const CriterionReport& r);
Json to_json(const SufficiencyResult& s);
Json to_json(const DecayTable& d);
Json to_json(const IntertwinerReport& r);
Json to_json(const ExtractionReport& r);

/// t, criterion, witness_re, witness_im, a_slope, last_correction.
std::string criterion_csv(const CriterionReport& r);
/// t, then one column per family member.
std::string decay_csv(const DecayTable& d);
/// t, z_re, z_im, m_re, m_im, phi_re, phi_im for every extracted time and grid point.
std::string symbols_csv(const Extraction& e, const std::vector<cplx>& grid);

/// Current UTC time as 2026-01-31T12:00:00Z.
std::string utc_timestamp();

/// Writes <dir>/<stem>.json with "generated_at" as the first field.
void write_json(const std::string& dir, const std::string& stem, const Json& body);
void write_text(const std::string& dir, const std::string& file, const std::string& text);

}  // namespace semiflow::report
