#pragma once

#include <json.hpp>
#include <string>

#include "gje/conditions.hpp"
#include "gje/genfun.hpp"
#include "gje/height.hpp"
#include "gje/measure.hpp"
#include "gje/probe.hpp"
#include "gje/segments.hpp"

namespace gje {

/// Reports serialize to order-stable JSON so identical runs produce
/// byte-identical bytes.
using OJson = nlohmann::ordered_json;

OJson vec_json(const Vec& v);

OJson report_json(const ValidationReport& r);
OJson report_json(const ConditionReport& r);
OJson report_json(const GSegment& s);
OJson report_json(const GConvexityVerdict& v);
OJson report_json(const HeightTrace& t);
OJson report_json(const MeasureReport& r);
OJson report_json(const AlexandrovVerdict& v);
OJson report_json(const ProbeReport& r);
OJson report_json(const C1Report& r);
OJson report_json(const SuiteSummary& s);

/// FNV-1a 64-bit hash (stable across platforms) used for config hashes.
uint64_t fnv1a(const std::string& bytes);

/// Envelope shared by every CLI report.
OJson report_envelope(const std::string& subcommand, const std::string& config_hash,
                      uint64_t seed, OJson body);

}  // namespace gje
