#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "singsys/certify.hpp"
#include "singsys/system.hpp"

namespace singsys {

using Json = nlohmann::ordered_json;

/// "%.17g"; non-finite values print as nan / inf / -inf.
std::string format_number(double x);

/// One row per node: x[,y],value. Header line `x,value` or `x,y,value`.
std::string field_csv(const Mesh& m, const Field& f);

/// Reads a field written by field_csv; coordinates must match the mesh nodes.
Field read_field_csv(const std::string& text, const Mesh& m);

std::string trace_csv(const std::vector<TraceRow>& trace);

/// Serializes with every floating-point number at 17 significant digits;
/// non-finite numbers become null.
std::string dump_json(const Json& j);

Json to_json(const Certificate& c);
Json to_json(const ProblemParams& pp);
Json to_json(const BuilderConfig& cfg);
Json to_json(const BarrierConstants& k);
Json to_json(const CheckReport& r);
Json to_json(const std::vector<TuneStep>& history);

std::string read_file(const std::string& path);

}  // namespace singsys
