#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "momx/gns_space.hpp"
#include "momx/moment_core.hpp"
#include "momx/solution_factory.hpp"
#include "momx/types.hpp"

namespace momx::io {

using nlohmann::json;

// Schema violations raise Error(InputError) naming the offending field.
MomentTable table_from_json(const json& j);
json to_json(const MomentTable& table);

AtomicMeasure measure_from_json(const json& j);
json to_json(const AtomicMeasure& measure);

// Complex matrices are arrays of rows, each entry a [re, im] pair. A plain
// real number is accepted as an entry with zero imaginary part.
CMatrix cmatrix_from_json(const json& j, const std::string& field);
json to_json(const CMatrix& m);
CVector cvector_from_json(const json& j, const std::string& field);
json to_json(const CVector& v);

// {"dim", "A1_domain", "A1_action", "A2_domain", "A2_action", "h00",
//  "J_matrix", "a2_selfadjoint"}
SymmetricPair pair_from_json(const json& j);
json to_json(const SymmetricPair& pair);

json to_json(const SolutionReport& report);
json to_json(const CarlemanReport& report);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace momx::io
