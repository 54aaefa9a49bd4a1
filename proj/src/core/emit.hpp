#pragma once

#include <string>

#include "core/harness.hpp"

namespace ob {

// CSV table of the per-horizon rows under the fixed header
// horizon,mean_err,max_err,p_err,p_mismatch,mi_nats,mi_lo,mi_hi,ir_upper_nats,fano_lower_nats
// with 17-significant-digit numbers ("nan" for absent columns); no rows means
// a header-only table.
std::string result_csv(const ExperimentResult& res);

// JSON array of the bound reports, one object per bound with fixed field
// names {name, value_nats, inputs, validity}.
std::string result_json(const ExperimentResult& res);

// Same encoding for a single report, as one JSON object.
std::string report_json(const BoundReport& rep);

// Writes {stem}_{seed}.csv / .json under out_dir (csv / json / both).
// Returns the paths written; IO failures carry the path in the message.
std::vector<std::string> write_outputs(const ExperimentResult& res, const ExperimentConfig& cfg,
                                       const std::string& out_dir, const std::string& format);

}  // namespace ob
