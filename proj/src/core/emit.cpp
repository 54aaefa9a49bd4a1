#include "core/emit.hpp"

#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace ob {

namespace {

constexpr const char* kHeader =
    "horizon,mean_err,max_err,p_err,p_mismatch,mi_nats,mi_lo,mi_hi,ir_upper_nats,"
    "fano_lower_nats";

std::string cell(double v) { return std::isnan(v) ? "nan" : num_str(v); }

nlohmann::ordered_json report_obj(const BoundReport& rep) {
  nlohmann::ordered_json obj;
  obj["name"] = rep.name;
  obj["value_nats"] = rep.value_nats;
  nlohmann::ordered_json inputs;
  for (const auto& [k, v] : rep.inputs) inputs[k] = v;
  obj["inputs"] = std::move(inputs);
  nlohmann::ordered_json validity = nlohmann::ordered_json::array();
  for (const auto& [check, ok] : rep.validity)
    validity.push_back(nlohmann::ordered_json{{"check", check}, {"ok", ok}});
  obj["validity"] = std::move(validity);
  return obj;
}

}  // namespace

std::string result_csv(const ExperimentResult& res) {
  std::string out = kHeader;
  out += '\n';
  for (const HorizonRow& r : res.rows) {
    out += std::to_string(r.horizon);
    for (double v : {r.mean_err, r.max_err, r.p_err, r.p_mismatch, r.mi_nats, r.mi_lo, r.mi_hi,
                     r.ir_upper_nats, r.fano_lower_nats}) {
      out += ',';
      out += cell(v);
    }
    out += '\n';
  }
  return out;
}

std::string result_json(const ExperimentResult& res) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const BoundReport& rep : res.reports) arr.push_back(report_obj(rep));
  return arr.dump(2) + "\n";
}

std::string report_json(const BoundReport& rep) { return report_obj(rep).dump(2) + "\n"; }

std::vector<std::string> write_outputs(const ExperimentResult& res, const ExperimentConfig& cfg,
                                       const std::string& out_dir, const std::string& format) {
  const bool csv = format == "csv" || format == "both";
  const bool json = format == "json" || format == "both";
  require(csv || json, Err::invalid_argument,
          "emit: format must be 'csv', 'json', or 'both', got '" + format + "'");

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(Err::io, "emit: cannot create directory " + out_dir + ": " + ec.message());

  const std::string base = cfg.stem + "_" + std::to_string(cfg.sweep.base_seed);
  std::vector<std::string> written;
  auto put = [&](const char* ext, const std::string& text) {
    fs::path p = fs::path(out_dir) / (base + ext);
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f || !(f << text) || !f.flush())
      fail(Err::io, "emit: write failed: " + p.string());
    written.push_back(p.string());
  };
  if (csv) put(".csv", result_csv(res));
  if (json) put(".json", result_json(res));
  return written;
}

}  // namespace ob
