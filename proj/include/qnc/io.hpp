#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qnc/experiment.hpp"
#include "qnc/network.hpp"
#include "qnc/rip.hpp"
#include "qnc/source.hpp"

namespace qnc {

// JSON documents. Node ids in files are 1-based.
//   deployment: {"n", "gateway", "seed", "edges": [[tail, head, capacity], ...]}
//   ensemble:   {"n", "k", "eps_k", "eps_k_rel", "q_max", "seed", "phi" (row-major), "s_k", "s", "x"}
//   config:     ExperimentConfig field names
nlohmann::json to_json(const Deployment& d);
Deployment deployment_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MessageEnsemble& e);
MessageEnsemble ensemble_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ExperimentConfig& c);
/// Fields present in `j` override those of `base`. Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

/// Shortest round-trip decimal form, '.' separator, "-inf"/"inf"/"nan" for non-finite values.
std::string format_number(double v);

inline constexpr const char* kRecordHeader = "scenario,n,edges,L,k_over_n,eps_k_ratio,trial,t,delay,m,err_db,eps_rec";

void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records_csv(std::istream& is);

void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows);

/// One row per curve point: scenario,n,edges,k_over_n,eps_k_ratio,delay,err_db,L,t
void write_envelope_csv(std::ostream& os, const std::vector<EnvelopeCurve>& curves);

inline constexpr const char* kTailHeader = "matrix_kind,n,edges,m,epsilon,tail_prob_estimate,draws";

struct TailRow {
    std::string matrix_kind;
    int n = 0;
    int edges = 0;
    TailProbEstimate estimate;
};

void write_tail_csv(std::ostream& os, const std::vector<TailRow>& rows);

}  // namespace qnc
