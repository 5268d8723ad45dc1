#pragma once

#include <optional>
#include <string>

#include "tnf/system_spec.hpp"

namespace tnf {

struct CommonOptions {
    std::string format = "text"; // text | json
    std::string backend_override;
    bool strict = false;
    double tol = -1.0; // overrides tau_cmp and tau_res when >= 0
};

struct CommandResult {
    int exit_code = 0;
    std::string output;
};

struct ScheduleOptions {
    std::string gform;       // "C*m^tau"; empty: max inverse divisor over the box
    std::string gtable_path; // JSON [[m, g], ...]
    std::string mk = "doubling"; // doubling | saturating | comma-separated list
    std::string eps = "aurouet"; // preset or comma-separated list
    std::string rseq;            // comma-separated list; empty: 1/2 + 2^-k-1
    double cs2 = 1.0;
    double zeta0 = -1.0;  // < 0: 0.9 x the smallness bound
    double delta0 = -1.0; // < 0: min(1, C_omega)
};

CommandResult cmd_resonances(const SystemSpec& spec, int maxP, int maxQ, const CommonOptions& common);
CommandResult cmd_normalize(const SystemSpec& spec, int order, const CommonOptions& common);
CommandResult cmd_brjuno(const SystemSpec* spec, const ScheduleOptions& sched_opts, int terms,
                         int maxP, int kmax, const CommonOptions& common);
CommandResult cmd_iterate(const SystemSpec& spec, const ScheduleOptions& sched_opts, int steps,
                          int split_maxQ, const CommonOptions& common);
CommandResult cmd_verify(const SystemSpec& spec, const std::string& result_json,
                         const CommonOptions& common);

} // namespace tnf
