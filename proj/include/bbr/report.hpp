#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "bbr/pipeline.hpp"

namespace bbr {

// Pipeline run summary with a fixed key set and order, so identical runs
// serialize to identical bytes.  Rationals go out as exact strings.
inline nlohmann::ordered_json report_json(const PipelineResult& res) {
    const PipelineState& st = res.state;
    nlohmann::ordered_json j;
    j["p"] = st.a.xside().p;
    j["m"] = st.a.xside().n;
    j["n"] = st.a.yside().n;
    j["alpha"] = st.alpha.get_str();
    j["word"] = st.cfg.word.letters;
    j["mode"] = st.cfg.robust ? "robust" : "plain";
    j["r1"] = res.variety.r1();
    j["r2"] = res.variety.r2();
    j["r3"] = res.variety.r3();
    j["r"] = res.variety.r();
    j["epsilon"] = res.cert.epsilon.get_str();
    j["certificate"] = {{"checked", res.cert.checked},
                        {"exhaustive", res.cert.exhaustive},
                        {"min_normalized_count", res.cert.min_normalized.get_str()},
                        {"pass", res.cert.pass}};
    j["seeds"] = {{"root", st.cfg.seed}};
    nlohmann::ordered_json oracle;
    oracle["name"] = "spectral";
    oracle["rho"] = st.wprime_res ? st.wprime_res->cert.rho_sq.get_str() : "0";
    oracle["codim_bound"] = st.wprime_res ? st.wprime_res->cert.codim_bound : 0;
    j["oracle"] = oracle;
    nlohmann::ordered_json tm;
    for (const auto& [k, v] : st.timings) tm[k] = v;
    j["timings_ms"] = tm;
    j["degraded_flags"] = st.degraded;
    return j;
}

inline std::string report_string(const PipelineResult& res) { return report_json(res).dump(2) + "\n"; }

}  // namespace bbr
