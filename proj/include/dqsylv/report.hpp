#pragma once

// JSON and text renderings of solvability reports.

#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "sylvester.hpp"

namespace dqsylv {

inline nlohmann::json to_json(const ProjectorCheck& c) {
    return {{"condition", c.name}, {"residual", c.residual}, {"threshold", c.threshold}, {"holds", c.holds}};
}

inline nlohmann::json to_json(const RankCheck& c) {
    nlohmann::json j = {{"condition", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}};
    j["margin"] = std::isfinite(c.margin) ? nlohmann::json(c.margin) : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json to_json(const ConditionReport& r) {
    nlohmann::json j;
    j["projector"] = nlohmann::json::array();
    for (const auto& c : r.projector) j["projector"].push_back(to_json(c));
    j["rank"] = nlohmann::json::array();
    for (const auto& c : r.rank) j["rank"].push_back(to_json(c));
    j["projector_form_holds"] = r.projector_ok();
    j["rank_form_holds"] = r.rank_ok();
    j["agree"] = r.agree();
    j["solvable"] = r.solvable();
    j["diagnostics"] = r.diagnostics;
    return j;
}

inline nlohmann::json to_json(const SylvesterReport& r) {
    nlohmann::json j = to_json(r.conditions);
    j["identities"] = {to_json(r.identity_a6_c5), to_json(r.identity_a4_b4)};
    j["informational"] = {to_json(r.zero_corner_variant)};
    return j;
}

inline std::string format_check(const ProjectorCheck& c) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "  [%s] %-22s residual %.3e  threshold %.3e", c.holds ? "ok" : "FAIL",
                  c.name.c_str(), c.residual, c.threshold);
    return buf;
}

inline std::string format_check(const RankCheck& c) {
    char buf[320];
    std::snprintf(buf, sizeof buf, "  [%s] %s  (%ld vs %ld)", c.holds ? "ok" : "FAIL", c.name.c_str(), c.lhs, c.rhs);
    return buf;
}

inline void print_report(std::ostream& out, const ConditionReport& r) {
    out << "projector conditions:\n";
    for (const auto& c : r.projector) out << format_check(c) << '\n';
    if (!r.rank.empty()) {
        out << "rank conditions:\n";
        for (const auto& c : r.rank) out << format_check(c) << '\n';
        out << "projector and rank forms " << (r.agree() ? "agree" : "DISAGREE") << '\n';
    }
    for (const auto& d : r.diagnostics) out << "note: " << d << '\n';
}

inline void print_report(std::ostream& out, const SylvesterReport& r) {
    print_report(out, r.conditions);
    out << "informational (zero lower-left corner, not a solvability test):\n"
        << format_check(r.zero_corner_variant) << '\n';
}

}  // namespace dqsylv
