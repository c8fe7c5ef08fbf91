#pragma once

#include "sindarin/script.hpp"

#include <map>
#include <string>
#include <vector>

namespace sindarin::script {

/// One place a scenario driver stopped the debuggee.
struct Halt {
    bool finished = false;
    std::string method;      // print name of the top frame's method
    lumen::NodeId node = 0;
    std::string node_kind;
    std::string excerpt;
    std::uint64_t frame_id = 0;
    std::string selector;    // pending message selector, when at a send
    std::string output;      // debuggee output so far
    Value receiver;          // pending message receiver; not compared

    bool operator==(const Halt& o) const {
        return finished == o.finished && method == o.method && node == o.node && frame_id == o.frame_id &&
               selector == o.selector && output == o.output;
    }
};

Halt halt_of(DebugSession& session);
std::string to_string(const Halt& halt);

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ScenarioReport {
    std::string name;
    bool passed = false;
    std::vector<Halt> host_halts;    // recorded by the host-API driver
    std::vector<Halt> script_halts;  // recorded by the script
    Halt final_position;             // where the script left the debuggee
    std::map<std::string, std::string> captured;
    std::vector<Check> checks;

    std::string render() const;
};

struct ScenarioOptions {
    std::int64_t seed = 42;
};

struct ScenarioInfo {
    std::string name;
    std::string title;
    std::string target;   // debuggee source
    std::string script;   // Lumen debugging script
};

const std::vector<ScenarioInfo>& scenario_list();
const ScenarioInfo& scenario_info(const std::string& name);  // throws UnknownScenario

/// Runs the host-API and script drivers and checks both against the
/// scenario's oracle. Throws Error{UnknownScenario}.
ScenarioReport run_scenario(const std::string& name, const ScenarioOptions& options = {});

/// Extra debuggee sources used by scenario variants and oracles.
namespace programs {
extern const char* const double_open;
extern const char* const double_open_clean;
extern const char* const assignment_monitor;
extern const char* const pre_exception;
extern const char* const nil_receiver;
extern const char* const method_family;
extern const char* const control_flow;
extern const char* const pitons;
extern const char* const pitons_out_of_order;
extern const char* const divergence_original;
extern const char* const divergence_modified;
extern const char* const collect_stepping;
extern const char* const atoms;
extern const char* const atoms_forced;
}  // namespace programs

namespace scripts {
extern const char* const double_open;
extern const char* const assignment_monitor;
extern const char* const pre_exception;
extern const char* const nil_receiver;
extern const char* const method_family;
extern const char* const control_flow;
extern const char* const control_flow_anywhere;
extern const char* const pitons;
extern const char* const divergence;
extern const char* const collect_stepping;
extern const char* const object_capture;
extern const char* const object_replay;
}  // namespace scripts

/// Registers `dbg recordHalt`, which appends halt_of(session) to the log
/// installed by the running scenario.
void install_scenario_primitives();

} // namespace sindarin::script
