#pragma once

#include "sindarin/session.hpp"

#include <memory>
#include <string>
#include <vector>

namespace sindarin::script {

struct ScriptResult {
    Value value;
    std::string print;   // printString of value
    std::string output;  // Transcript text written by the script
    std::shared_ptr<lumen::Execution> execution;
};

/// A script execution over session's heap with `dbg` bound. Nothing runs yet;
/// the caller may run it or debug it (self-debugging).
std::shared_ptr<lumen::Execution> prepare_script(const std::shared_ptr<DebugSession>& session,
                                                 const std::string& source);

/// Runs a script to completion. A guest failure throws Error{ScriptFailed}
/// whose detail lists the script's stack.
ScriptResult eval_script(const std::shared_ptr<DebugSession>& session, const std::string& source);

/// The guest object standing for session inside executions on its heap.
Value session_value(const std::shared_ptr<DebugSession>& session);
/// The session behind a ScriptableDebugger proxy, or null.
std::shared_ptr<DebugSession> session_of(lumen::Execution& exec, const Value& v);

/// The guest Breakpoint object for one of session's breakpoints.
Value breakpoint_value(const std::shared_ptr<DebugSession>& session, std::uint64_t id);

/// The frame behind a Context proxy (live or copied).
std::optional<FrameView> frame_of(lumen::Execution& exec, const Value& v);

/// Registers the ScriptableDebugger, Context, Breakpoint and DebuggerHit
/// primitives. Idempotent.
void install_primitives();

/// One row of the debugging API table with both of its bindings.
struct ApiRow {
    std::string group;
    std::string selector;        // as written in the table, e.g. "dbg stepUntil: aPredicate"
    std::string receiver_class;  // guest class answering it
    std::string script_selector;
    std::string host_operation;  // DebugSession (or FrameView / node) member
};
const std::vector<ApiRow>& api_table();

/// True when a send of selector to an instance of class_name resolves,
/// through either guest methods or primitives.
bool script_reachable(const std::string& class_name, const std::string& selector);

} // namespace sindarin::script
