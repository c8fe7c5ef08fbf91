#include "sindarin/scenarios.hpp"
#include "sindarin/script.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace sindarin;
using namespace sindarin::script;

namespace {

const char* const kTarget = R"(class Acc {
    fields total.
    method reset { total := 0 }
    method add: n { total := total + n. ^total }
}
| a |
a := Acc new.
a reset.
a add: 3.
a add: 4
)";

std::shared_ptr<DebugSession> open(const char* src = kTarget) { return DebugSession::debug(src); }

std::string eval(const std::shared_ptr<DebugSession>& s, const std::string& script) {
    return eval_script(s, script).print;
}

} // namespace

class Scenarios : public ::testing::TestWithParam<std::string> {};

TEST_P(Scenarios, PassesBothDrivers) {
    ScenarioReport r = run_scenario(GetParam());
    for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
    EXPECT_TRUE(r.passed) << r.render();
    EXPECT_FALSE(r.script_halts.empty());
}

INSTANTIATE_TEST_SUITE_P(All, Scenarios, ::testing::ValuesIn([] {
    std::vector<std::string> names;
    for (const auto& s : scenario_list()) names.push_back(s.name);
    return names;
}()), [](const auto& info) {
    std::string n = info.param;
    for (char& c : n)
        if (c == '-') c = '_';
    return n;
});

TEST(ScenarioList, HasTwelveDistinctEntries) {
    std::set<std::string> names;
    for (const auto& s : scenario_list()) names.insert(s.name);
    EXPECT_EQ(names.size(), 12u);
    try {
        scenario_info("no-such-scenario");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownScenario);
    }
}

TEST(Script, DbgIsBoundAndSteps) {
    auto s = open();
    EXPECT_EQ(eval(s, "dbg step. dbg messageSelector"), "#new");
    EXPECT_EQ(eval(s, "dbg stepOver. dbg stepOver. dbg stepOver. dbg stepOver. dbg currentNode isMessageNode"), "true");
    EXPECT_EQ(eval(s, "dbg messageSelector"), "#reset");
    EXPECT_EQ(s->message_selector(), "reset");
}

TEST(Script, HostErrorsBecomeDebuggerErrors) {
    auto s = open();
    EXPECT_EQ(eval(s, "[dbg messageSelector] on: DebuggerError do: [:e | e code]"), "#NotAtMessageSend");
    EXPECT_EQ(eval(s, "[dbg haltOnCall: 3] on: DebuggerError do: [:e | e code]"), "#NonWatchableValue");
}

TEST(Script, FailuresCarryTheScriptStack) {
    auto s = open();
    try {
        eval_script(s, "class T { method go { ^nil zork } }\nT new go");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ScriptFailed);
        EXPECT_NE(std::string(e.what()).find("zork"), std::string::npos) << e.what();
        EXPECT_NE(e.detail().find("T>>go"), std::string::npos) << e.detail();
    }
}

TEST(Script, BreakpointsWithActions) {
    auto s = open();
    std::string r = eval(s, R"(| bp seen |
seen := OrderedCollection new.
bp := dbg setBreakpointOn: (Acc >> #add:).
bp whenHit: [:d | seen add: d arguments first].
[dbg isExecutionFinished] whileFalse: [dbg continue].
seen)");
    EXPECT_EQ(r, "an OrderedCollection(3 4)");
    EXPECT_TRUE(s->is_execution_finished());
}

TEST(Script, ObjectCentricWatch) {
    auto s = open();
    std::string r = eval(s, R"(| acc |
dbg step. dbg step. dbg step.
acc := dbg temporaries first.
dbg haltOnWrite: acc field: #total.
dbg continue.
dbg continue.
dbg selector)");
    EXPECT_EQ(r, "#add:");
}

TEST(Script, VisitorOverTheCurrentNode) {
    auto s = open();
    std::string r = eval(s, R"(class V { fields n. method visitMessageNode: m { n := m selector } method n { ^n } }
| v |
dbg step.
v := V new.
dbg currentNode accept: v.
v n)");
    EXPECT_EQ(r, "#new");
}

TEST(ApiTable, EveryRowIsReachableFromScripts) {
    ASSERT_FALSE(api_table().empty());
    for (const auto& row : api_table())
        EXPECT_TRUE(script_reachable(row.receiver_class, row.script_selector)) << row.selector;
}
