#pragma once

#include "ifsec/unwinding.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ifsec
{

using trace = std::vector< action_id >;

[[nodiscard]] std::set< std::string > sources( const trace& as, const std::string& d, const info_flow_config& cfg );
[[nodiscard]] trace ipurge( const trace& as, const std::string& d, const info_flow_config& cfg );

struct ni_counterexample
{
    trace actions;
    std::string domain;
    trace purged;
    std::vector< state > lhs; // run({s0}, actions)
    std::vector< state > rhs; // run({s0}, purged)
};

struct ni_options
{
    std::size_t max_len = 4;
    std::vector< std::string > domains; // empty: all
    std::size_t trace_budget = default_trace_budget;
    std::size_t state_budget = default_state_budget;
    step_semantics semantics = step_semantics::raw;
};

struct ni_report
{
    std::size_t max_len = 0;
    std::size_t traces = 0;
    std::size_t states = 0;
    step_semantics semantics = step_semantics::raw;
    bool stuttered = false; // some run took a disabled action
    std::optional< ni_counterexample > counterexample;

    [[nodiscard]] bool passed() const { return !counterexample; }
};

// Every trace up to max_len, shortest first then lexicographic in action
// order, against every selected domain in name order.
[[nodiscard]] ni_report check_ni( const secure_system& sys, const ni_options& options = {} );

struct theorem_report
{
    unwinding_report unwinding;
    ni_report ni;

    // Unwinding passed but NI failed: the implementation is broken.
    [[nodiscard]] bool alarm() const { return unwinding.passed() && !ni.passed(); }
};

[[nodiscard]] theorem_report validate_unwinding_theorem( const secure_system& sys, const ni_options& options = {},
                                                         const scope_options& scope = {} );

} // namespace ifsec
