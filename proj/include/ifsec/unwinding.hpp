#pragma once

#include "ifsec/state_space.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ifsec
{

// Step `action` taken from `from`, and the shortest action path reaching
// `from` when one is known (absent for unreachable universe states).
struct lr_witness
{
    action_id action;
    std::string domain;
    state s;
    state next;
    std::optional< std::vector< action_id > > path;
};

struct sc_witness
{
    action_id action;
    std::string domain;
    state s1;
    state s2;
    state s1_next;
    state s2_next;
    std::optional< std::vector< action_id > > path1;
    std::optional< std::vector< action_id > > path2;
};

struct scope_summary
{
    scope_kind kind = scope_kind::reachable;
    std::optional< std::size_t > depth;
    std::size_t scope_states = 0;
    std::size_t explored_states = 0;
    std::size_t disabled_pairs = 0;

    [[nodiscard]] std::string describe() const;
};

struct unwinding_report
{
    scope_summary scope;
    std::optional< lr_witness > lr;
    std::optional< sc_witness > sc;

    [[nodiscard]] bool passed() const { return !lr && !sc; }
};

[[nodiscard]] scope_summary summarize( const state_space& space );
[[nodiscard]] std::optional< std::vector< action_id > > action_path( const state_space& space, state_ref s );

// Both checks quantify over the scope states and their raw successors; a
// disabled action contributes no pairs. Witnesses are least under
// (action, domain, serialized states).
[[nodiscard]] std::optional< lr_witness > check_lr( const state_space& space );
[[nodiscard]] std::optional< sc_witness > check_sc( const state_space& space );
[[nodiscard]] unwinding_report check_unwinding( const state_space& space );
[[nodiscard]] unwinding_report check_unwinding( const secure_system& sys, const scope_options& options = {} );

} // namespace ifsec
