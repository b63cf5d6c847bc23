#pragma once

#include "ifsec/core.hpp"

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

// Handler programs with atomic steps, and their compilation into an explicit
// interleaving state machine.
namespace ifsec::programs
{

using predicate = std::function< bool( const state& ) >;
using update = std::function< void( state& ) >;
using relation = std::function< std::vector< state >( const state& ) >;

struct prog_node;
using prog = std::shared_ptr< const prog_node >;

[[nodiscard]] prog done();
[[nodiscard]] prog basic( std::string label, update f );
[[nodiscard]] prog atomic( std::string label, relation r );
[[nodiscard]] prog sequence( prog first, prog rest );
[[nodiscard]] prog sequence( std::vector< prog > parts );
[[nodiscard]] prog cond( predicate test, prog then, prog otherwise = done() );
[[nodiscard]] prog loop( predicate test, prog body, std::size_t bound );
// Runs `body` to completion as one step once `test` holds; not enabled before.
[[nodiscard]] prog await( std::string label, predicate test, prog body );

[[nodiscard]] bool is_done( const prog& p );

// Resolves the control prefix (conditionals, loop tests) against `s` until
// the head is an atomic step or the program is finished.
[[nodiscard]] prog resolve( const prog& p, const state& s );

struct prog_transition
{
    prog rest;
    state post;
    std::string label;
};

// One labeled atomic reduction. Control tests in front of the step are
// evaluated in the pre-state and consumed with it. A blocked await yields no
// transitions. Exhausted loop bounds raise model_error.
[[nodiscard]] std::vector< prog_transition > prog_step( const prog& p, const state& s );

// Step labels of all atomic steps syntactically contained in `p`.
[[nodiscard]] std::vector< std::string > step_labels( const prog& p );

struct event
{
    std::string label;
    predicate guard;
    prog body;
    std::string domain;
};

struct concurrent_system
{
    std::vector< std::string > components;
    std::map< std::string, std::vector< event > > pool;
    state initial; // shared variables only
};

struct domain_config
{
    std::vector< std::string > domains;
    std::set< std::pair< std::string, std::string > > policy;
    observe_function observe; // reads shared variables by index
};

// `<component>/<event-label>/<step-label>`
[[nodiscard]] std::string step_action_label( const std::string& component, const std::string& event,
                                             const std::string& step );
[[nodiscard]] std::string component_of( const action_id& a );

// Explicit product machine over shared state and per-component contexts.
// Context variables `ctx.<component>` are appended after the shared ones.
[[nodiscard]] secure_system compile( const concurrent_system& cs, const domain_config& cfg,
                                     std::size_t budget = default_state_budget );

} // namespace ifsec::programs
