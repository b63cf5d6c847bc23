#pragma once

#include "ifsec/core.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ifsec
{

using state_ref = std::uint32_t;

enum class scope_kind
{
    reachable,
    universe,
};

struct scope_options
{
    scope_kind kind = scope_kind::reachable;
    std::optional< std::size_t > depth;
    std::size_t budget = default_state_budget;
};

struct path_step
{
    std::size_t action;
    state_ref target;
};

// An explicitly enumerated fragment of a secure system: the scope states,
// their raw successors under every action, and interned observations.
// Successor targets outside the scope (the depth frontier) are stored but
// not expanded.
class state_space
{
    const secure_system* _sys = nullptr;
    scope_options _options;
    std::vector< state > _states;
    std::vector< std::string > _serialized;
    std::unordered_map< state, state_ref, state_hash > _index;
    struct parent_link
    {
        state_ref from;
        std::size_t action;
    };

    std::vector< std::vector< std::uint32_t > > _offsets; // per expanded state: begin per action, then end
    std::vector< state_ref > _succ;
    std::vector< state_ref > _scope;           // canonical order
    std::vector< std::uint32_t > _rank;
    std::vector< std::vector< std::uint32_t > > _obs; // [domain][state]
    std::vector< std::optional< parent_link > > _parent;
    std::size_t _disabled = 0;

    state_ref intern( const state& s );
    void expand( state_ref s );
    void finish();

public:
    static state_space explore( const secure_system& sys, const scope_options& options = {} );

    [[nodiscard]] const secure_system& system() const { return *_sys; }
    [[nodiscard]] const scope_options& options() const { return _options; }
    [[nodiscard]] std::size_t size() const { return _states.size(); }
    [[nodiscard]] const state& at( state_ref s ) const { return _states[ s ]; }
    [[nodiscard]] const std::string& serialized( state_ref s ) const { return _serialized[ s ]; }
    [[nodiscard]] std::optional< state_ref > find( const state& s ) const;
    [[nodiscard]] state_ref initial() const { return 0; }
    [[nodiscard]] bool expanded( state_ref s ) const { return !_offsets[ s ].empty(); }
    [[nodiscard]] std::span< const state_ref > successors( state_ref s, std::size_t action ) const;
    [[nodiscard]] std::span< const state_ref > scope() const { return _scope; }
    [[nodiscard]] std::uint32_t rank( state_ref s ) const { return _rank[ s ]; }
    [[nodiscard]] std::uint32_t obs( std::size_t domain, state_ref s ) const { return _obs[ domain ][ s ]; }
    [[nodiscard]] std::size_t disabled_pairs() const { return _disabled; }
    [[nodiscard]] std::size_t action_count() const { return _sys->machine().actions().size(); }

    // Shortest action path from the initial state, if the state is reachable.
    [[nodiscard]] std::optional< std::vector< path_step > > path_to( state_ref s ) const;
};

} // namespace ifsec
