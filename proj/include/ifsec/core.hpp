#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ifsec
{

using value = std::int64_t;

// Error categories. The CLI maps each onto its own exit code.
class usage_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class model_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class budget_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t default_state_budget = 2'000'000;
inline constexpr std::size_t default_trace_budget = 500'000;

enum class value_format
{
    integer,
    label,    // v prints as labels[v]
    sequence, // base-(n+1) digits, each digit e >= 1 prints as labels[e - 1]
};

struct variable
{
    std::string name;
    value_format format = value_format::integer;
    std::vector< std::string > labels;
};

class schema
{
    std::vector< variable > _vars;
    std::vector< std::size_t > _sorted; // variable indices ordered by name
    std::map< std::string, std::size_t, std::less<> > _index;

public:
    explicit schema( std::vector< variable > vars );

    [[nodiscard]] std::size_t size() const { return _vars.size(); }
    [[nodiscard]] const variable& at( std::size_t i ) const { return _vars.at( i ); }
    [[nodiscard]] const std::vector< variable >& variables() const { return _vars; }
    [[nodiscard]] std::optional< std::size_t > find( std::string_view name ) const;
    [[nodiscard]] std::size_t index( std::string_view name ) const;
    [[nodiscard]] std::span< const std::size_t > sorted_order() const { return _sorted; }
    [[nodiscard]] std::string format_value( std::size_t var, value v ) const;
    // Inverse of format_value; model_error on text it cannot produce.
    [[nodiscard]] value parse_value( std::size_t var, std::string_view text ) const;
};

using schema_ptr = std::shared_ptr< const schema >;

// A finite map from variable names to values. The layout is shared between
// all states of one machine; equality and hashing look at values only.
class state
{
    schema_ptr _layout;
    std::vector< value > _values;

public:
    state() = default;
    state( schema_ptr layout, std::vector< value > values );

    [[nodiscard]] value operator[]( std::size_t i ) const { return _values[ i ]; }
    value& operator[]( std::size_t i ) { return _values[ i ]; }
    [[nodiscard]] value get( std::string_view name ) const;
    void set( std::string_view name, value v );

    [[nodiscard]] const std::vector< value >& values() const { return _values; }
    [[nodiscard]] const schema_ptr& layout() const { return _layout; }

    // `var=value` pairs sorted by variable name, joined with `;`.
    [[nodiscard]] std::string serialize() const;

    friend bool operator==( const state& a, const state& b ) { return a._values == b._values; }
};

// Inverse of state::serialize over the given layout.
[[nodiscard]] state parse_state( const schema_ptr& layout, std::string_view text );

struct state_hash
{
    std::size_t operator()( const state& s ) const noexcept;
};

// Bounded message lists packed into one value.
namespace seq
{
[[nodiscard]] std::size_t length( value s, value alphabet );
[[nodiscard]] value at( value s, std::size_t i, value alphabet );
[[nodiscard]] value push_back( value s, value element, value alphabet );
[[nodiscard]] value pop_back( value s, value alphabet );
[[nodiscard]] value back( value s, value alphabet );
[[nodiscard]] value make( const std::vector< value >& elements, value alphabet );
[[nodiscard]] std::vector< value > elements( value s, value alphabet );
// Every sequence of length <= max_len, shortest first.
[[nodiscard]] std::vector< value > all( std::size_t max_len, value alphabet );
} // namespace seq

struct action_id
{
    std::string label;
    std::optional< value > payload;

    [[nodiscard]] std::string to_string() const;

    friend auto operator<=>( const action_id&, const action_id& ) = default;
    friend bool operator==( const action_id&, const action_id& ) = default;
};

[[nodiscard]] action_id parse_action( std::string_view text );

using step_function = std::function< std::vector< state >( const state&, std::size_t action ) >;
using universe_function = std::function< std::vector< state >() >;

class state_machine
{
    schema_ptr _layout;
    std::vector< action_id > _actions;
    std::map< action_id, std::size_t > _action_index;
    state _initial;
    step_function _step;
    universe_function _universe;

public:
    state_machine( schema_ptr layout, std::vector< action_id > actions, state initial, step_function step,
                   universe_function universe = {} );

    [[nodiscard]] const schema_ptr& layout() const { return _layout; }
    [[nodiscard]] const std::vector< action_id >& actions() const { return _actions; }
    [[nodiscard]] const state& initial() const { return _initial; }
    [[nodiscard]] std::optional< std::size_t > find_action( const action_id& a ) const;
    [[nodiscard]] std::size_t action_index( const action_id& a ) const;
    [[nodiscard]] bool has_universe() const { return static_cast< bool >( _universe ); }
    [[nodiscard]] std::vector< state > universe() const;

    // Raw step: empty when the action is not enabled. Results are
    // deduplicated and in canonical order.
    [[nodiscard]] std::vector< state > step( const state& s, std::size_t action ) const;
};

using observation = std::vector< value >;
using observe_function = std::function< observation( const std::string& domain, const state& ) >;

class info_flow_config
{
    std::vector< std::string > _domains;
    std::set< std::pair< std::string, std::string > > _policy;
    std::map< action_id, std::string > _dom;
    observe_function _observe;
    std::vector< std::vector< bool > > _allowed;

public:
    info_flow_config( std::vector< std::string > domains, std::set< std::pair< std::string, std::string > > policy,
                      std::map< action_id, std::string > dom, observe_function observe );

    [[nodiscard]] const std::vector< std::string >& domains() const { return _domains; }
    [[nodiscard]] const std::set< std::pair< std::string, std::string > >& policy() const { return _policy; }
    [[nodiscard]] const std::map< action_id, std::string >& dom_map() const { return _dom; }
    [[nodiscard]] const observe_function& observer() const { return _observe; }

    [[nodiscard]] std::optional< std::size_t > find_domain( std::string_view d ) const;
    [[nodiscard]] std::size_t domain_index( std::string_view d ) const;
    [[nodiscard]] bool allowed( std::size_t from, std::size_t to ) const { return _allowed[ from ][ to ]; }
    [[nodiscard]] bool allowed( std::string_view from, std::string_view to ) const;
    [[nodiscard]] const std::string& dom( const action_id& a ) const;
    [[nodiscard]] observation observe( std::string_view d, const state& s ) const;

    // Domains d for which d ~> d is absent.
    [[nodiscard]] std::vector< std::string > missing_reflexive() const;
};

class secure_system
{
    state_machine _machine;
    info_flow_config _config;
    std::vector< std::size_t > _action_domain;

public:
    secure_system( state_machine machine, info_flow_config config );

    [[nodiscard]] const state_machine& machine() const { return _machine; }
    [[nodiscard]] const info_flow_config& config() const { return _config; }
    [[nodiscard]] std::size_t action_domain( std::size_t action ) const { return _action_domain[ action ]; }
};

// raw: a disabled action has no successor, so runs through it are empty.
// stutter: a disabled action leaves the state unchanged.
enum class step_semantics
{
    raw,
    stutter,
};

[[nodiscard]] std::string_view to_string( step_semantics semantics );

// Disabled actions stutter so that runs are total.
[[nodiscard]] std::vector< state > step_total( const secure_system& sys, const state& s, const action_id& a );
[[nodiscard]] std::vector< state > run( const secure_system& sys, const std::vector< state >& starts,
                                        std::span< const action_id > actions,
                                        step_semantics semantics = step_semantics::stutter );
[[nodiscard]] bool indist( const info_flow_config& cfg, std::string_view d, const state& s1, const state& s2 );
[[nodiscard]] bool equidom( const info_flow_config& cfg, std::string_view d, const std::vector< state >& lhs,
                            const std::vector< state >& rhs );
[[nodiscard]] std::vector< state > reachable( const secure_system& sys, std::optional< std::size_t > depth = {},
                                              std::size_t budget = default_state_budget );

// Sorted by serialization, duplicates removed.
void canonicalize( std::vector< state >& states );

} // namespace ifsec
