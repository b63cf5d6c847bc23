#pragma once

#include "ifsec/unwinding.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ifsec
{

// Concrete action to abstract action; std::nullopt is the silent step.
class step_map
{
    std::map< action_id, std::optional< action_id > > _map;

public:
    step_map() = default;
    explicit step_map( std::map< action_id, std::optional< action_id > > map ) : _map{ std::move( map ) } {}

    void set( const action_id& concrete, std::optional< action_id > abstract ) { _map[ concrete ] = std::move( abstract ); }
    [[nodiscard]] const std::map< action_id, std::optional< action_id > >& entries() const { return _map; }
    [[nodiscard]] bool contains( const action_id& a ) const { return _map.contains( a ); }
    [[nodiscard]] const std::optional< action_id >& operator()( const action_id& a ) const;
};

using alpha_relation = std::function< bool( const state& concrete, const state& abstract ) >;

struct refinement_pair
{
    secure_system concrete;
    secure_system abstract;
    alpha_relation alpha;
    step_map zeta;
};

// A relation over the states of one level. `successors` optionally
// enumerates {s' | (s, s') in R}; `universal` marks the total relation.
struct state_relation
{
    std::function< bool( const state&, const state& ) > contains;
    std::function< std::vector< state >( const state& ) > successors;
    bool universal = false;

    [[nodiscard]] static state_relation any();
    [[nodiscard]] static state_relation identity();
    [[nodiscard]] bool operator()( const state& s, const state& t ) const { return universal || contains( s, t ); }
};

struct component_rg
{
    state_relation rely;
    state_relation guarantee;
    state_relation abstract_rely;
    state_relation abstract_guarantee;
};

struct rely_guarantee_spec
{
    std::map< std::string, component_rg > components;
    std::function< std::string( const action_id& ) > component_of;
};

// Failure of one simulation condition or lemma: the concrete path reaching
// the offending pair, the step taken and the states involved.
struct sim_failure
{
    std::string condition;
    std::string detail;
    std::vector< action_id > path;
    std::optional< action_id > action;
    std::optional< action_id > abstract_action;
    std::optional< state > concrete;
    std::optional< state > abstract;
    std::optional< state > concrete_next;
    std::optional< state > abstract_next;
    // second related pair, for the indistinguishability condition
    std::optional< state > other_concrete;
    std::optional< state > other_abstract;
    std::vector< action_id > other_path;
    std::string component;
    std::string other_component; // lemma4: the component whose rely is violated
    std::string domain;
};

struct joint_transition
{
    std::uint32_t from;                 // pair index
    std::size_t action;                 // concrete action index
    std::uint32_t concrete_next;        // concrete state index
    std::optional< std::size_t > mapped; // abstract action index
    std::optional< std::uint32_t > abstract_next;
    std::optional< std::uint32_t > to; // pair index when the step was matched
};

struct joint_result
{
    std::vector< state > concrete_states;
    std::vector< state > abstract_states;
    std::vector< std::pair< std::uint32_t, std::uint32_t > > pairs;
    std::vector< std::optional< std::pair< std::uint32_t, std::size_t > > > parent; // (pair, transition)
    std::vector< joint_transition > transitions;

    std::optional< sim_failure > c1;
    std::optional< sim_failure > c2;
    std::optional< sim_failure > c3;

    [[nodiscard]] std::vector< action_id > path_to( const refinement_pair& pair, std::uint32_t p ) const;
};

[[nodiscard]] joint_result joint_explore( const refinement_pair& pair, std::size_t budget = default_state_budget );

[[nodiscard]] std::optional< sim_failure > check_domain_preservation( const refinement_pair& pair );
[[nodiscard]] std::optional< sim_failure > check_policy_inclusion( const refinement_pair& pair );
// Over the discovered pairs, or over every alpha-related pair of the two
// declared universes when `universe` is set.
[[nodiscard]] std::optional< sim_failure > check_alpha_preserves_indist( const refinement_pair& pair,
                                                                         const joint_result& joint,
                                                                         bool universe = false );

struct simulation_options
{
    std::size_t budget = default_state_budget;
    bool universe = false;
};

struct simulation_report
{
    std::size_t pairs = 0;
    std::size_t transitions = 0;
    std::string alpha_scope;
    std::optional< sim_failure > c[ 6 ]; // c1..c6
    unwinding_report abstract_unwinding;
    unwinding_report concrete_unwinding;

    [[nodiscard]] bool refinement() const;
    // Refinement and abstract unwinding hold but concrete unwinding fails.
    [[nodiscard]] bool alarm() const
    {
        return refinement() && abstract_unwinding.passed() && !concrete_unwinding.passed();
    }
    [[nodiscard]] bool passed() const
    {
        return refinement() && abstract_unwinding.passed() && concrete_unwinding.passed();
    }
};

[[nodiscard]] simulation_report check_simulation( const refinement_pair& pair, const simulation_options& options = {} );

struct compositional_report
{
    std::size_t pairs = 0;
    std::optional< sim_failure > lemma[ 4 ];
    bool monolithic_c2 = true;
    bool monolithic_c3 = true;

    [[nodiscard]] bool passed() const { return !lemma[ 0 ] && !lemma[ 1 ] && !lemma[ 2 ] && !lemma[ 3 ]; }
    // Lemmas all pass but the monolithic exploration disagrees.
    [[nodiscard]] bool alarm() const { return passed() && !( monolithic_c2 && monolithic_c3 ); }
};

[[nodiscard]] compositional_report check_compositional( const refinement_pair& pair, const rely_guarantee_spec& rg,
                                                        std::size_t budget = default_state_budget );

} // namespace ifsec
