#include "ifsec/report.hpp"

namespace ifsec::report
{

namespace
{

json verdict( bool pass ) { return pass ? "pass" : "violation"; }

json check( const std::optional< sim_failure >& f )
{
    if ( !f )
        return { { "verdict", "pass" } };
    return { { "verdict", "violation" }, { "witness", to_json( *f ) } };
}

} // namespace

json to_json( const std::vector< action_id >& path )
{
    json out = json::array();
    for ( const auto& a : path )
        out.push_back( a.to_string() );
    return out;
}

json to_json( const std::vector< state >& states )
{
    json out = json::array();
    for ( const auto& s : states )
        out.push_back( s.serialize() );
    return out;
}

std::vector< action_id > path_from_json( const json& j )
{
    std::vector< action_id > out;
    for ( const auto& a : j )
        out.push_back( parse_action( a.get< std::string >() ) );
    return out;
}

json to_json( const scope_summary& scope )
{
    json out{ { "kind", scope.kind == scope_kind::universe ? "universe" : "reachable" },
              { "states", scope.scope_states },
              { "explored", scope.explored_states },
              { "disabled_pairs", scope.disabled_pairs },
              { "description", scope.describe() } };
    out[ "depth" ] = scope.depth ? json( *scope.depth ) : json();
    return out;
}

json to_json( const unwinding_report& report )
{
    json out{ { "scope", to_json( report.scope ) }, { "verdict", verdict( report.passed() ) } };
    if ( report.lr )
    {
        const auto& w = *report.lr;
        json witness{ { "action", w.action.to_string() },
                      { "domain", w.domain },
                      { "s", w.s.serialize() },
                      { "next", w.next.serialize() } };
        witness[ "path" ] = w.path ? to_json( *w.path ) : json();
        out[ "lr" ] = { { "verdict", "violation" }, { "witness", witness } };
    }
    else
        out[ "lr" ] = { { "verdict", "pass" } };
    if ( report.sc )
    {
        const auto& w = *report.sc;
        json witness{ { "action", w.action.to_string() },
                      { "domain", w.domain },
                      { "s1", w.s1.serialize() },
                      { "s2", w.s2.serialize() },
                      { "s1_next", w.s1_next.serialize() },
                      { "s2_next", w.s2_next.serialize() } };
        witness[ "path1" ] = w.path1 ? to_json( *w.path1 ) : json();
        witness[ "path2" ] = w.path2 ? to_json( *w.path2 ) : json();
        out[ "sc" ] = { { "verdict", "violation" }, { "witness", witness } };
    }
    else
        out[ "sc" ] = { { "verdict", "pass" } };
    return out;
}

json to_json( const ni_report& report )
{
    json out{ { "max_len", report.max_len },
              { "traces", report.traces },
              { "states", report.states },
              { "semantics", std::string( to_string( report.semantics ) ) },
              { "disabled_actions", report.stuttered },
              { "verdict", verdict( report.passed() ) } };
    if ( report.counterexample )
    {
        const auto& cx = *report.counterexample;
        out[ "witness" ] = { { "actions", to_json( cx.actions ) },
                             { "domain", cx.domain },
                             { "purged", to_json( cx.purged ) },
                             { "lhs", to_json( cx.lhs ) },
                             { "rhs", to_json( cx.rhs ) } };
    }
    return out;
}

json to_json( const sim_failure& f )
{
    json out{ { "condition", f.condition }, { "detail", f.detail }, { "path", to_json( f.path ) } };
    auto put = [ & ]( const char* key, const auto& field )
    {
        if ( field )
        {
            if constexpr ( std::is_same_v< std::decay_t< decltype( *field ) >, state > )
                out[ key ] = field->serialize();
            else
                out[ key ] = field->to_string();
        }
    };
    put( "action", f.action );
    put( "abstract_action", f.abstract_action );
    put( "concrete", f.concrete );
    put( "abstract", f.abstract );
    put( "concrete_next", f.concrete_next );
    put( "abstract_next", f.abstract_next );
    put( "other_concrete", f.other_concrete );
    put( "other_abstract", f.other_abstract );
    if ( !f.other_path.empty() || f.other_concrete )
        out[ "other_path" ] = to_json( f.other_path );
    if ( !f.component.empty() )
        out[ "component" ] = f.component;
    if ( !f.other_component.empty() )
        out[ "other_component" ] = f.other_component;
    if ( !f.domain.empty() )
        out[ "domain" ] = f.domain;
    return out;
}

json to_json( const simulation_report& report )
{
    json out{ { "pairs", report.pairs }, { "transitions", report.transitions }, { "alpha_scope", report.alpha_scope } };
    for ( int i = 0; i < 6; ++i )
        out[ "c" + std::to_string( i + 1 ) ] = check( report.c[ i ] );
    out[ "refinement" ] = verdict( report.refinement() );
    out[ "abstract_unwinding" ] = to_json( report.abstract_unwinding );
    out[ "concrete_unwinding" ] = to_json( report.concrete_unwinding );
    out[ "cross_check" ] = { { "alarm", report.alarm() },
                             { "claim", "refinement and abstract unwinding imply concrete unwinding" } };
    out[ "verdict" ] = verdict( report.passed() );
    return out;
}

json to_json( const compositional_report& report )
{
    json out{ { "pairs", report.pairs } };
    for ( int i = 0; i < 4; ++i )
        out[ "lemma" + std::to_string( i + 1 ) ] = check( report.lemma[ i ] );
    out[ "monolithic" ] = { { "c2", verdict( report.monolithic_c2 ) }, { "c3", verdict( report.monolithic_c3 ) } };
    out[ "cross_check" ] = { { "alarm", report.alarm() }, { "claim", "lemmas 1-4 imply conditions c2 and c3" } };
    out[ "verdict" ] = verdict( report.passed() );
    return out;
}

std::string dump( const json& j ) { return j.dump( 2 ) + "\n"; }

} // namespace ifsec::report
