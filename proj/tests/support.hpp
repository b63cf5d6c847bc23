#pragma once

#include "ifsec/noninterference.hpp"
#include "ifsec/refinement.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>

namespace testing
{

using namespace ifsec;

// Small explicit machine: variables over 0..range-1, one table of successor
// lists per action. A missing entry means the action is disabled there.
struct table_system
{
    std::vector< std::string > vars;
    value range = 2;
    std::vector< std::string > domains;
    std::set< std::pair< std::string, std::string > > policy;
    std::vector< std::pair< std::string, std::string > > actions; // label, domain
    std::map< std::pair< std::vector< value >, std::size_t >, std::vector< std::vector< value > > > table;
    std::map< std::string, std::vector< std::size_t > > visible;
    std::vector< value > initial;

    schema_ptr layout() const
    {
        std::vector< variable > v;
        for ( const auto& n : vars )
            v.push_back( { n, value_format::integer, {} } );
        return std::make_shared< const schema >( v );
    }

    secure_system build() const
    {
        auto L = layout();
        std::vector< action_id > ids;
        std::map< action_id, std::string > dom;
        for ( const auto& [ l, d ] : actions )
        {
            ids.push_back( { l, std::nullopt } );
            dom.emplace( action_id{ l, std::nullopt }, d );
        }
        // The machine sorts its actions; map sorted index back to ours.
        auto sorted = ids;
        std::sort( sorted.begin(), sorted.end() );
        std::vector< std::size_t > original;
        for ( const auto& a : sorted )
            original.push_back( static_cast< std::size_t >( std::find( ids.begin(), ids.end(), a ) - ids.begin() ) );
        auto t = table;
        auto step = [ t, L, original ]( const state& s, std::size_t a )
        {
            std::vector< state > out;
            auto it = t.find( { s.values(), original[ a ] } );
            if ( it != t.end() )
                for ( const auto& v : it->second )
                    out.emplace_back( L, v );
            return out;
        };
        const auto vars_n = vars.size();
        const auto r = range;
        auto universe = [ L, vars_n, r ]()
        {
            std::vector< state > out;
            std::vector< value > v( vars_n, 0 );
            while ( true )
            {
                out.emplace_back( L, v );
                std::size_t i = 0;
                while ( i < vars_n && ++v[ i ] == r )
                    v[ i++ ] = 0;
                if ( i == vars_n )
                    break;
            }
            return out;
        };
        auto vis = visible;
        auto observe = [ vis ]( const std::string& d, const state& s )
        {
            observation o;
            if ( auto it = vis.find( d ); it != vis.end() )
                for ( auto i : it->second )
                    o.push_back( s[ i ] );
            return o;
        };
        return { state_machine( L, ids, state( L, initial ), step, universe ),
                 info_flow_config( domains, policy, dom, observe ) };
    }
};

inline std::vector< std::vector< value > > all_valuations( std::size_t n, value range )
{
    std::vector< std::vector< value > > out{ {} };
    for ( std::size_t i = 0; i < n; ++i )
    {
        std::vector< std::vector< value > > next;
        for ( const auto& v : out )
            for ( value x = 0; x < range; ++x )
            {
                next.push_back( v );
                next.back().push_back( x );
            }
        out = std::move( next );
    }
    return out;
}

// Random reflexive policy over `n` domains named d0..d(n-1).
inline std::set< std::pair< std::string, std::string > > random_policy( std::mt19937& rng, std::size_t n,
                                                                         double density = 0.35 )
{
    std::bernoulli_distribution edge( density );
    std::set< std::pair< std::string, std::string > > out;
    for ( std::size_t i = 0; i < n; ++i )
        for ( std::size_t j = 0; j < n; ++j )
            if ( i == j || edge( rng ) )
                out.emplace( "d" + std::to_string( i ), "d" + std::to_string( j ) );
    return out;
}

inline table_system random_system( std::mt19937& rng, std::size_t n_vars = 3, std::size_t n_domains = 3,
                                   std::size_t n_actions = 3, double enabled = 0.7 )
{
    table_system t;
    for ( std::size_t i = 0; i < n_vars; ++i )
        t.vars.push_back( "v" + std::to_string( i ) );
    for ( std::size_t i = 0; i < n_domains; ++i )
        t.domains.push_back( "d" + std::to_string( i ) );
    t.policy = random_policy( rng, n_domains );
    std::uniform_int_distribution< std::size_t > pick_domain( 0, n_domains - 1 );
    std::uniform_int_distribution< std::size_t > pick_var( 0, n_vars - 1 );
    std::uniform_int_distribution< value > pick_value( 0, t.range - 1 );
    std::bernoulli_distribution on( enabled ), branch( 0.15 );
    for ( std::size_t a = 0; a < n_actions; ++a )
        t.actions.emplace_back( "a" + std::to_string( a ), t.domains[ pick_domain( rng ) ] );
    for ( const auto& v : all_valuations( n_vars, t.range ) )
        for ( std::size_t a = 0; a < n_actions; ++a )
        {
            if ( !on( rng ) )
                continue;
            auto& succ = t.table[ { v, a } ];
            do
            {
                auto n = v;
                n[ pick_var( rng ) ] = pick_value( rng );
                succ.push_back( n );
            } while ( branch( rng ) );
        }
    // each domain sees one or two variables
    for ( const auto& d : t.domains )
    {
        t.visible[ d ].push_back( pick_var( rng ) );
        if ( on( rng ) )
            t.visible[ d ].push_back( pick_var( rng ) );
    }
    t.initial.assign( n_vars, 0 );
    return t;
}

inline ni_options max_len( std::size_t n )
{
    ni_options o;
    o.max_len = n;
    return o;
}

// -- oracles, written straight from the definitions ---------------------------

inline std::set< std::string > oracle_sources( const std::vector< std::string >& doms, std::size_t from,
                                               const std::string& d,
                                               const std::set< std::pair< std::string, std::string > >& policy )
{
    if ( from == doms.size() )
        return { d };
    auto rest = oracle_sources( doms, from + 1, d, policy );
    auto out = rest;
    for ( const auto& v : rest )
        if ( policy.contains( { doms[ from ], v } ) )
            out.insert( doms[ from ] );
    return out;
}

inline std::vector< std::size_t > oracle_ipurge( const std::vector< std::string >& doms, std::size_t from,
                                                 const std::string& d,
                                                 const std::set< std::pair< std::string, std::string > >& policy )
{
    if ( from == doms.size() )
        return {};
    auto rest = oracle_ipurge( doms, from + 1, d, policy );
    if ( oracle_sources( doms, from, d, policy ).contains( doms[ from ] ) )
        rest.insert( rest.begin(), from );
    return rest;
}

inline std::vector< state > reachable_states( const secure_system& sys )
{
    std::vector< state > seen{ sys.machine().initial() };
    for ( std::size_t i = 0; i < seen.size(); ++i )
        for ( std::size_t a = 0; a < sys.machine().actions().size(); ++a )
            for ( const auto& n : sys.machine().step( seen[ i ], a ) )
                if ( std::find( seen.begin(), seen.end(), n ) == seen.end() )
                    seen.push_back( n );
    return seen;
}

inline bool oracle_lr( const secure_system& sys, const std::vector< state >& scope )
{
    const auto& cfg = sys.config();
    for ( const auto& s : scope )
        for ( std::size_t a = 0; a < sys.machine().actions().size(); ++a )
            for ( const auto& n : sys.machine().step( s, a ) )
                for ( const auto& d : cfg.domains() )
                    if ( !cfg.allowed( cfg.dom( sys.machine().actions()[ a ] ), d ) && !indist( cfg, d, s, n ) )
                        return false;
    return true;
}

inline bool oracle_sc( const secure_system& sys, const std::vector< state >& scope )
{
    const auto& cfg = sys.config();
    for ( const auto& s1 : scope )
        for ( const auto& s2 : scope )
            for ( std::size_t a = 0; a < sys.machine().actions().size(); ++a )
            {
                const auto& u = cfg.dom( sys.machine().actions()[ a ] );
                for ( const auto& d : cfg.domains() )
                {
                    if ( !indist( cfg, d, s1, s2 ) )
                        continue;
                    if ( cfg.allowed( u, d ) && !indist( cfg, u, s1, s2 ) )
                        continue;
                    for ( const auto& n1 : sys.machine().step( s1, a ) )
                        for ( const auto& n2 : sys.machine().step( s2, a ) )
                            if ( !indist( cfg, d, n1, n2 ) )
                                return false;
                }
            }
    return true;
}

// Every trace up to max_len, raw runs, brute force.
inline bool oracle_ni( const secure_system& sys, std::size_t max_len,
                       step_semantics semantics = step_semantics::raw )
{
    const auto& acts = sys.machine().actions();
    const auto& cfg = sys.config();
    std::vector< std::vector< action_id > > level{ {} };
    for ( std::size_t k = 0; k <= max_len; ++k )
    {
        for ( const auto& as : level )
            for ( const auto& d : cfg.domains() )
            {
                std::vector< std::string > doms;
                for ( const auto& a : as )
                    doms.push_back( cfg.dom( a ) );
                std::vector< action_id > purged;
                for ( auto i : oracle_ipurge( doms, 0, d, cfg.policy() ) )
                    purged.push_back( as[ i ] );
                const auto lhs = run( sys, { sys.machine().initial() }, as, semantics );
                const auto rhs = run( sys, { sys.machine().initial() }, purged, semantics );
                if ( !equidom( cfg, d, lhs, rhs ) )
                    return false;
            }
        std::vector< std::vector< action_id > > next;
        for ( const auto& as : level )
            for ( const auto& a : acts )
            {
                next.push_back( as );
                next.back().push_back( a );
            }
        level = std::move( next );
    }
    return true;
}

// Random (policy, trace, domain) triples against the purge oracles and the
// algebraic laws. Returns a description of the first failure.
inline std::optional< std::string > purge_algebra( std::size_t triples, unsigned seed = 1 )
{
    std::mt19937 rng( seed );
    std::uniform_int_distribution< std::size_t > n_dom( 1, 5 ), len( 0, 8 );
    for ( std::size_t i = 0; i < triples; ++i )
    {
        const auto n = n_dom( rng );
        std::vector< std::string > domains;
        for ( std::size_t k = 0; k < n; ++k )
            domains.push_back( "d" + std::to_string( k ) );
        const bool total = i % 10 == 0;
        auto policy = random_policy( rng, n, total ? 1.0 : 0.3 );
        std::map< action_id, std::string > dom;
        std::vector< action_id > acts;
        for ( std::size_t k = 0; k < n + 1; ++k )
        {
            acts.push_back( { "a" + std::to_string( k ), std::nullopt } );
            dom.emplace( acts.back(), domains[ k % n ] );
        }
        info_flow_config cfg( domains, policy, dom, []( const std::string&, const state& ) { return observation{}; } );
        std::uniform_int_distribution< std::size_t > pick_act( 0, acts.size() - 1 ), pick_dom( 0, n - 1 );
        trace as;
        for ( std::size_t k = len( rng ); k > 0; --k )
            as.push_back( acts[ pick_act( rng ) ] );
        const auto& d = domains[ pick_dom( rng ) ];

        std::vector< std::string > doms;
        for ( const auto& a : as )
            doms.push_back( cfg.dom( a ) );
        const auto tag = "triple " + std::to_string( i ) + ": ";
        const auto src = sources( as, d, cfg );
        if ( src != oracle_sources( doms, 0, d, policy ) )
            return tag + "sources differs from oracle";
        if ( !src.contains( d ) )
            return tag + "d not in sources";
        const auto purged = ipurge( as, d, cfg );
        trace expect;
        for ( auto k : oracle_ipurge( doms, 0, d, policy ) )
            expect.push_back( as[ k ] );
        if ( purged != expect )
            return tag + "ipurge differs from oracle";
        if ( !as.empty() )
        {
            const trace tail( as.begin() + 1, as.end() );
            const auto smaller = sources( tail, d, cfg );
            if ( !std::includes( src.begin(), src.end(), smaller.begin(), smaller.end() ) )
                return tag + "sources not monotone under prefixing";
        }
        std::size_t at = 0;
        for ( const auto& a : as )
            if ( at < purged.size() && purged[ at ] == a )
                ++at;
        if ( at != purged.size() )
            return tag + "ipurge is not a subsequence";
        if ( ipurge( purged, d, cfg ) != purged )
            return tag + "ipurge is not idempotent";
        if ( total && purged != as )
            return tag + "ipurge under a total policy is not the identity";
    }
    return std::nullopt;
}

} // namespace testing
