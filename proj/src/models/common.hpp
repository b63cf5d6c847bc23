#pragma once

#include "ifsec/programs.hpp"
#include "ifsec/refinement.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ifsec::models::detail
{

class layout_builder
{
    std::vector< variable > _vars;
    std::vector< std::vector< value > > _domains;

public:
    std::size_t add( std::string name, value_format format, std::vector< std::string > labels,
                     std::vector< value > domain )
    {
        _vars.push_back( { std::move( name ), format, std::move( labels ) } );
        _domains.push_back( std::move( domain ) );
        return _vars.size() - 1;
    }
    std::size_t integer( std::string name, value lo, value hi )
    {
        std::vector< value > domain;
        for ( value v = lo; v <= hi; ++v )
            domain.push_back( v );
        return add( std::move( name ), value_format::integer, {}, std::move( domain ) );
    }
    std::size_t label( std::string name, std::vector< std::string > labels )
    {
        std::vector< value > domain;
        for ( std::size_t v = 0; v < labels.size(); ++v )
            domain.push_back( static_cast< value >( v ) );
        return add( std::move( name ), value_format::label, std::move( labels ), std::move( domain ) );
    }
    std::size_t sequence( std::string name, std::vector< std::string > alphabet, std::size_t max_len )
    {
        auto domain = seq::all( max_len, static_cast< value >( alphabet.size() ) );
        return add( std::move( name ), value_format::sequence, std::move( alphabet ), std::move( domain ) );
    }

    [[nodiscard]] schema_ptr build() const { return std::make_shared< const schema >( _vars ); }
    [[nodiscard]] const std::vector< std::vector< value > >& domains() const { return _domains; }
};

// States differing from `s` in exactly one of the first domains.size()
// variables; a finite sample of any relation over shared variables.
inline std::vector< state > perturbations( const state& s, const std::vector< std::vector< value > >& domains )
{
    std::vector< state > out;
    for ( std::size_t i = 0; i < domains.size(); ++i )
        for ( auto v : domains[ i ] )
            if ( v != s[ i ] )
            {
                auto t = s;
                t[ i ] = v;
                out.push_back( std::move( t ) );
            }
    return out;
}

inline std::vector< std::string > numbered( const std::string& prefix, std::size_t n )
{
    std::vector< std::string > out;
    for ( std::size_t i = 1; i <= n; ++i )
        out.push_back( prefix + std::to_string( i ) );
    return out;
}

// Actions shared verbatim by both levels map to themselves; the step named
// `linearization` maps to the abstract event's only step; the rest are silent.
inline step_map map_steps( const secure_system& concrete, const secure_system& abstract,
                           const std::string& linearization,
                           const std::function< std::string( const std::string& event ) >& abstract_step )
{
    step_map zeta;
    for ( const auto& a : concrete.machine().actions() )
    {
        const auto cut = a.label.rfind( '/' );
        const auto prefix = a.label.substr( 0, cut );
        std::optional< action_id > target;
        if ( abstract.machine().find_action( a ) )
            target = a;
        else if ( a.label.substr( cut + 1 ) == linearization )
        {
            const auto event = prefix.substr( prefix.find( '/' ) + 1 );
            target = action_id{ prefix + "/" + abstract_step( event ), std::nullopt };
        }
        zeta.set( a, target );
    }
    return zeta;
}

} // namespace ifsec::models::detail
