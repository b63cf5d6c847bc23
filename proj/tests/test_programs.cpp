#include "doctest.h"
#include "support.hpp"

#include "ifsec/models.hpp"
#include "ifsec/programs.hpp"

using namespace ifsec;
using namespace ifsec::programs;

namespace
{

schema_ptr xyz()
{
    return std::make_shared< const schema >( std::vector< variable >{ { "x", value_format::integer, {} }, { "y", value_format::integer, {} }, { "z", value_format::integer, {} } } );
}

state zero() { return state( xyz(), { 0, 0, 0 } ); }

update assign( std::size_t var, value v )
{
    return [ = ]( state& s ) { s[ var ] = v; };
}

} // namespace

TEST_CASE( "basic and sequence steps" )
{
    auto p = sequence( { basic( "a", assign( 0, 1 ) ), basic( "b", assign( 1, 1 ) ) } );
    auto t = prog_step( p, zero() );
    REQUIRE( t.size() == 1 );
    CHECK( t[ 0 ].label == "a" );
    CHECK( t[ 0 ].post.serialize() == "x=1;y=0;z=0" );
    auto t2 = prog_step( t[ 0 ].rest, t[ 0 ].post );
    REQUIRE( t2.size() == 1 );
    CHECK( t2[ 0 ].label == "b" );
    CHECK( is_done( resolve( t2[ 0 ].rest, t2[ 0 ].post ) ) );
    CHECK( prog_step( done(), zero() ).empty() );
}

TEST_CASE( "conditional tests fuse into the next step" )
{
    auto p = cond( []( const state& s ) { return s[ 0 ] == 0; }, basic( "then", assign( 1, 1 ) ),
                   basic( "else", assign( 1, 2 ) ) );
    auto t = prog_step( p, zero() );
    REQUIRE( t.size() == 1 );
    CHECK( t[ 0 ].label == "then" );
    auto s = zero();
    s[ 0 ] = 1;
    t = prog_step( p, s );
    REQUIRE( t.size() == 1 );
    CHECK( t[ 0 ].label == "else" );
    CHECK( t[ 0 ].post[ 1 ] == 2 );
    // a false test with no else branch finishes without a step
    auto skip = cond( []( const state& ) { return false; }, basic( "never", assign( 0, 1 ) ) );
    CHECK( is_done( resolve( skip, zero() ) ) );
}

TEST_CASE( "await blocks until its test holds and runs its body atomically" )
{
    auto p = await( "wait", []( const state& s ) { return s[ 0 ] == 1; },
                    sequence( basic( "one", assign( 1, 1 ) ), basic( "two", assign( 2, 1 ) ) ) );
    CHECK( prog_step( p, zero() ).empty() );
    auto s = zero();
    s[ 0 ] = 1;
    auto t = prog_step( p, s );
    REQUIRE( t.size() == 1 );
    CHECK( t[ 0 ].label == "wait" );
    CHECK( t[ 0 ].post.serialize() == "x=1;y=1;z=1" );
}

TEST_CASE( "loops iterate up to their bound" )
{
    auto inc = basic( "inc", []( state& s ) { s[ 0 ] += 1; } );
    auto p = loop( []( const state& s ) { return s[ 0 ] < 2; }, inc, 5 );
    auto s = zero();
    std::vector< std::string > labels;
    auto rest = p;
    while ( true )
    {
        auto t = prog_step( rest, s );
        if ( t.empty() )
            break;
        labels.push_back( t[ 0 ].label );
        rest = t[ 0 ].rest;
        s = t[ 0 ].post;
    }
    CHECK( labels == std::vector< std::string >{ "inc", "inc" } );
    CHECK( s[ 0 ] == 2 );

    auto forever = loop( []( const state& ) { return true; }, inc, 2 );
    auto a = prog_step( forever, zero() );
    auto b = prog_step( a.at( 0 ).rest, a.at( 0 ).post );
    CHECK_THROWS_AS( (void)prog_step( b.at( 0 ).rest, b.at( 0 ).post ), model_error );
}

TEST_CASE( "atomic relations branch" )
{
    auto p = atomic( "pick",
                     []( const state& s )
                     {
                         auto a = s, b = s;
                         a[ 2 ] = 1;
                         b[ 2 ] = 2;
                         return std::vector< state >{ a, b };
                     } );
    auto t = prog_step( p, zero() );
    CHECK( t.size() == 2 );
    CHECK( step_labels( sequence( p, basic( "after", assign( 0, 1 ) ) ) ) ==
           std::vector< std::string >{ "pick", "after" } );
}

TEST_CASE( "compile interleaves components" )
{
    concurrent_system cs;
    cs.components = { "c1", "c2" };
    cs.initial = zero();
    cs.pool[ "c1" ].push_back( { "e1", {}, sequence( basic( "a", assign( 0, 1 ) ), basic( "b", assign( 1, 1 ) ) ), "D1" } );
    cs.pool[ "c2" ].push_back( { "e2", []( const state& s ) { return s[ 0 ] == 1; }, basic( "w", assign( 2, 1 ) ), "D2" } );
    domain_config cfg;
    cfg.domains = { "D1", "D2" };
    cfg.policy = { { "D1", "D1" }, { "D2", "D2" } };
    cfg.observe = []( const std::string& d, const state& s ) { return observation{ s[ d == "D1" ? 0 : 2 ] }; };
    auto sys = compile( cs, cfg );

    std::vector< std::string > labels;
    for ( const auto& a : sys.machine().actions() )
        labels.push_back( a.to_string() );
    CHECK( labels == std::vector< std::string >{ "c1/e1/a", "c1/e1/b", "c2/e2/w" } );
    CHECK( sys.config().dom( { "c2/e2/w", {} } ) == "D2" );
    CHECK( component_of( { "c2/e2/w", {} } ) == "c2" );
    CHECK( step_action_label( "k", "e", "s" ) == "k/e/s" );

    // By hand: (x, y, ctx.c1) takes 4 values, z is free once x = 1.
    auto states = testing::reachable_states( sys );
    CHECK( states.size() == 7 );
    for ( const auto& s : states )
    {
        CHECK( ( s.get( "z" ) == 0 || s.get( "x" ) == 1 ) );
        CHECK( s.serialize().find( "ctx.c1=" ) != std::string::npos );
    }
    // the guard is checked at invocation
    CHECK( sys.machine().step( sys.machine().initial(), 2 ).empty() );
}

TEST_CASE( "a demo send deposits the message in the receiver's queue" )
{
    auto b = models::build_demo();
    const auto& sys = b.pair.concrete;
    std::vector< action_id > send{ { "t1/send.t2.m1/lock", {} }, { "t1/send.t2.m1/write", {} }, { "t1/send.t2.m1/unlock", {} } };
    auto end = run( sys, { sys.machine().initial() }, send, step_semantics::raw );
    REQUIRE( end.size() == 1 );
    const auto& s = end[ 0 ];
    CHECK( seq::elements( s.get( "q.t2.que" ), 1 ) == std::vector< value >{ 1 } );
    CHECK( s.get( "q.t2.que" ) == s.get( "q.t2.obq" ) );
    CHECK( s.get( "q.t2.l" ) == 0 );
    // mid-send the observation lags behind the queue
    auto mid = run( sys, { sys.machine().initial() }, std::span( send ).first( 2 ), step_semantics::raw );
    REQUIRE( mid.size() == 1 );
    CHECK( mid[ 0 ].get( "q.t2.obq" ) == 0 );
    CHECK( mid[ 0 ].get( "q.t2.size" ) == 1 );
}

TEST_CASE( "compile refuses to exceed its budget" )
{
    concurrent_system cs;
    cs.components = { "c" };
    cs.initial = zero();
    cs.pool[ "c" ].push_back( { "bump", {}, basic( "inc", []( state& s ) { s[ 0 ] += 1; } ), "D" } );
    domain_config cfg;
    cfg.domains = { "D" };
    cfg.policy = { { "D", "D" } };
    cfg.observe = []( const std::string&, const state& s ) { return observation{ s[ 0 ] }; };
    CHECK_THROWS_AS( (void)compile( cs, cfg, 50 ), budget_error );
}
