#include "doctest.h"
#include "support.hpp"

using namespace ifsec;

namespace
{

// Two domains, H may not flow to L. `leak` copies h into l.
testing::table_system toy( bool leaky )
{
    testing::table_system t;
    t.vars = { "h", "l" };
    t.domains = { "H", "L" };
    t.policy = { { "H", "H" }, { "L", "L" }, { "L", "H" } };
    t.actions = { { "hset", "H" }, { "lread", "L" } };
    for ( const auto& v : testing::all_valuations( 2, 2 ) )
    {
        t.table[ { v, 0 } ] = { { 1, v[ 1 ] } };
        if ( leaky )
            t.table[ { v, 1 } ] = { { v[ 0 ], v[ 0 ] } };
        else
            t.table[ { v, 1 } ] = { { v[ 0 ], 1 - v[ 1 ] } };
    }
    t.visible[ "H" ] = { 0, 1 };
    t.visible[ "L" ] = { 1 };
    t.initial = { 0, 0 };
    return t;
}

scope_options scope( scope_kind kind, std::optional< std::size_t > depth = {} )
{
    scope_options o;
    o.kind = kind;
    o.depth = depth;
    return o;
}

} // namespace

TEST_CASE( "secure toy passes both conditions" )
{
    auto sys = toy( false ).build();
    auto r = check_unwinding( sys );
    CHECK( r.passed() );
    CHECK( r.scope.scope_states == 4 );
    auto u = check_unwinding( sys, scope( scope_kind::universe ) );
    CHECK( u.passed() );
    CHECK( u.scope.kind == scope_kind::universe );
}

TEST_CASE( "leaky toy fails step consistency with an exact witness" )
{
    auto sys = toy( true ).build();
    auto r = check_unwinding( sys );
    CHECK( !r.lr );
    REQUIRE( r.sc );
    // least witness: lread on h=0;l=0 vs h=1;l=0 for L
    CHECK( r.sc->action.to_string() == "lread" );
    CHECK( r.sc->domain == "L" );
    CHECK( r.sc->s1.serialize() == "h=0;l=0" );
    CHECK( r.sc->s2.serialize() == "h=1;l=0" );
    CHECK( r.sc->s1_next.serialize() == "h=0;l=0" );
    CHECK( r.sc->s2_next.serialize() == "h=1;l=1" );
    REQUIRE( r.sc->path2 );
    CHECK( r.sc->path2->size() == 1 );
    CHECK( r.sc->path2->at( 0 ).to_string() == "hset" );
}

TEST_CASE( "local respect witness for a high action writing low state" )
{
    auto t = toy( false );
    for ( const auto& v : testing::all_valuations( 2, 2 ) )
        t.table[ { v, 0 } ] = { { 1, 1 } };
    auto r = check_unwinding( t.build() );
    REQUIRE( r.lr );
    CHECK( r.lr->action.to_string() == "hset" );
    CHECK( r.lr->domain == "L" );
    CHECK( r.lr->s.serialize() == "h=0;l=0" );
    CHECK( r.lr->next.serialize() == "h=1;l=1" );
    REQUIRE( r.lr->path );
    CHECK( r.lr->path->empty() );
}

TEST_CASE( "disabled actions contribute no pairs" )
{
    auto t = toy( true );
    // lread disabled everywhere: nothing can leak
    for ( const auto& v : testing::all_valuations( 2, 2 ) )
        t.table.erase( { v, 1 } );
    auto r = check_unwinding( t.build() );
    CHECK( r.passed() );
    CHECK( r.scope.disabled_pairs == 2 );
}

TEST_CASE( "unwinding checks agree with the brute-force oracles" )
{
    std::mt19937 rng( 7 );
    int lr_fail = 0, sc_fail = 0;
    for ( int i = 0; i < 200; ++i )
    {
        auto t = testing::random_system( rng, 3, 3, 3, i % 2 ? 0.9 : 0.5 );
        auto sys = t.build();
        for ( auto kind : { scope_kind::reachable, scope_kind::universe } )
        {
            auto space = state_space::explore( sys, scope( kind ) );
            auto scope = kind == scope_kind::universe ? sys.machine().universe() : testing::reachable_states( sys );
            CHECK( space.scope().size() == scope.size() );
            const bool lr = testing::oracle_lr( sys, scope );
            const bool sc = testing::oracle_sc( sys, scope );
            CHECK( !check_lr( space ) == lr );
            CHECK( !check_sc( space ) == sc );
            lr_fail += !lr;
            sc_fail += !sc;
        }
    }
    // the generator must exercise both outcomes
    CHECK( lr_fail > 20 );
    CHECK( lr_fail < 380 );
    CHECK( sc_fail > 20 );
    CHECK( sc_fail < 380 );
}

TEST_CASE( "witnesses are genuine" )
{
    std::mt19937 rng( 11 );
    for ( int i = 0; i < 100; ++i )
    {
        auto sys = testing::random_system( rng ).build();
        const auto& cfg = sys.config();
        auto r = check_unwinding( sys );
        if ( r.lr )
        {
            const auto& w = *r.lr;
            CHECK( !cfg.allowed( cfg.dom( w.action ), w.domain ) );
            CHECK( !indist( cfg, w.domain, w.s, w.next ) );
            REQUIRE( w.path );
            auto at = run( sys, { sys.machine().initial() }, *w.path, step_semantics::raw );
            CHECK( std::find( at.begin(), at.end(), w.s ) != at.end() );
        }
        if ( r.sc )
        {
            const auto& w = *r.sc;
            CHECK( indist( cfg, w.domain, w.s1, w.s2 ) );
            CHECK( !indist( cfg, w.domain, w.s1_next, w.s2_next ) );
        }
    }
}

TEST_CASE( "depth bounds the reachable scope" )
{
    auto sys = toy( false ).build();
    CHECK( check_unwinding( sys, scope( scope_kind::reachable, 0 ) ).scope.scope_states == 1 );
    CHECK( check_unwinding( sys, scope( scope_kind::reachable, 1 ) ).scope.scope_states == 3 );
}
