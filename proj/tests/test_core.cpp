#include "doctest.h"
#include "support.hpp"

#include "ifsec/models.hpp"

using namespace ifsec;
using testing::table_system;

namespace
{

table_system two_bit()
{
    table_system t;
    t.vars = { "h", "l" };
    t.domains = { "H", "L" };
    t.policy = { { "H", "H" }, { "L", "L" }, { "L", "H" } };
    t.actions = { { "set", "H" }, { "copy", "L" } };
    for ( value h = 0; h < 2; ++h )
        for ( value l = 0; l < 2; ++l )
        {
            t.table[ { { h, l }, 0 } ] = { { 1, l } };
            if ( l == 0 )
                t.table[ { { h, l }, 1 } ] = { { h, 1 } };
        }
    t.visible = { { "H", { 0, 1 } }, { "L", { 1 } } };
    t.initial = { 0, 0 };
    return t;
}

} // namespace

TEST_CASE( "step_total stutters on a disabled action" )
{
    auto sys = two_bit().build();
    auto s = sys.machine().initial();
    s[ 1 ] = 1;
    CHECK( sys.machine().step( s, sys.machine().action_index( { "copy", {} } ) ).empty() );
    CHECK( step_total( sys, s, { "copy", {} } ) == std::vector< state >{ s } );
}

TEST_CASE( "step_total on an unknown action is a usage error" )
{
    auto sys = two_bit().build();
    CHECK_THROWS_AS( (void)step_total( sys, sys.machine().initial(), { "nope", {} } ), usage_error );
}

TEST_CASE( "run edge cases" )
{
    auto sys = two_bit().build();
    const auto s0 = sys.machine().initial();
    CHECK( run( sys, { s0 }, {} ) == std::vector< state >{ s0 } );
    std::vector< action_id > as{ { "set", {} }, { "copy", {} } };
    CHECK( run( sys, {}, as ).empty() );
    auto end = run( sys, { s0 }, as );
    REQUIRE( end.size() == 1 );
    CHECK( end[ 0 ].serialize() == "h=1;l=1" );
    // copy is disabled once l=1: raw runs die, stutter runs stay
    std::vector< action_id > twice{ { "copy", {} }, { "copy", {} } };
    CHECK( run( sys, { s0 }, twice, step_semantics::raw ).empty() );
    CHECK( run( sys, { s0 }, twice, step_semantics::stutter ).size() == 1 );
}

TEST_CASE( "run composes over concatenation" )
{
    std::mt19937 rng( 7 );
    for ( int round = 0; round < 60; ++round )
    {
        auto sys = testing::random_system( rng ).build();
        const auto& acts = sys.machine().actions();
        std::uniform_int_distribution< std::size_t > pick( 0, acts.size() - 1 ), len( 0, 4 );
        std::vector< action_id > as, bs;
        for ( auto n = len( rng ); n-- > 0; )
            as.push_back( acts[ pick( rng ) ] );
        for ( auto n = len( rng ); n-- > 0; )
            bs.push_back( acts[ pick( rng ) ] );
        auto all = as;
        all.insert( all.end(), bs.begin(), bs.end() );
        auto starts = sys.machine().universe();
        starts.resize( 3 );
        for ( auto sem : { step_semantics::raw, step_semantics::stutter } )
            CHECK( run( sys, starts, all, sem ) == run( sys, run( sys, starts, as, sem ), bs, sem ) );
    }
}

TEST_CASE( "indistinguishability is an equivalence on demo states" )
{
    auto b = models::build_demo();
    const auto& sys = b.pair.concrete;
    auto states = reachable( sys );
    std::mt19937 rng( 11 );
    std::uniform_int_distribution< std::size_t > pick( 0, states.size() - 1 );
    for ( const auto& d : sys.config().domains() )
        for ( int i = 0; i < 300; ++i )
        {
            const auto& x = states[ pick( rng ) ];
            const auto& y = states[ pick( rng ) ];
            const auto& z = states[ pick( rng ) ];
            CHECK( indist( sys.config(), d, x, x ) );
            CHECK( indist( sys.config(), d, x, y ) == indist( sys.config(), d, y, x ) );
            if ( indist( sys.config(), d, x, y ) && indist( sys.config(), d, y, z ) )
                CHECK( indist( sys.config(), d, x, z ) );
        }
}

TEST_CASE( "demo observations" )
{
    auto b = models::build_demo();
    const auto& sys = b.pair.abstract;
    const auto s = sys.machine().initial();
    auto t3_changed = s;
    t3_changed.set( "q.t3.que", seq::make( { 1 }, 1 ) );
    t3_changed.set( "q.t3.size", 1 );
    CHECK( indist( sys.config(), "t1", s, t3_changed ) );
    auto t2_changed = s;
    t2_changed.set( "q.t2.que", seq::make( { 1 }, 1 ) );
    CHECK_FALSE( indist( sys.config(), "t2", s, t2_changed ) );
    CHECK_THROWS_AS( (void)indist( sys.config(), "t9", s, s ), usage_error );
}

TEST_CASE( "equidom" )
{
    auto sys = two_bit().build();
    const auto s = sys.machine().initial();
    auto t = s;
    t[ 1 ] = 1;
    CHECK( equidom( sys.config(), "L", {}, { s, t } ) );
    CHECK( equidom( sys.config(), "L", { s }, { s } ) );
    CHECK_FALSE( equidom( sys.config(), "L", { s }, { t } ) );
    CHECK_FALSE( equidom( sys.config(), "L", { s, t }, { s } ) );
}

TEST_CASE( "reachable is bounded by depth and monotone" )
{
    auto b = models::build_auction();
    const auto& sys = b.pair.concrete;
    CHECK( reachable( sys, 0 ) == std::vector< state >{ sys.machine().initial() } );
    std::size_t previous = 0;
    for ( std::size_t d = 0; d < 12; ++d )
    {
        auto r = reachable( sys, d );
        CHECK( r.size() >= previous );
        previous = r.size();
    }
    auto all = reachable( sys );
    CHECK( all.size() == testing::reachable_states( sys ).size() );
    CHECK( reachable( sys, 1000 ).size() == all.size() );
    const bool closed = std::any_of( all.begin(), all.end(), []( const state& s ) { return s.get( "status" ) == 0; } );
    CHECK( closed );
    CHECK_THROWS_AS( (void)reachable( sys, {}, 5 ), budget_error );
}

TEST_CASE( "auction start moves READY to RUNNING with the reserve" )
{
    auto b = models::build_auction();
    const auto& sys = b.pair.abstract;
    const auto s0 = sys.machine().initial();
    CHECK( s0.serialize().find( "status=READY" ) != std::string::npos );
    auto next = step_total( sys, s0, { "auction/start.1/start", {} } );
    REQUIRE( next.size() == 1 );
    const auto text = next[ 0 ].serialize();
    CHECK( text.find( "status=RUNNING" ) != std::string::npos );
    CHECK( text.find( "reserve=1" ) != std::string::npos );
}

TEST_CASE( "sequence packing" )
{
    for ( value alphabet = 1; alphabet <= 3; ++alphabet )
        for ( auto s : seq::all( 3, alphabet ) )
        {
            auto elems = seq::elements( s, alphabet );
            CHECK( seq::make( elems, alphabet ) == s );
            CHECK( seq::length( s, alphabet ) == elems.size() );
            if ( !elems.empty() )
            {
                CHECK( seq::back( s, alphabet ) == elems.back() );
                auto shorter = elems;
                shorter.pop_back();
                CHECK( seq::pop_back( s, alphabet ) == seq::make( shorter, alphabet ) );
            }
        }
    CHECK( seq::all( 2, 2 ).size() == 7 );
}

TEST_CASE( "serialization is sorted and parses back" )
{
    auto b = models::build_arinc( models::default_arinc_config() );
    for ( const auto& sys : { b.pair.concrete, b.pair.abstract } )
        for ( const auto& s : reachable( sys ) )
        {
            const auto text = s.serialize();
            CHECK( parse_state( sys.machine().layout(), text ) == s );
        }
    auto s = b.pair.concrete.machine().initial().serialize();
    std::vector< std::string > names;
    std::size_t start = 0;
    while ( start < s.size() )
    {
        auto end = s.find( ';', start );
        if ( end == std::string::npos )
            end = s.size();
        names.push_back( s.substr( start, s.find( '=', start ) - start ) );
        start = end + 1;
    }
    CHECK( std::is_sorted( names.begin(), names.end() ) );
}

TEST_CASE( "configuration validation" )
{
    auto observe = []( const std::string&, const state& ) { return observation{}; };
    CHECK_THROWS_AS( info_flow_config( { "A" }, { { "A", "B" } }, {}, observe ), model_error );
    CHECK_THROWS_AS( info_flow_config( { "A", "A" }, {}, {}, observe ), model_error );
    info_flow_config cfg( { "B", "A" }, { { "A", "A" }, { "A", "B" } }, {}, observe );
    CHECK( cfg.domains() == std::vector< std::string >{ "A", "B" } );
    CHECK( cfg.missing_reflexive() == std::vector< std::string >{ "B" } );
    CHECK( cfg.allowed( "A", "B" ) );
    CHECK_FALSE( cfg.allowed( "B", "A" ) );
}

TEST_CASE( "action labels with payloads" )
{
    CHECK( parse_action( "send#3" ) == action_id{ "send", 3 } );
    CHECK( parse_action( "t1/recv/lock" ) == action_id{ "t1/recv/lock", std::nullopt } );
    CHECK( action_id{ "send", 3 }.to_string() == "send#3" );
    CHECK( action_id{ "a", std::nullopt } < action_id{ "a", 1 } );
}
