#include "doctest.h"
#include "support.hpp"

#include "ifsec/models.hpp"

#include <charconv>

using namespace ifsec;

namespace
{

int amount( const std::string& bid ) // "user.1:2" -> 2
{
    int v = 0;
    auto c = bid.rfind( ':' );
    std::from_chars( bid.data() + c + 1, bid.data() + bid.size(), v );
    return v;
}

std::vector< std::string > split_list( std::string text ) // "[a,b]"
{
    std::vector< std::string > out;
    text = text.substr( 1, text.size() - 2 );
    std::size_t at = 0;
    while ( !text.empty() && at <= text.size() )
    {
        auto comma = text.find( ',', at );
        out.push_back( text.substr( at, comma - at ) );
        if ( comma == std::string::npos )
            break;
        at = comma + 1;
    }
    return out;
}

std::string shown( const state& s, const std::string& var )
{
    const auto& L = *s.layout();
    return L.format_value( L.index( var ), s.get( var ) );
}

// Same system with a different policy.
secure_system with_policy( const secure_system& sys, std::set< std::pair< std::string, std::string > > policy )
{
    const auto& c = sys.config();
    return { sys.machine(), info_flow_config( c.domains(), std::move( policy ), c.dom_map(), c.observer() ) };
}

} // namespace

TEST_CASE( "demo queues: size tracks length within capacity" )
{
    for ( int cap : { 1, 2 } )
    {
        models::demo_options o;
        o.capacity = cap;
        o.threads = cap == 1 ? 3 : 2;
        auto b = models::build_demo( o );
        for ( const auto* sys : { &b.pair.abstract, &b.pair.concrete } )
            for ( const auto& s : reachable( *sys ) )
                for ( int t = 1; t <= o.threads; ++t )
                {
                    const auto q = "q.t" + std::to_string( t );
                    const auto items = shown( s, q + ".que" ) == "[]" ? 0 : split_list( shown( s, q + ".que" ) ).size();
                    CHECK( static_cast< std::size_t >( s.get( q + ".size" ) ) == items );
                    CHECK( items <= static_cast< std::size_t >( cap ) );
                }
    }
}

TEST_CASE( "arinc: buffer sizes and running partitions" )
{
    auto b = models::build_arinc( models::default_arinc_config( 2, 3, 1, 2 ) );
    for ( const auto* sys : { &b.pair.abstract, &b.pair.concrete } )
    {
        auto states = reachable( *sys );
        CHECK( states.size() > 10 );
        for ( const auto& s : states )
        {
            const auto buf = shown( s, "qbuf.ch.1" );
            const auto len = buf == "[]" ? 0 : split_list( buf ).size();
            CHECK( static_cast< std::size_t >( s.get( "qbufsize.ch.1" ) ) == len );
            CHECK( len <= 2 );
            for ( int k = 1; k <= 2; ++k )
            {
                const auto cur = shown( s, "cur.sched." + std::to_string( k ) );
                if ( cur != "none" )
                    CHECK( shown( s, "partst." + cur ) == "RUN" );
            }
        }
    }
}

TEST_CASE( "arinc: partitions never flow to schedulers" )
{
    auto b = models::build_arinc( models::default_arinc_config() );
    const auto& cfg = b.pair.abstract.config();
    for ( const auto& [ from, to ] : cfg.policy() )
        if ( to.starts_with( "sched." ) )
            CHECK( from == to );
    ni_options o;
    o.max_len = 4;
    o.domains = { "sched.1", "sched.2" };
    CHECK( check_ni( b.pair.abstract, o ).passed() );
    for ( const auto& a : b.pair.abstract.machine().actions() )
        if ( cfg.dom( a ).starts_with( "sched." ) )
            CHECK( ( a.to_string().find( "schedule" ) != std::string::npos ||
                     a.to_string().find( "core_init" ) != std::string::npos ) );
}

TEST_CASE( "auction declassifies only a valid result" )
{
    auto b = models::build_auction();
    for ( const auto* sys : { &b.pair.abstract, &b.pair.concrete } )
    {
        std::size_t published = 0;
        for ( const auto& s : reachable( *sys ) )
        {
            const auto res = shown( s, "res" );
            if ( res == "unsuccessful" )
                continue;
            ++published;
            CHECK( shown( s, "status" ) == "CLOSED" );
            const auto log = split_list( shown( s, "log" ) );
            CHECK( std::find( log.begin(), log.end(), res ) != log.end() );
            for ( const auto& bid : log )
                CHECK( amount( bid ) <= amount( res ) );
            CHECK( amount( res ) > std::stoi( shown( s, "reserve" ) ) );
        }
        CHECK( published > 0 );
    }
    CHECK( check_ni( b.pair.abstract, testing::max_len( 4 ) ).passed() );
}

TEST_CASE( "early publication breaks the refinement" )
{
    models::auction_options o;
    o.publish_early = true;
    auto r = check_simulation( models::build_auction( o ).pair );
    CHECK_FALSE( r.refinement() );
    CHECK( ( r.c[ 1 ] || r.c[ 2 ] ) );
}

TEST_CASE( "an abstract server-to-user edge violates policy inclusion" )
{
    auto b = models::build_auction();
    auto policy = b.pair.abstract.config().policy();
    policy.emplace( "server", "user.1" );
    b.pair.abstract = with_policy( b.pair.abstract, policy );
    auto f = check_policy_inclusion( b.pair );
    REQUIRE( f );
    CHECK( f->condition == "c5" );
    CHECK( f->detail.find( "server -> user.1" ) != std::string::npos );
}

TEST_CASE( "registry" )
{
    const auto& reg = models::registry();
    CHECK( reg.size() == 7 );
    CHECK( std::count_if( reg.begin(), reg.end(), []( const auto& m ) { return m.name.starts_with( "demo" ); } ) == 3 );
    CHECK( std::count_if( reg.begin(), reg.end(), []( const auto& m ) { return m.secure; } ) == 3 );
    for ( const auto& m : reg )
    {
        auto b = models::build_model( m.name );
        CHECK( b.name == m.name );
        CHECK( b.pair.concrete.config().domains() == b.pair.abstract.config().domains() );
        CHECK( b.pair.concrete.config().missing_reflexive().empty() );
    }
    CHECK_THROWS_AS( (void)models::build_model( "nope" ), usage_error );
    models::model_parameters p;
    p.users = 2;
    CHECK_THROWS_AS( (void)models::build_model( "demo", p ), usage_error );
    models::model_parameters big;
    big.users = 9;
    CHECK_THROWS_AS( (void)models::build_model( "auction", big ), usage_error );
    models::model_parameters threads;
    threads.threads = 2;
    CHECK( models::build_model( "demo", threads ).parameters.at( "threads" ) == "2" );
}

TEST_CASE( "secure models unwind at both levels" )
{
    for ( const auto* name : { "demo", "arinc", "auction" } )
    {
        auto b = models::build_model( name );
        CHECK_MESSAGE( check_unwinding( b.pair.abstract ).passed(), name );
        CHECK_MESSAGE( check_unwinding( b.pair.concrete ).passed(), name );
    }
}

TEST_CASE( "insecure variants fail concrete local respect" )
{
    for ( const auto* name : { "demo-insecure-counter", "demo-insecure-fullstatus", "arinc-queuing-mode", "arinc-port-id" } )
    {
        auto b = models::build_model( name );
        auto r = check_unwinding( b.pair.concrete );
        CHECK_MESSAGE( !r.passed(), name );
    }
}
