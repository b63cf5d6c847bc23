#include "doctest.h"

#include "ifsec/cli.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using json = nlohmann::json;
namespace cli = ifsec::cli;

namespace
{

struct result
{
    int code;
    std::string out;
    std::string err;
};

result invoke( std::vector< std::string > args )
{
    std::ostringstream out, err;
    int code = cli::run_cli( args, out, err );
    return { code, out.str(), err.str() };
}

std::string data( const std::string& name )
{
    return std::string( IFSEC_TEST_DATA ) + "/" + name;
}

std::string scratch( const std::string& name, const std::string& content )
{
    auto dir = std::filesystem::temp_directory_path() / "ifsec-cli-test";
    std::filesystem::create_directories( dir );
    auto path = ( dir / name ).string();
    std::ofstream( path ) << content;
    return path;
}

json without_time( json j )
{
    j.erase( "wall_time" );
    return j;
}

} // namespace

TEST_CASE( "list" )
{
    auto r = invoke( { "list" } );
    CHECK( r.code == cli::exit_pass );
    CHECK( r.out.find( "demo-insecure-counter (insecure)" ) != std::string::npos );
    auto j = json::parse( invoke( { "list", "--json" } ).out );
    REQUIRE( j[ "models" ].size() == 7 );
    int demos = 0;
    for ( const auto& m : j[ "models" ] )
        demos += m[ "name" ].get< std::string >().starts_with( "demo" );
    CHECK( demos == 3 );
    CHECK( j[ "models" ][ 0 ][ "defaults" ][ "threads" ] == 3 );
}

TEST_CASE( "exit codes" )
{
    CHECK( invoke( { "check", "refine", "demo" } ).code == cli::exit_pass );
    CHECK( invoke( { "check", "unwinding", "demo-insecure-fullstatus", "--level", "abstract" } ).code == cli::exit_violation );
    CHECK( invoke( { "check", "refine", "demo-insecure-counter" } ).code == cli::exit_violation );
    auto unknown = invoke( { "check", "refine", "nope" } );
    CHECK( unknown.code == cli::exit_usage );
    CHECK( unknown.err.find( "nope" ) != std::string::npos );
    CHECK( invoke( { "check", "refine", "demo", "--bogus" } ).code == cli::exit_usage );
    CHECK( invoke( { "check", "sideways", "demo" } ).code == cli::exit_usage );
    CHECK( invoke( { "check", "refine", "demo", "--users", "2" } ).code == cli::exit_usage );
    CHECK( invoke( { "check", "unwinding", "demo", "--domain", "t1" } ).code == cli::exit_usage );
    CHECK( invoke( { "check", "ni", "demo", "--domain", "t9", "--max-len", "1" } ).code == cli::exit_usage );
    CHECK( invoke( { "check", "unwinding", data( "absent.ifs" ) } ).code == cli::exit_usage );
    auto parse = invoke( { "check", "unwinding", data( "bad_domain.ifs" ) } );
    CHECK( parse.code == cli::exit_model );
    CHECK( parse.err.find( "bad_domain.ifs:6:6:" ) != std::string::npos );
    CHECK( invoke( { "check", "refine", "demo", "--budget", "10" } ).code == cli::exit_budget );
    CHECK( invoke( { "check", "ni", "demo", "--trace-budget", "10" } ).code == cli::exit_budget );
    CHECK( invoke( { "check", "refine", data( "toy.ifs" ) } ).code == cli::exit_usage );
    CHECK( invoke( {} ).code == cli::exit_usage );
    CHECK( invoke( { "--help" } ).code == cli::exit_pass );
}

TEST_CASE( "file targets" )
{
    CHECK( invoke( { "check", "unwinding", data( "toy.ifs" ) } ).code == cli::exit_pass );
    CHECK( invoke( { "check", "ni", data( "toy.ifs" ) } ).code == cli::exit_pass );
    CHECK( invoke( { "check", "ni", data( "leak.ifs" ) } ).code == cli::exit_violation );
    CHECK( invoke( { "check", "refine", data( "toy_refine.ifs" ) } ).code == cli::exit_pass );
    CHECK( invoke( { "check", "compositional", data( "toy_refine.ifs" ) } ).code == cli::exit_pass );
    auto warn = scratch( "noreflex.ifs", "[domains]\nA\n[policy]\n[state]\nx : 0..1 = 0\n[actions]\n[observe]\nA : x\n" );
    auto r = invoke( { "check", "unwinding", warn } );
    CHECK( r.code == cli::exit_pass );
    CHECK( r.err.find( "warning: model policy lacks A -> A" ) != std::string::npos );
}

TEST_CASE( "json reports" )
{
    auto r = invoke( { "check", "unwinding", "demo", "--json" } );
    REQUIRE( r.code == cli::exit_pass );
    auto j = json::parse( r.out );
    CHECK( j[ "schema" ] == 1 );
    CHECK( j[ "check" ] == "unwinding" );
    CHECK( j[ "verdict" ] == "pass" );
    CHECK( j[ "target" ][ "name" ] == "demo" );
    CHECK( j[ "levels" ].contains( "abstract" ) );
    CHECK( j[ "levels" ].contains( "concrete" ) );
    CHECK( j.contains( "wall_time" ) );
    auto again = json::parse( invoke( { "check", "unwinding", "demo", "--json" } ).out );
    CHECK( without_time( j ) == without_time( again ) );

    auto ni = json::parse( invoke( { "check", "ni", "demo-insecure-fullstatus", "--json" } ).out );
    CHECK( ni[ "verdict" ] == "violation" );
    CHECK( ni[ "levels" ][ "abstract" ][ "semantics" ] == "raw" );
    CHECK( !ni[ "levels" ][ "abstract" ][ "witness" ].is_null() );
}

TEST_CASE( "replay" )
{
    auto counter = invoke( { "check", "refine", "demo-insecure-counter", "--json" } );
    REQUIRE( counter.code == cli::exit_violation );
    auto path = scratch( "counter.json", counter.out );
    auto r = invoke( { "replay", path } );
    CHECK( r.code == cli::exit_violation );
    CHECK( r.out.find( "violated condition: c2" ) != std::string::npos );

    auto lr = invoke( { "check", "unwinding", "arinc-port-id", "--level", "concrete", "--json" } );
    REQUIRE( lr.code == cli::exit_violation );
    auto lr_replay = invoke( { "replay", scratch( "lr.json", lr.out ) } );
    CHECK( lr_replay.code == cli::exit_violation );
    CHECK( lr_replay.out.find( "violated condition: local respect (LR)" ) != std::string::npos );

    auto ni = invoke( { "check", "ni", "demo-insecure-fullstatus", "--json" } );
    auto ni_replay = invoke( { "replay", scratch( "ni.json", ni.out ) } );
    CHECK( ni_replay.code == cli::exit_violation );
    CHECK( ni_replay.out.find( "first indistinguishability break" ) != std::string::npos );

    auto pass = invoke( { "check", "refine", "demo", "--json" } );
    CHECK( invoke( { "replay", scratch( "pass.json", pass.out ) } ).code == cli::exit_usage );

    // a report against different model parameters is stale
    auto j = json::parse( counter.out );
    j[ "target" ][ "parameters" ][ "threads" ] = "2";
    auto stale = invoke( { "replay", scratch( "stale.json", j.dump() ) } );
    CHECK( stale.code == cli::exit_usage );
    CHECK( stale.err.find( "stale" ) != std::string::npos );

    CHECK( invoke( { "replay", scratch( "garbage.json", "{not json" ) } ).code == cli::exit_usage );
    CHECK( invoke( { "replay", data( "absent.json" ) } ).code == cli::exit_usage );
}
