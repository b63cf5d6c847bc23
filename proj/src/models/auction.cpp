#include "common.hpp"
#include "ifsec/models.hpp"

namespace ifsec::models
{

using namespace programs;
using detail::layout_builder;

namespace
{

constexpr value closed = 0, ready = 1, running = 2;

struct auction_layout
{
    schema_ptr layout;
    std::vector< std::vector< value > > domains;
    std::size_t status, reserve, max_bid, log, res, lock, obid, oblog;
};

} // namespace

model_bundle build_auction( const auction_options& o )
{
    if ( o.users < 1 || o.users > 3 )
        throw usage_error( "auction users out of range (1..3)" );
    if ( o.bids.empty() || o.bids.size() > 3 || o.reserves.empty() )
        throw usage_error( "auction needs 1..3 bid amounts and at least one reserve price" );
    if ( !std::is_sorted( o.bids.begin(), o.bids.end() ) ||
         std::adjacent_find( o.bids.begin(), o.bids.end() ) != o.bids.end() )
        throw usage_error( "bid amounts must be strictly increasing" );

    const int n = o.users;
    const int nb = static_cast< int >( o.bids.size() );
    const auto users = detail::numbered( "user.", n );
    // A bid (user u, amount index b) is encoded as u * nb + b + 1; 0 is no bid.
    const value codes = n * nb;
    auto bid_code = [ = ]( int u, int b ) -> value { return u * nb + b + 1; };
    auto bid_user = [ = ]( value code ) { return static_cast< int >( ( code - 1 ) / nb ); };
    auto bid_amount = [ = ]( value code ) -> value { return code == 0 ? 0 : o.bids[ ( code - 1 ) % nb ]; };

    std::vector< std::string > bid_labels;
    for ( int u = 0; u < n; ++u )
        for ( int b = 0; b < nb; ++b )
            bid_labels.push_back( users[ u ] + ":" + std::to_string( o.bids[ b ] ) );
    std::vector< std::string > max_labels{ "none" };
    max_labels.insert( max_labels.end(), bid_labels.begin(), bid_labels.end() );
    std::vector< std::string > res_labels{ "unsuccessful" };
    res_labels.insert( res_labels.end(), bid_labels.begin(), bid_labels.end() );
    std::vector< std::string > lock_labels{ "free" };
    lock_labels.insert( lock_labels.end(), users.begin(), users.end() );
    std::vector< std::string > reserve_labels{ "unset" };
    for ( auto r : o.reserves )
        reserve_labels.push_back( std::to_string( r ) );

    std::vector< std::string > domains = users;
    domains.push_back( "server" );
    domains.push_back( "publisher" );
    std::sort( domains.begin(), domains.end() );
    std::set< std::pair< std::string, std::string > > policy;
    for ( const auto& d : domains )
        policy.emplace( d, d );
    for ( const auto& u : users )
    {
        policy.emplace( u, "server" );
        policy.emplace( "publisher", u );
    }
    policy.emplace( "server", "publisher" );

    auto make_layout = [ & ]( bool concrete )
    {
        layout_builder b;
        auction_layout L{};
        L.status = b.label( "status", { "CLOSED", "READY", "RUNNING" } );
        L.reserve = b.label( "reserve", reserve_labels );
        L.max_bid = b.label( "max_bid", max_labels );
        L.log = b.sequence( "log", bid_labels, static_cast< std::size_t >( n ) );
        L.res = b.label( "res", res_labels );
        if ( concrete )
        {
            L.lock = b.label( "lock", lock_labels );
            L.obid = b.label( "obid", max_labels );
            L.oblog = b.sequence( "oblog", bid_labels, static_cast< std::size_t >( n ) );
        }
        L.layout = b.build();
        L.domains = b.domains();
        return L;
    };

    auto reserve_amount = [ = ]( value r ) -> value { return r == 0 ? 0 : o.reserves[ r - 1 ]; };
    const bool early = o.publish_early;

    auto build_level = [ & ]( bool concrete ) -> std::pair< secure_system, auction_layout >
    {
        const auto L = make_layout( concrete );
        concurrent_system cs;
        cs.components = users;
        cs.components.push_back( "auction" );
        std::vector< value > init( L.layout->size(), 0 );
        init[ L.status ] = ready;
        cs.initial = state( L.layout, init );

        auto has_bid = [ = ]( const state& s, int u )
        {
            for ( auto code : seq::elements( s[ L.log ], codes ) )
                if ( bid_user( code ) == u )
                    return true;
            return false;
        };
        auto open_for = [ = ]( int u ) { return [ = ]( const state& s ) { return s[ L.status ] == running && !has_bid( s, u ); }; };

        for ( int u = 0; u < n; ++u )
        {
            auto& pool = cs.pool[ users[ u ] ];
            for ( int b = 0; b < nb; ++b )
            {
                const value code = bid_code( u, b );
                auto record = [ = ]( state& s )
                {
                    if ( s[ L.status ] != running || has_bid( s, u ) )
                        return;
                    s[ L.log ] = seq::push_back( s[ L.log ], code, codes );
                    if ( bid_amount( code ) > bid_amount( s[ L.max_bid ] ) )
                        s[ L.max_bid ] = code;
                };
                prog body;
                predicate guard;
                if ( concrete )
                {
                    guard = open_for( u );
                    body = sequence( { await(
                                      "lock", [ = ]( const state& s ) { return s[ L.lock ] == 0; },
                                      basic( "acquire", [ = ]( state& s ) { s[ L.lock ] = u + 1; } ) ),
                                  cond( open_for( u ), basic( "update", record ) ),
                                  basic( "unlock",
                                         [ = ]( state& s )
                                         {
                                             s[ L.lock ] = 0;
                                             s[ L.obid ] = s[ L.max_bid ];
                                             s[ L.oblog ] = s[ L.log ];
                                         } ) } );
                }
                else
                    body = basic( "register", record );
                pool.push_back( { "register." + std::to_string( o.bids[ b ] ), guard, body, users[ u ] } );
            }
        }

        auto& pool = cs.pool[ "auction" ];
        for ( std::size_t r = 0; r < o.reserves.size(); ++r )
            pool.push_back( { "start." + std::to_string( o.reserves[ r ] ),
                              [ = ]( const state& s ) { return s[ L.status ] == ready; },
                              basic( "start",
                                     [ = ]( state& s )
                                     {
                                         s[ L.status ] = running;
                                         s[ L.reserve ] = static_cast< value >( r + 1 );
                                     } ),
                              "server" } );
        auto close = basic( "close", [ = ]( state& s ) { s[ L.status ] = closed; } );
        pool.push_back( { "close", [ = ]( const state& s ) { return s[ L.status ] == running; },
                          concrete ? await( "close", [ = ]( const state& s ) { return s[ L.lock ] == 0; }, close ) : close,
                          "server" } );
        pool.push_back( { "publish",
                          [ = ]( const state& s ) { return early ? s[ L.status ] != ready : s[ L.status ] == closed; },
                          basic( "publish",
                                 [ = ]( state& s )
                                 {
                                     const auto best = s[ L.max_bid ];
                                     s[ L.res ] = best != 0 && bid_amount( best ) > reserve_amount( s[ L.reserve ] ) ? best : 0;
                                 } ),
                          "publisher" } );

        domain_config cfg;
        cfg.domains = domains;
        cfg.policy = policy;
        cfg.observe = [ = ]( const std::string& d, const state& s ) -> observation
        {
            const auto bid = concrete ? s[ L.obid ] : s[ L.max_bid ];
            if ( d == "server" )
                return { s[ L.status ], s[ L.reserve ], bid, concrete ? s[ L.oblog ] : s[ L.log ] };
            if ( d == "publisher" )
            {
                if ( s[ L.status ] == closed )
                    return { s[ L.res ], s[ L.status ], bid, s[ L.reserve ] };
                return { s[ L.res ], s[ L.status ] };
            }
            return { s[ L.res ] };
        };
        return { compile( cs, cfg ), L };
    };

    auto [ abstract, al ] = build_level( false );
    auto [ concrete, cl ] = build_level( true );

    auto alpha = [ = ]( const state& s, const state& sigma )
    {
        if ( s[ cl.status ] != sigma[ al.status ] || s[ cl.reserve ] != sigma[ al.reserve ] || s[ cl.res ] != sigma[ al.res ] )
            return false;
        if ( s[ cl.obid ] != sigma[ al.max_bid ] || s[ cl.oblog ] != sigma[ al.log ] )
            return false;
        if ( s[ cl.lock ] == 0 && ( s[ cl.log ] != s[ cl.oblog ] || s[ cl.max_bid ] != s[ cl.obid ] ) )
            return false;
        // result validity: only a closed auction's maximum above the reserve
        const auto res = s[ cl.res ];
        if ( res != 0 )
        {
            if ( s[ cl.status ] != closed || bid_amount( res ) <= reserve_amount( s[ cl.reserve ] ) )
                return false;
            for ( auto code : seq::elements( s[ cl.log ], codes ) )
                if ( bid_amount( code ) > bid_amount( res ) )
                    return false;
            const auto logged = seq::elements( s[ cl.log ], codes );
            if ( std::find( logged.begin(), logged.end(), res ) == logged.end() )
                return false;
        }
        return true;
    };
    auto zeta = detail::map_steps( concrete, abstract, "unlock", []( const std::string& ) { return "register"; } );

    rely_guarantee_spec rg;
    rg.component_of = []( const action_id& a ) { return component_of( a ); };
    const auto shared = cl.domains;
    const std::vector< std::size_t > guarded{ cl.max_bid, cl.log, cl.obid, cl.oblog };
    const std::vector< std::size_t > server_owned{ cl.status, cl.reserve, cl.res };
    auto changed = []( const state& s, const state& t, const std::vector< std::size_t >& vars )
    { return std::any_of( vars.begin(), vars.end(), [ & ]( std::size_t v ) { return s[ v ] != t[ v ]; } ); };
    for ( int u = 0; u < n; ++u )
    {
        const value me = u + 1;
        component_rg spec;
        spec.rely.contains = [ = ]( const state& s, const state& t )
        {
            if ( s[ cl.lock ] == me && ( changed( s, t, guarded ) || t[ cl.lock ] != me || s[ cl.status ] != t[ cl.status ] ) )
                return false;
            return true;
        };
        spec.guarantee.contains = [ = ]( const state& s, const state& t )
        {
            if ( changed( s, t, server_owned ) )
                return false;
            const bool data = s[ cl.max_bid ] != t[ cl.max_bid ] || s[ cl.log ] != t[ cl.log ];
            const bool ob = s[ cl.obid ] != t[ cl.obid ] || s[ cl.oblog ] != t[ cl.oblog ];
            const bool lock = s[ cl.lock ] != t[ cl.lock ];
            if ( !data && !ob && !lock )
                return true;
            if ( s[ cl.lock ] == 0 && t[ cl.lock ] == me && !data && !ob )
                return true;
            if ( s[ cl.lock ] == me && !lock && !ob )
                return true;
            return s[ cl.lock ] == me && t[ cl.lock ] == 0 && !data;
        };
        spec.guarantee.successors = [ = ]( const state& s ) { return detail::perturbations( s, shared ); };
        spec.abstract_rely = state_relation::any();
        spec.abstract_guarantee = state_relation::any();
        rg.components.emplace( users[ u ], std::move( spec ) );
    }
    {
        component_rg spec;
        spec.rely.contains = [ = ]( const state& s, const state& t ) { return !changed( s, t, server_owned ); };
        spec.guarantee.contains = [ = ]( const state& s, const state& t )
        {
            if ( changed( s, t, guarded ) || s[ cl.lock ] != t[ cl.lock ] )
                return false;
            return s[ cl.status ] == t[ cl.status ] || s[ cl.lock ] == 0;
        };
        spec.guarantee.successors = [ = ]( const state& s ) { return detail::perturbations( s, shared ); };
        spec.abstract_rely = state_relation::any();
        spec.abstract_guarantee = state_relation::any();
        rg.components.emplace( "auction", std::move( spec ) );
    }

    model_bundle out{ "auction", {}, refinement_pair{ concrete, abstract, alpha, zeta }, rg };
    out.parameters = { { "users", std::to_string( n ) }, { "bids", std::to_string( nb ) } };
    return out;
}

} // namespace ifsec::models
