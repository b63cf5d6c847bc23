#include "common.hpp"
#include "ifsec/models.hpp"

namespace ifsec::models
{

using namespace programs;
using detail::layout_builder;

namespace
{

struct queue_vars
{
    std::size_t que, size, lock, obq, cnt;
};

struct demo_layout
{
    schema_ptr layout;
    std::vector< std::vector< value > > domains;
    std::vector< queue_vars > q;
};

demo_layout make_layout( const demo_options& o, bool concrete )
{
    const auto threads = detail::numbered( "t", o.threads );
    const auto alphabet = detail::numbered( "m", o.messages );
    std::vector< std::string > lock_labels{ "free" };
    lock_labels.insert( lock_labels.end(), threads.begin(), threads.end() );

    layout_builder b;
    demo_layout out;
    for ( const auto& t : threads )
    {
        queue_vars v{};
        v.que = b.sequence( "q." + t + ".que", alphabet, o.capacity );
        v.size = b.integer( "q." + t + ".size", 0, o.capacity );
        if ( concrete )
        {
            v.lock = b.label( "q." + t + ".l", lock_labels );
            v.obq = b.sequence( "q." + t + ".obq", alphabet, o.capacity );
        }
        if ( o.variant == demo_variant::insecure_counter )
            v.cnt = b.integer( "cnt." + t, 0, 1 );
        out.q.push_back( v );
    }
    out.layout = b.build();
    out.domains = b.domains();
    return out;
}

bool allowed( const demo_options& o, int from, int to ) { return from == to || ( from + 1 ) % o.threads == to; }

} // namespace

model_bundle build_demo( const demo_options& o )
{
    if ( o.threads < 1 || o.threads > 3 || o.capacity < 1 || o.capacity > 2 || o.messages < 1 || o.messages > 2 )
        throw usage_error( "demo parameters out of range (threads 1..3, capacity 1..2, messages 1..2)" );

    const bool counter = o.variant == demo_variant::insecure_counter;
    const bool fullstatus = o.variant == demo_variant::insecure_fullstatus;
    const auto threads = detail::numbered( "t", o.threads );
    const value alphabet = o.messages;
    const value cap = o.capacity;

    std::vector< std::string > domains = threads;
    std::set< std::pair< std::string, std::string > > policy;
    for ( int i = 0; i < o.threads; ++i )
        for ( int j = 0; j < o.threads; ++j )
            if ( allowed( o, i, j ) )
                policy.emplace( threads[ i ], threads[ j ] );

    auto build_level = [ & ]( bool concrete ) -> std::pair< secure_system, demo_layout >
    {
        auto L = make_layout( o, concrete );
        const auto q = L.q;
        concurrent_system cs;
        cs.components = threads;
        cs.initial = state( L.layout, std::vector< value >( L.layout->size(), 0 ) );

        auto push = [ = ]( int j, value m )
        {
            return [ = ]( state& s )
            {
                if ( s[ q[ j ].size ] < cap )
                {
                    s[ q[ j ].que ] = seq::push_back( s[ q[ j ].que ], m, alphabet );
                    s[ q[ j ].size ] += 1;
                }
            };
        };
        auto pop = [ = ]( int i )
        {
            return [ = ]( state& s )
            {
                if ( s[ q[ i ].size ] > 0 )
                {
                    s[ q[ i ].que ] = seq::pop_back( s[ q[ i ].que ], alphabet );
                    s[ q[ i ].size ] -= 1;
                }
            };
        };
        auto lock = [ = ]( int j, int me )
        {
            return await(
                "lock", [ = ]( const state& s ) { return s[ q[ j ].lock ] == 0; },
                basic( "acquire", [ = ]( state& s ) { s[ q[ j ].lock ] = me + 1; } ) );
        };
        auto unlock = [ = ]( int j )
        {
            return basic( "unlock",
                          [ = ]( state& s )
                          {
                              s[ q[ j ].lock ] = 0;
                              s[ q[ j ].obq ] = s[ q[ j ].que ];
                          } );
        };
        auto flip = [ = ]( int j ) { return [ = ]( state& s ) { s[ q[ j ].cnt ] = 1 - s[ q[ j ].cnt ]; }; };

        for ( int i = 0; i < o.threads; ++i )
        {
            auto& pool = cs.pool[ threads[ i ] ];
            for ( int j = 0; j < o.threads; ++j )
            {
                if ( j == i )
                    continue;
                const bool check = allowed( o, i, j );
                for ( value m = 1; m <= alphabet; ++m )
                {
                    prog body;
                    if ( !concrete )
                    {
                        auto enqueue = push( j, m );
                        auto inc = flip( j );
                        body = basic( "send",
                                      [ = ]( state& s )
                                      {
                                          if ( !check )
                                              return;
                                          if ( counter )
                                              inc( s );
                                          enqueue( s );
                                      } );
                    }
                    else
                    {
                        auto guarded = sequence( { lock( j, i ),
                                              cond( [ = ]( const state& s ) { return s[ q[ j ].size ] < cap; },
                                                    basic( "write", push( j, m ) ) ),
                                              unlock( j ) } );
                        auto always = [ check ]( const state& ) { return check; };
                        if ( counter )
                            body = sequence( basic( "incr", flip( j ) ), cond( always, guarded, basic( "decr", flip( j ) ) ) );
                        else
                            body = cond( always, guarded );
                    }
                    pool.push_back( { "send." + threads[ j ] + ".m" + std::to_string( m ), {}, body, threads[ i ] } );
                }
            }
            prog body;
            if ( !concrete )
                body = basic( "recv", pop( i ) );
            else
                body = sequence( { lock( i, i ),
                              cond( [ = ]( const state& s ) { return s[ q[ i ].size ] > 0; }, basic( "read", pop( i ) ) ),
                              unlock( i ) } );
            pool.push_back( { "recv", {}, body, threads[ i ] } );
        }

        domain_config cfg;
        cfg.domains = domains;
        cfg.policy = policy;
        cfg.observe = [ = ]( const std::string& d, const state& s )
        {
            const int t = std::stoi( d.substr( 1 ) ) - 1;
            const auto visible = [ & ]( int k ) { return concrete ? s[ q[ k ].obq ] : s[ q[ k ].que ]; };
            observation obs{ visible( t ) };
            if ( counter )
                obs.push_back( s[ q[ t ].cnt ] );
            if ( fullstatus )
                for ( int k = 0; k < o.threads; ++k )
                    if ( k != t && allowed( o, t, k ) )
                        obs.push_back( seq::length( visible( k ), alphabet ) == static_cast< std::size_t >( cap ) );
            return obs;
        };
        return { compile( cs, cfg ), L };
    };

    auto [ abstract, al ] = build_level( false );
    auto [ concrete, cl ] = build_level( true );
    const auto aq = al.q;
    const auto cq = cl.q;

    auto alpha = [ = ]( const state& s, const state& sigma )
    {
        for ( std::size_t i = 0; i < cq.size(); ++i )
        {
            if ( s[ cq[ i ].obq ] != sigma[ aq[ i ].que ] )
                return false;
            if ( s[ cq[ i ].lock ] == 0 && s[ cq[ i ].obq ] != s[ cq[ i ].que ] )
                return false;
            if ( counter && s[ cq[ i ].cnt ] != sigma[ aq[ i ].cnt ] )
                return false;
        }
        return true;
    };
    auto zeta = detail::map_steps( concrete, abstract, "unlock",
                                   []( const std::string& event ) { return event == "recv" ? "recv" : "send"; } );

    rely_guarantee_spec rg;
    rg.component_of = []( const action_id& a ) { return component_of( a ); };
    const auto shared = cl.domains;
    const bool widen = o.widen_guarantee;
    for ( int k = 0; k < o.threads; ++k )
    {
        const value me = k + 1;
        component_rg spec;
        spec.rely.contains = [ = ]( const state& s, const state& t )
        {
            for ( const auto& v : cq )
                if ( s[ v.lock ] == me && ( s[ v.que ] != t[ v.que ] || s[ v.obq ] != t[ v.obq ] || s[ v.size ] != t[ v.size ] ) )
                    return false;
            return true;
        };
        spec.guarantee.contains = [ = ]( const state& s, const state& t )
        {
            std::optional< std::size_t > touched;
            for ( std::size_t i = 0; i < shared.size(); ++i )
            {
                if ( s[ i ] == t[ i ] )
                    continue;
                std::optional< std::size_t > owner;
                for ( std::size_t j = 0; j < cq.size(); ++j )
                    if ( i == cq[ j ].que || i == cq[ j ].size || i == cq[ j ].lock || i == cq[ j ].obq )
                        owner = j;
                if ( !owner || ( touched && *touched != *owner ) )
                    return false;
                touched = owner;
            }
            if ( !touched )
                return true;
            const auto& v = cq[ *touched ];
            const bool data = s[ v.que ] != t[ v.que ] || s[ v.size ] != t[ v.size ];
            const bool lock = s[ v.lock ] != t[ v.lock ];
            const bool ob = s[ v.obq ] != t[ v.obq ];
            if ( s[ v.lock ] == 0 && t[ v.lock ] == me && !data && !ob )
                return true;
            if ( s[ v.lock ] == me && !lock && !ob )
                return true;
            if ( s[ v.lock ] == me && t[ v.lock ] == 0 && !data )
                return true;
            return widen && !lock && !ob;
        };
        spec.guarantee.successors = [ = ]( const state& s ) { return detail::perturbations( s, shared ); };
        spec.abstract_rely = state_relation::any();
        spec.abstract_guarantee = state_relation::any();
        rg.components.emplace( threads[ k ], std::move( spec ) );
    }

    model_bundle out{ "demo", {}, refinement_pair{ concrete, abstract, alpha, zeta }, rg };
    switch ( o.variant )
    {
    case demo_variant::secure:
        break;
    case demo_variant::insecure_counter:
        out.name = "demo-insecure-counter";
        break;
    case demo_variant::insecure_fullstatus:
        out.name = "demo-insecure-fullstatus";
        break;
    }
    out.parameters = { { "threads", std::to_string( o.threads ) },
                       { "capacity", std::to_string( o.capacity ) },
                       { "messages", std::to_string( o.messages ) } };
    return out;
}

} // namespace ifsec::models
