#include "common.hpp"
#include "ifsec/models.hpp"

namespace ifsec::models
{

using namespace programs;
using detail::layout_builder;

arinc_config default_arinc_config( int cpus, int partitions, int channels, int capacity, int messages )
{
    if ( cpus < 1 || cpus > 2 || partitions < 1 || partitions > 3 || channels < 0 || channels > 2 || capacity < 1 ||
         capacity > 2 || messages < 1 || messages > 2 )
        throw usage_error( "arinc parameters out of range (cpus 1..2, partitions 1..3, channels 0..2, capacity 1..2, "
                           "messages 1..2)" );
    if ( channels > 0 && partitions < 2 )
        throw usage_error( "channels need at least two partitions" );
    arinc_config c;
    c.cpus = cpus;
    c.messages = messages;
    for ( int p = 1; p <= partitions; ++p )
        c.partition_scheduler.push_back( p == 1 ? 1 : cpus );
    for ( int i = 1; i <= channels; ++i )
    {
        const int src = i;
        const int dest = i % partitions + 1;
        c.port_partition.push_back( src );
        c.port_partition.push_back( dest );
        c.channels.push_back( { 2 * i - 1, 2 * i, capacity } );
    }
    return c;
}

namespace
{

struct arinc_layout
{
    schema_ptr layout;
    std::vector< std::vector< value > > domains;
    std::vector< std::size_t > cur;    // per scheduler
    std::vector< std::size_t > partst; // per partition
    std::vector< std::size_t > qbuf, qsize, qlock, obuf;
};

constexpr value idle = 0, ready = 1, running = 2;

void validate( const arinc_config& c )
{
    const int parts = static_cast< int >( c.partition_scheduler.size() );
    const int ports = static_cast< int >( c.port_partition.size() );
    if ( c.cpus < 1 )
        throw model_error( "at least one cpu is required" );
    if ( parts < 1 )
        throw model_error( "at least one partition is required" );
    if ( c.messages < 1 )
        throw model_error( "the message alphabet is empty" );
    for ( auto s : c.partition_scheduler )
        if ( s < 1 || s > c.cpus )
            throw model_error( "partition deployed on unknown scheduler " + std::to_string( s ) );
    for ( auto p : c.port_partition )
        if ( p < 1 || p > parts )
            throw model_error( "port deployed on unknown partition " + std::to_string( p ) );
    std::set< int > used;
    for ( const auto& ch : c.channels )
    {
        if ( ch.source_port < 1 || ch.source_port > ports || ch.dest_port < 1 || ch.dest_port > ports )
            throw model_error( "channel endpoint names an unknown port" );
        if ( ch.source_port == ch.dest_port )
            throw model_error( "channel source and destination ports coincide" );
        if ( !used.insert( ch.source_port ).second || !used.insert( ch.dest_port ).second )
            throw model_error( "port used by more than one channel endpoint" );
        if ( ch.capacity < 1 )
            throw model_error( "channel capacity must be at least 1" );
    }
}

} // namespace

model_bundle build_arinc( const arinc_config& c, arinc_variant variant )
{
    validate( c );
    const int parts = static_cast< int >( c.partition_scheduler.size() );
    const int nch = static_cast< int >( c.channels.size() );
    const value alphabet = c.messages;
    const auto part_names = detail::numbered( "part.", parts );
    const auto sched_names = detail::numbered( "sched.", c.cpus );
    const auto cpu_names = detail::numbered( "cpu.", c.cpus );
    const bool check_owner = variant != arinc_variant::port_identifier;
    const bool queuing = variant == arinc_variant::queuing_mode;

    std::vector< std::string > domains = part_names;
    domains.insert( domains.end(), sched_names.begin(), sched_names.end() );
    std::sort( domains.begin(), domains.end() );
    std::set< std::pair< std::string, std::string > > policy;
    for ( const auto& d : domains )
        policy.emplace( d, d );
    for ( int p = 0; p < parts; ++p )
        policy.emplace( sched_names[ c.partition_scheduler[ p ] - 1 ], part_names[ p ] );
    auto src_part = [ & ]( int ch ) { return c.port_partition[ c.channels[ ch ].source_port - 1 ] - 1; };
    auto dest_part = [ & ]( int ch ) { return c.port_partition[ c.channels[ ch ].dest_port - 1 ] - 1; };
    for ( int ch = 0; ch < nch; ++ch )
        policy.emplace( part_names[ src_part( ch ) ], part_names[ dest_part( ch ) ] );

    // channel index by port, and port direction
    std::map< int, int > channel_of_source, channel_of_dest;
    for ( int ch = 0; ch < nch; ++ch )
    {
        channel_of_source[ c.channels[ ch ].source_port ] = ch;
        channel_of_dest[ c.channels[ ch ].dest_port ] = ch;
    }

    auto make_layout = [ & ]( bool concrete )
    {
        const auto alpha_labels = detail::numbered( "m", c.messages );
        std::vector< std::string > cur_labels{ "none" };
        cur_labels.insert( cur_labels.end(), part_names.begin(), part_names.end() );
        std::vector< std::string > lock_labels{ "free" };
        lock_labels.insert( lock_labels.end(), cpu_names.begin(), cpu_names.end() );
        layout_builder b;
        arinc_layout L;
        for ( int k = 0; k < c.cpus; ++k )
            L.cur.push_back( b.label( "cur." + sched_names[ k ], cur_labels ) );
        for ( int p = 0; p < parts; ++p )
            L.partst.push_back( b.label( "partst." + part_names[ p ], { "IDLE", "READY", "RUN" } ) );
        for ( int ch = 0; ch < nch; ++ch )
        {
            const auto name = "ch." + std::to_string( ch + 1 );
            L.qbuf.push_back( b.sequence( "qbuf." + name, alpha_labels, c.channels[ ch ].capacity ) );
            L.qsize.push_back( b.integer( "qbufsize." + name, 0, c.channels[ ch ].capacity ) );
            if ( concrete )
            {
                L.qlock.push_back( b.label( "qlock." + name, lock_labels ) );
                L.obuf.push_back( b.sequence( "obuf." + name, alpha_labels, c.channels[ ch ].capacity ) );
            }
        }
        L.layout = b.build();
        L.domains = b.domains();
        return L;
    };

    auto build_level = [ & ]( bool concrete ) -> std::pair< secure_system, arinc_layout >
    {
        const auto L = make_layout( concrete );
        concurrent_system cs;
        cs.components = cpu_names;
        cs.initial = state( L.layout, std::vector< value >( L.layout->size(), 0 ) );

        for ( int k = 0; k < c.cpus; ++k )
        {
            auto& pool = cs.pool[ cpu_names[ k ] ];
            std::vector< int > mine;
            for ( int p = 0; p < parts; ++p )
                if ( c.partition_scheduler[ p ] == k + 1 )
                    mine.push_back( p );

            pool.push_back(
                { "core_init",
                  [ = ]( const state& s )
                  {
                      return std::all_of( mine.begin(), mine.end(), [ & ]( int p ) { return s[ L.partst[ p ] ] == idle; } );
                  },
                  basic( "init",
                         [ = ]( state& s )
                         {
                             for ( int p : mine )
                                 s[ L.partst[ p ] ] = ready;
                         } ),
                  sched_names[ k ] } );

            for ( int p : mine )
                pool.push_back( { "schedule." + part_names[ p ],
                                  [ = ]( const state& s ) { return s[ L.partst[ p ] ] != idle; },
                                  basic( "schedule",
                                         [ = ]( state& s )
                                         {
                                             if ( auto prev = s[ L.cur[ k ] ]; prev != 0 )
                                                 s[ L.partst[ prev - 1 ] ] = ready;
                                             s[ L.cur[ k ] ] = p + 1;
                                             s[ L.partst[ p ] ] = running;
                                         } ),
                                  sched_names[ k ] } );

            // IPC services, per invoking partition and port.
            for ( int p : mine )
            {
                auto may_use = [ = ]( int port )
                {
                    const bool owned = c.port_partition[ port - 1 ] == p + 1;
                    return [ = ]( const state& s ) { return s[ L.cur[ k ] ] == p + 1 && ( owned || !check_owner ); };
                };
                auto lock = [ = ]( int ch )
                {
                    return await(
                        "lock", [ = ]( const state& s ) { return s[ L.qlock[ ch ] ] == 0; },
                        basic( "acquire", [ = ]( state& s ) { s[ L.qlock[ ch ] ] = k + 1; } ) );
                };
                auto unlock = [ = ]( int ch )
                {
                    return basic( "unlock",
                                  [ = ]( state& s )
                                  {
                                      s[ L.qlock[ ch ] ] = 0;
                                      s[ L.obuf[ ch ] ] = s[ L.qbuf[ ch ] ];
                                  } );
                };
                for ( const auto& [ port, ch ] : channel_of_source )
                {
                    const value cap = c.channels[ ch ].capacity;
                    for ( value m = 1; m <= alphabet; ++m )
                    {
                        auto enqueue = [ = ]( state& s )
                        {
                            if ( s[ L.qsize[ ch ] ] < cap )
                            {
                                s[ L.qbuf[ ch ] ] = seq::push_back( s[ L.qbuf[ ch ] ], m, alphabet );
                                s[ L.qsize[ ch ] ] += 1;
                            }
                        };
                        prog body = concrete
                                        ? sequence( { lock( ch ),
                                                 cond( [ = ]( const state& s ) { return s[ L.qsize[ ch ] ] < cap; },
                                                       basic( "write", enqueue ) ),
                                                 unlock( ch ) } )
                                        : basic( "send", enqueue );
                        pool.push_back( { "send." + part_names[ p ] + ".port." + std::to_string( port ) + ".m" +
                                              std::to_string( m ),
                                          may_use( port ), body, part_names[ p ] } );
                    }
                }
                for ( const auto& [ port, ch ] : channel_of_dest )
                {
                    auto dequeue = [ = ]( state& s )
                    {
                        if ( s[ L.qsize[ ch ] ] > 0 )
                        {
                            auto items = seq::elements( s[ L.qbuf[ ch ] ], alphabet );
                            items.erase( items.begin() );
                            s[ L.qbuf[ ch ] ] = seq::make( items, alphabet );
                            s[ L.qsize[ ch ] ] -= 1;
                        }
                    };
                    prog body = concrete ? sequence( { lock( ch ),
                                                  cond( [ = ]( const state& s ) { return s[ L.qsize[ ch ] ] > 0; },
                                                        basic( "read", dequeue ) ),
                                                  unlock( ch ) } )
                                         : basic( "recv", dequeue );
                    pool.push_back( { "recv." + part_names[ p ] + ".port." + std::to_string( port ), may_use( port ),
                                      body, part_names[ p ] } );
                }
            }
        }

        std::vector< std::vector< std::size_t > > sched_parts( c.cpus );
        for ( int p = 0; p < parts; ++p )
            sched_parts[ c.partition_scheduler[ p ] - 1 ].push_back( L.partst[ p ] );
        std::map< std::string, std::vector< std::size_t > > receives, sends;
        for ( int ch = 0; ch < nch; ++ch )
        {
            receives[ part_names[ dest_part( ch ) ] ].push_back( ch );
            sends[ part_names[ src_part( ch ) ] ].push_back( ch );
        }
        std::map< std::string, std::size_t > part_index, sched_index;
        for ( int p = 0; p < parts; ++p )
            part_index[ part_names[ p ] ] = p;
        for ( int k = 0; k < c.cpus; ++k )
            sched_index[ sched_names[ k ] ] = k;

        domain_config cfg;
        cfg.domains = domains;
        cfg.policy = policy;
        cfg.observe = [ = ]( const std::string& d, const state& s )
        {
            observation obs;
            if ( auto it = sched_index.find( d ); it != sched_index.end() )
            {
                obs.push_back( s[ L.cur[ it->second ] ] );
                for ( auto v : sched_parts[ it->second ] )
                    obs.push_back( s[ v ] );
                return obs;
            }
            obs.push_back( s[ L.partst[ part_index.at( d ) ] ] );
            const auto buffer = [ & ]( std::size_t ch ) { return concrete ? s[ L.obuf[ ch ] ] : s[ L.qbuf[ ch ] ]; };
            if ( auto it = receives.find( d ); it != receives.end() )
                for ( auto ch : it->second )
                    obs.push_back( buffer( ch ) );
            if ( queuing )
                if ( auto it = sends.find( d ); it != sends.end() )
                    for ( auto ch : it->second )
                        obs.push_back( seq::length( buffer( ch ), alphabet ) ==
                                       static_cast< std::size_t >( c.channels[ ch ].capacity ) );
            return obs;
        };
        return { compile( cs, cfg ), L };
    };

    auto [ abstract, al ] = build_level( false );
    auto [ concrete, cl ] = build_level( true );

    auto alpha = [ al = al, cl = cl ]( const state& s, const state& sigma )
    {
        for ( std::size_t k = 0; k < cl.cur.size(); ++k )
            if ( s[ cl.cur[ k ] ] != sigma[ al.cur[ k ] ] )
                return false;
        for ( std::size_t p = 0; p < cl.partst.size(); ++p )
            if ( s[ cl.partst[ p ] ] != sigma[ al.partst[ p ] ] )
                return false;
        for ( std::size_t ch = 0; ch < cl.qbuf.size(); ++ch )
        {
            if ( s[ cl.obuf[ ch ] ] != sigma[ al.qbuf[ ch ] ] )
                return false;
            if ( s[ cl.qlock[ ch ] ] == 0 && s[ cl.obuf[ ch ] ] != s[ cl.qbuf[ ch ] ] )
                return false;
        }
        return true;
    };
    auto zeta = detail::map_steps( concrete, abstract, "unlock",
                                   []( const std::string& event ) { return event.starts_with( "recv" ) ? "recv" : "send"; } );

    // Lock discipline on channels, and each cpu alone drives its scheduler
    // and the modes of its partitions.
    rely_guarantee_spec rg;
    rg.component_of = []( const action_id& a ) { return component_of( a ); };
    const auto shared = cl.domains;
    for ( int k = 0; k < c.cpus; ++k )
    {
        const value me = k + 1;
        std::vector< std::size_t > owned{ cl.cur[ k ] };
        for ( int p = 0; p < parts; ++p )
            if ( c.partition_scheduler[ p ] == k + 1 )
                owned.push_back( cl.partst[ p ] );
        component_rg spec;
        spec.rely.contains = [ = ]( const state& s, const state& t )
        {
            for ( auto v : owned )
                if ( s[ v ] != t[ v ] )
                    return false;
            for ( std::size_t ch = 0; ch < cl.qbuf.size(); ++ch )
                if ( s[ cl.qlock[ ch ] ] == me &&
                     ( s[ cl.qbuf[ ch ] ] != t[ cl.qbuf[ ch ] ] || s[ cl.qsize[ ch ] ] != t[ cl.qsize[ ch ] ] ||
                       s[ cl.obuf[ ch ] ] != t[ cl.obuf[ ch ] ] || s[ cl.qlock[ ch ] ] != t[ cl.qlock[ ch ] ] ) )
                    return false;
            return true;
        };
        spec.guarantee.contains = [ = ]( const state& s, const state& t )
        {
            for ( std::size_t k2 = 0; k2 < cl.cur.size(); ++k2 )
                if ( s[ cl.cur[ k2 ] ] != t[ cl.cur[ k2 ] ] && cl.cur[ k2 ] != owned.front() )
                    return false;
            for ( std::size_t p = 0; p < cl.partst.size(); ++p )
                if ( s[ cl.partst[ p ] ] != t[ cl.partst[ p ] ] &&
                     std::find( owned.begin(), owned.end(), cl.partst[ p ] ) == owned.end() )
                    return false;
            for ( std::size_t ch = 0; ch < cl.qbuf.size(); ++ch )
            {
                const bool data = s[ cl.qbuf[ ch ] ] != t[ cl.qbuf[ ch ] ] || s[ cl.qsize[ ch ] ] != t[ cl.qsize[ ch ] ];
                const bool lock = s[ cl.qlock[ ch ] ] != t[ cl.qlock[ ch ] ];
                const bool ob = s[ cl.obuf[ ch ] ] != t[ cl.obuf[ ch ] ];
                if ( !data && !lock && !ob )
                    continue;
                const bool acquire = s[ cl.qlock[ ch ] ] == 0 && t[ cl.qlock[ ch ] ] == me && !data && !ob;
                const bool update = s[ cl.qlock[ ch ] ] == me && !lock && !ob;
                const bool release = s[ cl.qlock[ ch ] ] == me && t[ cl.qlock[ ch ] ] == 0 && !data;
                if ( !acquire && !update && !release )
                    return false;
            }
            return true;
        };
        spec.guarantee.successors = [ = ]( const state& s ) { return detail::perturbations( s, shared ); };
        spec.abstract_rely = state_relation::any();
        spec.abstract_guarantee = state_relation::any();
        rg.components.emplace( cpu_names[ k ], std::move( spec ) );
    }

    model_bundle out{ "arinc", {}, refinement_pair{ concrete, abstract, alpha, zeta }, rg };
    if ( variant == arinc_variant::queuing_mode )
        out.name = "arinc-queuing-mode";
    else if ( variant == arinc_variant::port_identifier )
        out.name = "arinc-port-id";
    int capacity = c.channels.empty() ? 1 : c.channels.front().capacity;
    out.parameters = { { "cpus", std::to_string( c.cpus ) },
                       { "partitions", std::to_string( parts ) },
                       { "channels", std::to_string( nch ) },
                       { "capacity", std::to_string( capacity ) },
                       { "messages", std::to_string( c.messages ) } };
    return out;
}

} // namespace ifsec::models
