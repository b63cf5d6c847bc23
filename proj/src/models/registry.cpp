#include "ifsec/models.hpp"

namespace ifsec::models
{

const std::vector< model_info >& registry()
{
    static const std::vector< model_info > models{
        { "demo", "IPC send/recv over locked message queues, cyclic policy t1 -> t2 -> t3 -> t1",
          { { "threads", 3 }, { "capacity", 1 }, { "messages", 1 } }, true },
        { "demo-insecure-counter", "demo whose send bumps the receiver's attempt counter before the policy check",
          { { "threads", 3 }, { "capacity", 1 }, { "messages", 1 } }, false },
        { "demo-insecure-fullstatus", "demo whose senders observe the full status of their receivers' queues",
          { { "threads", 3 }, { "capacity", 1 }, { "messages", 1 } }, false },
        { "arinc", "multicore partition scheduling and queuing-channel IPC",
          { { "cpus", 2 }, { "partitions", 3 }, { "channels", 1 }, { "capacity", 1 }, { "messages", 1 } }, true },
        { "arinc-queuing-mode", "arinc where a send reports whether the channel is full",
          { { "cpus", 2 }, { "partitions", 3 }, { "channels", 1 }, { "capacity", 1 }, { "messages", 1 } }, false },
        { "arinc-port-id", "arinc without the check that a port belongs to the calling partition",
          { { "cpus", 2 }, { "partitions", 3 }, { "channels", 1 }, { "capacity", 1 }, { "messages", 1 } }, false },
        { "auction", "sealed-bid auction with server, publisher and one handler per user",
          { { "users", 2 }, { "bids", 2 } }, true },
    };
    return models;
}

const model_info* find_model( const std::string& name )
{
    for ( const auto& m : registry() )
        if ( m.name == name )
            return &m;
    return nullptr;
}

model_bundle build_model( const std::string& name, const model_parameters& p )
{
    const auto* info = find_model( name );
    if ( !info )
        throw usage_error( "unknown model `" + name + "`; see `ifsec list`" );

    auto value_of = [ & ]( const char* flag, const std::optional< int >& given ) -> int
    {
        for ( const auto& [ key, def ] : info->defaults )
            if ( key == flag )
                return given.value_or( def );
        if ( given )
            throw usage_error( std::string( "--" ) + flag + " does not apply to model " + name );
        return 0;
    };
    const int threads = value_of( "threads", p.threads );
    const int capacity = value_of( "capacity", p.capacity );
    const int messages = value_of( "messages", p.messages );
    const int users = value_of( "users", p.users );
    const int bids = value_of( "bids", p.bids );
    const int cpus = value_of( "cpus", p.cpus );
    const int partitions = value_of( "partitions", p.partitions );
    const int channels = value_of( "channels", p.channels );

    if ( name.starts_with( "demo" ) )
    {
        demo_options o;
        o.threads = threads;
        o.capacity = capacity;
        o.messages = messages;
        if ( name == "demo-insecure-counter" )
            o.variant = demo_variant::insecure_counter;
        else if ( name == "demo-insecure-fullstatus" )
            o.variant = demo_variant::insecure_fullstatus;
        return build_demo( o );
    }
    if ( name.starts_with( "arinc" ) )
    {
        auto variant = arinc_variant::secure;
        if ( name == "arinc-queuing-mode" )
            variant = arinc_variant::queuing_mode;
        else if ( name == "arinc-port-id" )
            variant = arinc_variant::port_identifier;
        return build_arinc( default_arinc_config( cpus, partitions, channels, capacity, messages ), variant );
    }
    if ( bids < 1 || bids > 3 )
        throw usage_error( "auction bids out of range (1..3)" );
    auction_options o;
    o.users = users;
    o.bids.clear();
    for ( int b = 1; b <= bids; ++b )
        o.bids.push_back( b );
    return build_auction( o );
}

} // namespace ifsec::models
