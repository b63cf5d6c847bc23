#pragma once

#include "ifsec/refinement.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ifsec::models
{

struct model_bundle
{
    std::string name;
    std::map< std::string, std::string > parameters;
    refinement_pair pair;
    rely_guarantee_spec rg;
};

// -- IPC demo --------------------------------------------------------------

enum class demo_variant
{
    secure,
    insecure_counter,
    insecure_fullstatus,
};

struct demo_options
{
    int threads = 3;
    int capacity = 1;
    int messages = 1;
    demo_variant variant = demo_variant::secure;
    // Guarantee that also admits writes to a queue locked by another thread.
    bool widen_guarantee = false;
};

[[nodiscard]] model_bundle build_demo( const demo_options& options = {} );

// -- ARINC 653 multicore IPC -----------------------------------------------

enum class arinc_variant
{
    secure,
    queuing_mode,
    port_identifier,
};

struct arinc_channel
{
    int source_port;
    int dest_port;
    int capacity = 1;
};

struct arinc_config
{
    int cpus = 2;                           // scheduler k runs on cpu k
    std::vector< int > partition_scheduler; // p2s, 1-based schedulers
    std::vector< int > port_partition;      // p2p, 1-based partitions
    std::vector< arinc_channel > channels;  // chsrc, chdest, chmax; 1-based ports
    int messages = 1;
};

// Partition 1 on cpu 1, the rest on the last cpu; channel i runs from a port
// of partition i to a port of partition i+1 (wrapping).
[[nodiscard]] arinc_config default_arinc_config( int cpus = 2, int partitions = 3, int channels = 1,
                                                 int capacity = 1, int messages = 1 );
[[nodiscard]] model_bundle build_arinc( const arinc_config& config, arinc_variant variant = arinc_variant::secure );

// -- sealed-bid auction ----------------------------------------------------

struct auction_options
{
    int users = 2;
    std::vector< int > bids{ 1, 2 };
    std::vector< int > reserves{ 1 };
    // Fault injection: publishing does not wait for the auction to close.
    bool publish_early = false;
};

[[nodiscard]] model_bundle build_auction( const auction_options& options = {} );

// -- registry --------------------------------------------------------------

struct model_parameters
{
    std::optional< int > threads;
    std::optional< int > capacity;
    std::optional< int > messages;
    std::optional< int > users;
    std::optional< int > bids;
    std::optional< int > cpus;
    std::optional< int > partitions;
    std::optional< int > channels;
};

struct model_info
{
    std::string name;
    std::string description;
    std::vector< std::pair< std::string, int > > defaults; // flag name, default
    bool secure;
};

[[nodiscard]] const std::vector< model_info >& registry();
[[nodiscard]] const model_info* find_model( const std::string& name );
// UsageError for unknown names, out-of-range or inapplicable parameters.
[[nodiscard]] model_bundle build_model( const std::string& name, const model_parameters& parameters = {} );

} // namespace ifsec::models
