#include "ifsec/programs.hpp"

#include <atomic>
#include <unordered_map>

namespace ifsec::programs
{

enum class prog_kind
{
    done,
    basic,
    atomic,
    seq,
    cond,
    loop,
    await,
};

struct prog_node
{
    prog_kind kind = prog_kind::done;
    std::uint64_t id = 0;
    std::uint64_t origin = 0; // loop family, shared by unrolled copies
    std::string label;
    update f;
    relation r;
    predicate test;
    prog first;
    prog second;
    std::size_t bound = 0;
};

namespace
{

std::uint64_t next_id()
{
    static std::atomic< std::uint64_t > counter{ 1 };
    return counter++;
}

prog make( prog_node node )
{
    node.id = next_id();
    return std::make_shared< const prog_node >( std::move( node ) );
}

prog make_loop( predicate test, prog body, std::size_t bound, std::uint64_t origin )
{
    prog_node n;
    n.kind = prog_kind::loop;
    n.test = std::move( test );
    n.first = std::move( body );
    n.bound = bound;
    n.id = next_id();
    n.origin = origin ? origin : n.id;
    return std::make_shared< const prog_node >( std::move( n ) );
}

std::vector< prog_transition > exec_head( const prog& p, const state& s );

std::vector< state > exec_all( const prog& p, const state& s )
{
    auto r = resolve( p, s );
    if ( is_done( r ) )
        return { s };
    std::vector< state > out;
    for ( auto& t : exec_head( r, s ) )
    {
        auto rest = exec_all( t.rest, t.post );
        out.insert( out.end(), rest.begin(), rest.end() );
    }
    return out;
}

std::vector< prog_transition > exec_head( const prog& p, const state& s )
{
    switch ( p->kind )
    {
    case prog_kind::basic:
    {
        state next = s;
        p->f( next );
        return { { done(), std::move( next ), p->label } };
    }
    case prog_kind::atomic:
    {
        std::vector< prog_transition > out;
        for ( auto& next : p->r( s ) )
            out.push_back( { done(), std::move( next ), p->label } );
        return out;
    }
    case prog_kind::await:
    {
        if ( !p->test( s ) )
            return {};
        std::vector< prog_transition > out;
        for ( auto& next : exec_all( p->first, s ) )
            out.push_back( { done(), std::move( next ), p->label } );
        return out;
    }
    case prog_kind::seq:
    {
        auto out = exec_head( p->first, s );
        for ( auto& t : out )
            t.rest = is_done( t.rest ) ? p->second : sequence( t.rest, p->second );
        return out;
    }
    default:
        throw model_error( "internal: unresolved program head" );
    }
}

void collect_labels( const prog& p, std::vector< std::string >& out, std::set< std::uint64_t >& seen )
{
    if ( !p || !seen.insert( p->id ).second )
        return;
    switch ( p->kind )
    {
    case prog_kind::basic:
    case prog_kind::atomic:
    case prog_kind::await:
        out.push_back( p->label );
        break;
    default:
        break;
    }
    if ( p->kind != prog_kind::await )
    {
        collect_labels( p->first, out, seen );
        collect_labels( p->second, out, seen );
    }
}

// Structural identity of a remainder; unrolled loop copies are keyed by
// their family and remaining bound.
std::string key_of( const prog& p )
{
    switch ( p->kind )
    {
    case prog_kind::done:
        return "0";
    case prog_kind::seq:
        return "(" + key_of( p->first ) + " " + key_of( p->second ) + ")";
    case prog_kind::loop:
        return "w" + std::to_string( p->origin ) + ":" + std::to_string( p->bound );
    default:
        return "#" + std::to_string( p->id );
    }
}

std::string head_label( const prog& p )
{
    if ( p->kind == prog_kind::seq )
        return head_label( p->first );
    return p->label;
}

} // namespace

prog done()
{
    static const prog d = make( {} );
    return d;
}

prog basic( std::string label, update f )
{
    prog_node n;
    n.kind = prog_kind::basic;
    n.label = std::move( label );
    n.f = std::move( f );
    return make( std::move( n ) );
}

prog atomic( std::string label, relation r )
{
    prog_node n;
    n.kind = prog_kind::atomic;
    n.label = std::move( label );
    n.r = std::move( r );
    return make( std::move( n ) );
}

prog sequence( prog first, prog rest )
{
    if ( is_done( first ) )
        return rest;
    if ( is_done( rest ) )
        return first;
    prog_node n;
    n.kind = prog_kind::seq;
    n.first = std::move( first );
    n.second = std::move( rest );
    return make( std::move( n ) );
}

prog sequence( std::vector< prog > parts )
{
    prog out = done();
    for ( auto it = parts.rbegin(); it != parts.rend(); ++it )
        out = sequence( *it, out );
    return out;
}

prog cond( predicate test, prog then, prog otherwise )
{
    prog_node n;
    n.kind = prog_kind::cond;
    n.test = std::move( test );
    n.first = std::move( then );
    n.second = std::move( otherwise );
    return make( std::move( n ) );
}

prog loop( predicate test, prog body, std::size_t bound )
{
    if ( bound == 0 )
        throw model_error( "loop bound must be positive" );
    return make_loop( std::move( test ), std::move( body ), bound, 0 );
}

prog await( std::string label, predicate test, prog body )
{
    prog_node n;
    n.kind = prog_kind::await;
    n.label = std::move( label );
    n.test = std::move( test );
    n.first = std::move( body );
    return make( std::move( n ) );
}

bool is_done( const prog& p ) { return !p || p->kind == prog_kind::done; }

prog resolve( const prog& p, const state& s )
{
    if ( is_done( p ) )
        return done();
    switch ( p->kind )
    {
    case prog_kind::seq:
    {
        auto head = resolve( p->first, s );
        if ( is_done( head ) )
            return resolve( p->second, s );
        return head == p->first ? p : sequence( head, p->second );
    }
    case prog_kind::cond:
        return resolve( p->test( s ) ? p->first : p->second, s );
    case prog_kind::loop:
        if ( !p->test( s ) )
            return done();
        if ( p->bound == 0 )
            throw model_error( "loop iteration bound exhausted" );
        return resolve( sequence( p->first, make_loop( p->test, p->first, p->bound - 1, p->origin ) ), s );
    default:
        return p;
    }
}

std::vector< prog_transition > prog_step( const prog& p, const state& s )
{
    auto r = resolve( p, s );
    if ( is_done( r ) )
        return {};
    return exec_head( r, s );
}

std::vector< std::string > step_labels( const prog& p )
{
    std::vector< std::string > out;
    std::set< std::uint64_t > seen;
    collect_labels( p, out, seen );
    return out;
}

std::string step_action_label( const std::string& component, const std::string& event, const std::string& step )
{
    return component + "/" + event + "/" + step;
}

std::string component_of( const action_id& a ) { return a.label.substr( 0, a.label.find( '/' ) ); }

namespace
{

struct context_entry
{
    std::size_t event;
    prog rest;
    std::string name;
};

struct compiled_table
{
    std::vector< state > states;
    std::unordered_map< state, std::uint32_t, state_hash > index;
    // per state: (action, successor) pairs
    std::vector< std::vector< std::pair< std::size_t, std::uint32_t > > > edges;
};

} // namespace

secure_system compile( const concurrent_system& cs, const domain_config& cfg, std::size_t budget )
{
    const auto& shared = cs.initial.layout();
    if ( !shared )
        throw model_error( "concurrent system without an initial state" );
    if ( std::set< std::string >( cs.components.begin(), cs.components.end() ).size() != cs.components.size() )
        throw model_error( "duplicate component id" );

    // Static action set and domains.
    std::map< std::string, std::size_t > action_of_label;
    std::map< action_id, std::string > dom;
    std::vector< action_id > actions;
    for ( const auto& c : cs.components )
    {
        auto pool = cs.pool.find( c );
        if ( pool == cs.pool.end() )
            continue;
        std::set< std::string > event_labels;
        for ( const auto& e : pool->second )
        {
            if ( !event_labels.insert( e.label ).second )
                throw model_error( "duplicate event `" + e.label + "` on component " + c );
            auto labels = step_labels( e.body );
            if ( std::set< std::string >( labels.begin(), labels.end() ).size() != labels.size() )
                throw model_error( "event `" + e.label + "` reuses a step label" );
            for ( const auto& l : labels )
            {
                action_id a{ step_action_label( c, e.label, l ), std::nullopt };
                dom[ a ] = e.domain;
                actions.push_back( a );
            }
        }
    }
    std::sort( actions.begin(), actions.end() );
    for ( std::size_t i = 0; i < actions.size(); ++i )
        action_of_label[ actions[ i ].label ] = i;

    const auto n_shared = shared->size();
    const auto n_comp = cs.components.size();

    std::vector< context_entry > contexts{ { 0, nullptr, "idle" } }; // 0 = idle
    std::map< std::string, value > context_ids;
    std::vector< std::vector< value > > contexts_of_event;

    auto context_value = [ & ]( std::size_t event, const prog& rest, const std::string& event_label ) -> value
    {
        auto key = std::to_string( event ) + "|" + key_of( rest );
        auto it = context_ids.find( key );
        if ( it != context_ids.end() )
            return it->second;
        auto id = static_cast< value >( contexts.size() );
        contexts.push_back( { event, rest, event_label + "@" + head_label( rest ) } );
        context_ids.emplace( key, id );
        return id;
    };

    // Flatten each component's events into one list so context values can
    // name (component event index, remainder).
    std::vector< std::vector< const event* > > events( n_comp );
    for ( std::size_t c = 0; c < n_comp; ++c )
    {
        auto pool = cs.pool.find( cs.components[ c ] );
        if ( pool != cs.pool.end() )
            for ( const auto& e : pool->second )
                events[ c ].push_back( &e );
    }

    std::vector< variable > vars = shared->variables();
    for ( const auto& c : cs.components )
        vars.push_back( { "ctx." + c, value_format::label, {} } );
    auto provisional = std::make_shared< const schema >( vars );

    auto table = std::make_shared< compiled_table >();
    auto intern = [ & ]( state s ) -> std::uint32_t
    {
        auto [ it, inserted ] = table->index.emplace( s, static_cast< std::uint32_t >( table->states.size() ) );
        if ( inserted )
        {
            if ( table->states.size() >= budget )
                throw budget_error( "state budget of " + std::to_string( budget ) + " exceeded during compilation" );
            table->states.push_back( std::move( s ) );
            table->edges.emplace_back();
        }
        return it->second;
    };

    {
        std::vector< value > init = cs.initial.values();
        init.resize( n_shared + n_comp, 0 );
        intern( state( provisional, std::move( init ) ) );
    }

    for ( std::uint32_t i = 0; i < table->states.size(); ++i )
    {
        const state current = table->states[ i ];
        std::vector< std::pair< std::size_t, std::uint32_t > > edges;
        for ( std::size_t c = 0; c < n_comp; ++c )
        {
            const auto& comp = cs.components[ c ];
            const auto ctx = current[ n_shared + c ];
            auto emit = [ & ]( std::size_t ev, const prog_transition& t )
            {
                const auto& e = *events[ c ][ ev ];
                auto label = step_action_label( comp, e.label, t.label );
                auto rest = resolve( t.rest, t.post );
                state next = t.post;
                next[ n_shared + c ] = is_done( rest ) ? 0 : context_value( ev, rest, e.label );
                auto target = intern( std::move( next ) );
                edges.emplace_back( action_of_label.at( label ), target );
            };
            if ( ctx == 0 )
            {
                for ( std::size_t ev = 0; ev < events[ c ].size(); ++ev )
                {
                    const auto& e = *events[ c ][ ev ];
                    if ( e.guard && !e.guard( current ) )
                        continue;
                    for ( const auto& t : prog_step( e.body, current ) )
                        emit( ev, t );
                }
            }
            else
            {
                const auto entry = contexts[ ctx ];
                for ( const auto& t : prog_step( entry.rest, current ) )
                    emit( entry.event, t );
            }
        }
        table->edges[ i ] = std::move( edges );
    }

    // Final layout: context labels are known now. Duplicate names get a suffix.
    std::vector< std::vector< std::string > > ctx_labels( n_comp, std::vector< std::string >{} );
    {
        std::map< std::string, int > uses;
        std::vector< std::string > names;
        for ( const auto& ctx : contexts )
        {
            auto n = ++uses[ ctx.name ];
            names.push_back( n == 1 ? ctx.name : ctx.name + "~" + std::to_string( n ) );
        }
        for ( std::size_t c = 0; c < n_comp; ++c )
            vars[ n_shared + c ].labels = names;
    }
    auto layout = std::make_shared< const schema >( vars );
    for ( auto& s : table->states )
        s = state( layout, s.values() );
    table->index.clear();
    for ( std::uint32_t i = 0; i < table->states.size(); ++i )
        table->index.emplace( table->states[ i ], i );

    auto step = [ table ]( const state& s, std::size_t action ) -> std::vector< state >
    {
        auto it = table->index.find( s );
        if ( it == table->index.end() )
            throw usage_error( "state " + s.serialize() + " is not part of the compiled machine" );
        std::vector< state > out;
        for ( const auto& [ a, t ] : table->edges[ it->second ] )
            if ( a == action )
                out.push_back( table->states[ t ] );
        return out;
    };
    auto universe = [ table ]() { return table->states; };

    state_machine machine( layout, actions, table->states.front(), step, universe );
    info_flow_config config( cfg.domains, cfg.policy, dom, cfg.observe );
    return secure_system( std::move( machine ), std::move( config ) );
}

} // namespace ifsec::programs
