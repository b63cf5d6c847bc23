#include "ifsec/core.hpp"
#include "ifsec/state_space.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <numeric>

namespace ifsec
{

schema::schema( std::vector< variable > vars ) : _vars{ std::move( vars ) }
{
    for ( std::size_t i = 0; i < _vars.size(); ++i )
    {
        if ( !_index.emplace( _vars[ i ].name, i ).second )
            throw model_error( "duplicate variable `" + _vars[ i ].name + "`" );
    }
    _sorted.resize( _vars.size() );
    std::iota( _sorted.begin(), _sorted.end(), 0 );
    std::sort( _sorted.begin(), _sorted.end(),
               [ & ]( std::size_t a, std::size_t b ) { return _vars[ a ].name < _vars[ b ].name; } );
}

std::optional< std::size_t > schema::find( std::string_view name ) const
{
    auto it = _index.find( name );
    if ( it == _index.end() )
        return std::nullopt;
    return it->second;
}

std::size_t schema::index( std::string_view name ) const
{
    if ( auto i = find( name ) )
        return *i;
    throw usage_error( "unknown variable `" + std::string( name ) + "`" );
}

std::string schema::format_value( std::size_t var, value v ) const
{
    const auto& decl = _vars.at( var );
    switch ( decl.format )
    {
    case value_format::integer:
        return std::to_string( v );
    case value_format::label:
        if ( v >= 0 && static_cast< std::size_t >( v ) < decl.labels.size() )
            return decl.labels[ v ];
        return std::to_string( v );
    case value_format::sequence:
    {
        const auto alphabet = static_cast< value >( decl.labels.size() );
        std::string out = "[";
        bool first = true;
        for ( value e : seq::elements( v, alphabet ) )
        {
            if ( !first )
                out += ',';
            first = false;
            out += decl.labels.at( e - 1 );
        }
        return out + "]";
    }
    }
    return std::to_string( v );
}

value schema::parse_value( std::size_t var, std::string_view text ) const
{
    const auto& decl = _vars.at( var );
    auto bad = [ & ]() { return model_error( "bad value `" + std::string( text ) + "` for " + decl.name ); };
    auto integer = [ & ]( std::string_view digits ) -> value
    {
        value v = 0;
        auto [ end, ec ] = std::from_chars( digits.data(), digits.data() + digits.size(), v );
        if ( ec != std::errc{} || end != digits.data() + digits.size() )
            throw bad();
        return v;
    };
    switch ( decl.format )
    {
    case value_format::integer:
        return integer( text );
    case value_format::label:
    {
        auto it = std::find( decl.labels.begin(), decl.labels.end(), text );
        return it != decl.labels.end() ? static_cast< value >( it - decl.labels.begin() ) : integer( text );
    }
    case value_format::sequence:
    {
        if ( text.size() < 2 || text.front() != '[' || text.back() != ']' )
            throw bad();
        const auto alphabet = static_cast< value >( decl.labels.size() );
        std::vector< value > elements;
        auto body = text.substr( 1, text.size() - 2 );
        while ( !body.empty() )
        {
            const auto comma = body.find( ',' );
            const auto item = body.substr( 0, comma );
            auto it = std::find( decl.labels.begin(), decl.labels.end(), item );
            if ( it == decl.labels.end() )
                throw bad();
            elements.push_back( static_cast< value >( it - decl.labels.begin() ) + 1 );
            body = comma == std::string_view::npos ? std::string_view{} : body.substr( comma + 1 );
        }
        return seq::make( elements, alphabet );
    }
    }
    throw bad();
}

state parse_state( const schema_ptr& layout, std::string_view text )
{
    std::vector< value > values( layout->size(), 0 );
    std::vector< bool > seen( layout->size(), false );
    while ( !text.empty() )
    {
        const auto semi = text.find( ';' );
        const auto item = text.substr( 0, semi );
        const auto eq = item.find( '=' );
        if ( eq == std::string_view::npos )
            throw model_error( "bad state item `" + std::string( item ) + "`" );
        const auto var = layout->find( item.substr( 0, eq ) );
        if ( !var )
            throw model_error( "unknown variable `" + std::string( item.substr( 0, eq ) ) + "`" );
        values[ *var ] = layout->parse_value( *var, item.substr( eq + 1 ) );
        seen[ *var ] = true;
        text = semi == std::string_view::npos ? std::string_view{} : text.substr( semi + 1 );
    }
    if ( std::find( seen.begin(), seen.end(), false ) != seen.end() )
        throw model_error( "state text does not assign every variable" );
    return state( layout, std::move( values ) );
}

state::state( schema_ptr layout, std::vector< value > values )
    : _layout{ std::move( layout ) }, _values{ std::move( values ) }
{
    if ( _layout && _values.size() != _layout->size() )
        throw model_error( "state arity does not match its schema" );
}

value state::get( std::string_view name ) const { return _values[ _layout->index( name ) ]; }

void state::set( std::string_view name, value v ) { _values[ _layout->index( name ) ] = v; }

std::string state::serialize() const
{
    std::string out;
    bool first = true;
    for ( std::size_t i : _layout->sorted_order() )
    {
        if ( !first )
            out += ';';
        first = false;
        out += _layout->at( i ).name;
        out += '=';
        out += _layout->format_value( i, _values[ i ] );
    }
    return out;
}

std::size_t state_hash::operator()( const state& s ) const noexcept
{
    std::size_t h = 1469598103934665603ull;
    for ( value v : s.values() )
    {
        h ^= static_cast< std::size_t >( v ) + 0x9e3779b97f4a7c15ull + ( h << 6 ) + ( h >> 2 );
    }
    return h;
}

namespace seq
{

std::size_t length( value s, value alphabet )
{
    std::size_t n = 0;
    for ( ; s > 0; s /= alphabet + 1 )
        ++n;
    return n;
}

value at( value s, std::size_t i, value alphabet )
{
    for ( std::size_t k = 0; k < i; ++k )
        s /= alphabet + 1;
    return s % ( alphabet + 1 );
}

value push_back( value s, value element, value alphabet )
{
    value scale = 1;
    for ( std::size_t k = 0; k < length( s, alphabet ); ++k )
        scale *= alphabet + 1;
    return s + element * scale;
}

value pop_back( value s, value alphabet )
{
    const auto n = length( s, alphabet );
    if ( n == 0 )
        return s;
    value scale = 1;
    for ( std::size_t k = 0; k + 1 < n; ++k )
        scale *= alphabet + 1;
    return s % scale;
}

value back( value s, value alphabet )
{
    const auto n = length( s, alphabet );
    return n == 0 ? 0 : at( s, n - 1, alphabet );
}

value make( const std::vector< value >& elements, value alphabet )
{
    value s = 0;
    for ( value e : elements )
        s = push_back( s, e, alphabet );
    return s;
}

std::vector< value > elements( value s, value alphabet )
{
    std::vector< value > out;
    for ( ; s > 0; s /= alphabet + 1 )
        out.push_back( s % ( alphabet + 1 ) );
    return out;
}

std::vector< value > all( std::size_t max_len, value alphabet )
{
    std::vector< value > out{ 0 };
    std::vector< value > layer{ 0 };
    for ( std::size_t len = 1; len <= max_len; ++len )
    {
        std::vector< value > next;
        for ( value s : layer )
            for ( value e = 1; e <= alphabet; ++e )
                next.push_back( push_back( s, e, alphabet ) );
        out.insert( out.end(), next.begin(), next.end() );
        layer = std::move( next );
    }
    return out;
}

} // namespace seq

std::string action_id::to_string() const
{
    if ( !payload )
        return label;
    return label + "#" + std::to_string( *payload );
}

action_id parse_action( std::string_view text )
{
    auto hash = text.rfind( '#' );
    if ( hash != std::string_view::npos && hash + 1 < text.size() )
    {
        auto digits = text.substr( hash + 1 );
        bool numeric = std::all_of( digits.begin(), digits.end(),
                                    []( char c ) { return ( c >= '0' && c <= '9' ) || c == '-'; } );
        if ( numeric )
            return { std::string( text.substr( 0, hash ) ), std::stoll( std::string( digits ) ) };
    }
    return { std::string( text ), std::nullopt };
}

void canonicalize( std::vector< state >& states )
{
    if ( states.size() < 2 )
        return;
    std::vector< std::pair< std::string, std::size_t > > keys;
    keys.reserve( states.size() );
    for ( std::size_t i = 0; i < states.size(); ++i )
        keys.emplace_back( states[ i ].serialize(), i );
    std::sort( keys.begin(), keys.end() );
    keys.erase( std::unique( keys.begin(), keys.end(),
                             []( const auto& a, const auto& b ) { return a.first == b.first; } ),
                keys.end() );
    std::vector< state > out;
    out.reserve( keys.size() );
    for ( const auto& [ key, i ] : keys )
        out.push_back( std::move( states[ i ] ) );
    states = std::move( out );
}

state_machine::state_machine( schema_ptr layout, std::vector< action_id > actions, state initial,
                              step_function step, universe_function universe )
    : _layout{ std::move( layout ) }, _actions{ std::move( actions ) }, _initial{ std::move( initial ) },
      _step{ std::move( step ) }, _universe{ std::move( universe ) }
{
    std::sort( _actions.begin(), _actions.end() );
    for ( std::size_t i = 0; i < _actions.size(); ++i )
    {
        if ( !_action_index.emplace( _actions[ i ], i ).second )
            throw model_error( "duplicate action `" + _actions[ i ].to_string() + "`" );
    }
    if ( !_step )
        throw model_error( "state machine without a step function" );
}

std::optional< std::size_t > state_machine::find_action( const action_id& a ) const
{
    auto it = _action_index.find( a );
    if ( it == _action_index.end() )
        return std::nullopt;
    return it->second;
}

std::size_t state_machine::action_index( const action_id& a ) const
{
    if ( auto i = find_action( a ) )
        return *i;
    throw usage_error( "unknown action `" + a.to_string() + "`" );
}

std::vector< state > state_machine::universe() const
{
    if ( !_universe )
        throw usage_error( "the model declares no state universe" );
    auto states = _universe();
    canonicalize( states );
    return states;
}

std::vector< state > state_machine::step( const state& s, std::size_t action ) const
{
    auto out = _step( s, action );
    canonicalize( out );
    return out;
}

info_flow_config::info_flow_config( std::vector< std::string > domains,
                                    std::set< std::pair< std::string, std::string > > policy,
                                    std::map< action_id, std::string > dom, observe_function observe )
    : _domains{ std::move( domains ) }, _policy{ std::move( policy ) }, _dom{ std::move( dom ) },
      _observe{ std::move( observe ) }
{
    std::sort( _domains.begin(), _domains.end() );
    if ( std::adjacent_find( _domains.begin(), _domains.end() ) != _domains.end() )
        throw model_error( "duplicate domain" );
    _allowed.assign( _domains.size(), std::vector< bool >( _domains.size(), false ) );
    for ( const auto& [ from, to ] : _policy )
    {
        auto f = find_domain( from );
        auto t = find_domain( to );
        if ( !f || !t )
            throw model_error( "policy edge " + from + " -> " + to + " names an undeclared domain" );
        _allowed[ *f ][ *t ] = true;
    }
    for ( const auto& [ a, d ] : _dom )
    {
        if ( !find_domain( d ) )
            throw model_error( "action `" + a.to_string() + "` is assigned to undeclared domain " + d );
    }
    if ( !_observe )
        throw model_error( "information flow configuration without observations" );
}

std::optional< std::size_t > info_flow_config::find_domain( std::string_view d ) const
{
    auto it = std::lower_bound( _domains.begin(), _domains.end(), d );
    if ( it == _domains.end() || *it != d )
        return std::nullopt;
    return static_cast< std::size_t >( it - _domains.begin() );
}

std::size_t info_flow_config::domain_index( std::string_view d ) const
{
    if ( auto i = find_domain( d ) )
        return *i;
    throw usage_error( "unknown domain `" + std::string( d ) + "`" );
}

bool info_flow_config::allowed( std::string_view from, std::string_view to ) const
{
    return allowed( domain_index( from ), domain_index( to ) );
}

const std::string& info_flow_config::dom( const action_id& a ) const
{
    auto it = _dom.find( a );
    if ( it == _dom.end() )
        throw usage_error( "no domain for action `" + a.to_string() + "`" );
    return it->second;
}

observation info_flow_config::observe( std::string_view d, const state& s ) const
{
    return _observe( _domains[ domain_index( d ) ], s );
}

std::vector< std::string > info_flow_config::missing_reflexive() const
{
    std::vector< std::string > out;
    for ( std::size_t i = 0; i < _domains.size(); ++i )
        if ( !_allowed[ i ][ i ] )
            out.push_back( _domains[ i ] );
    return out;
}

secure_system::secure_system( state_machine machine, info_flow_config config )
    : _machine{ std::move( machine ) }, _config{ std::move( config ) }
{
    for ( const auto& a : _machine.actions() )
    {
        auto it = _config.dom_map().find( a );
        if ( it == _config.dom_map().end() )
            throw model_error( "action `" + a.to_string() + "` has no domain" );
        _action_domain.push_back( _config.domain_index( it->second ) );
    }
}

std::vector< state > step_total( const secure_system& sys, const state& s, const action_id& a )
{
    auto out = sys.machine().step( s, sys.machine().action_index( a ) );
    if ( out.empty() )
        out.push_back( s );
    return out;
}

std::string_view to_string( step_semantics semantics )
{
    return semantics == step_semantics::raw ? "raw" : "stutter";
}

std::vector< state > run( const secure_system& sys, const std::vector< state >& starts,
                          std::span< const action_id > actions, step_semantics semantics )
{
    std::vector< state > current = starts;
    canonicalize( current );
    for ( const auto& a : actions )
    {
        std::vector< state > next;
        for ( const auto& s : current )
        {
            auto succ = semantics == step_semantics::stutter
                            ? step_total( sys, s, a )
                            : sys.machine().step( s, sys.machine().action_index( a ) );
            next.insert( next.end(), succ.begin(), succ.end() );
        }
        canonicalize( next );
        current = std::move( next );
    }
    return current;
}

bool indist( const info_flow_config& cfg, std::string_view d, const state& s1, const state& s2 )
{
    return cfg.observe( d, s1 ) == cfg.observe( d, s2 );
}

bool equidom( const info_flow_config& cfg, std::string_view d, const std::vector< state >& lhs,
              const std::vector< state >& rhs )
{
    (void)cfg.domain_index( d );
    for ( const auto& x : lhs )
        for ( const auto& y : rhs )
            if ( !indist( cfg, d, x, y ) )
                return false;
    return true;
}

std::vector< state > reachable( const secure_system& sys, std::optional< std::size_t > depth, std::size_t budget )
{
    auto space = state_space::explore( sys, { scope_kind::reachable, depth, budget } );
    std::vector< state > out;
    for ( state_ref s : space.scope() )
        out.push_back( space.at( s ) );
    return out;
}

// ---------------------------------------------------------------------------

state_ref state_space::intern( const state& s )
{
    auto [ it, inserted ] = _index.emplace( s, static_cast< state_ref >( _states.size() ) );
    if ( inserted )
    {
        if ( _states.size() >= _options.budget )
            throw budget_error( "state budget of " + std::to_string( _options.budget ) + " exceeded" );
        _states.push_back( s );
        _serialized.push_back( s.serialize() );
        _offsets.emplace_back();
        _parent.emplace_back();
    }
    return it->second;
}

void state_space::expand( state_ref s )
{
    const auto& machine = _sys->machine();
    const auto actions = machine.actions().size();
    std::vector< std::uint32_t > offsets;
    offsets.reserve( actions + 1 );
    for ( std::size_t a = 0; a < actions; ++a )
    {
        offsets.push_back( static_cast< std::uint32_t >( _succ.size() ) );
        auto next = machine.step( _states[ s ], a );
        if ( next.empty() )
            ++_disabled;
        for ( auto& n : next )
        {
            if ( _options.kind == scope_kind::universe && !_index.contains( n ) )
                throw model_error( "successor " + n.serialize() + " lies outside the declared universe" );
            auto ref = intern( n );
            _succ.push_back( ref );
        }
    }
    offsets.push_back( static_cast< std::uint32_t >( _succ.size() ) );
    _offsets[ s ] = std::move( offsets );
}

std::span< const state_ref > state_space::successors( state_ref s, std::size_t action ) const
{
    const auto& offsets = _offsets[ s ];
    if ( offsets.empty() )
        return {};
    return { _succ.data() + offsets[ action ], _succ.data() + offsets[ action + 1 ] };
}

std::optional< state_ref > state_space::find( const state& s ) const
{
    auto it = _index.find( s );
    if ( it == _index.end() )
        return std::nullopt;
    return it->second;
}

state_space state_space::explore( const secure_system& sys, const scope_options& options )
{
    state_space space;
    space._sys = &sys;
    space._options = options;
    const auto& machine = sys.machine();

    if ( options.kind == scope_kind::universe )
    {
        space.intern( machine.initial() );
        for ( const auto& s : machine.universe() )
            space.intern( s );
        for ( state_ref s = 0; s < space._states.size(); ++s )
            space.expand( s );
        space._scope.resize( space._states.size() );
        std::iota( space._scope.begin(), space._scope.end(), 0 );
    }
    else
    {
        space.intern( machine.initial() );
        std::vector< std::size_t > depth_of{ 0 };
        for ( state_ref s = 0; s < space._states.size(); ++s )
        {
            const auto depth = depth_of[ s ];
            if ( options.depth && depth > *options.depth )
                continue;
            space._scope.push_back( s );
            space.expand( s );
            depth_of.resize( space._states.size(), depth + 1 );
        }
    }
    space.finish();
    return space;
}

void state_space::finish()
{
    // Shortest paths by BFS over the stored graph, actions in canonical order.
    const auto actions = action_count();
    std::vector< bool > seen( _states.size(), false );
    std::deque< state_ref > queue{ 0 };
    seen[ 0 ] = true;
    while ( !queue.empty() )
    {
        auto s = queue.front();
        queue.pop_front();
        for ( std::size_t a = 0; a < actions; ++a )
            for ( auto t : successors( s, a ) )
                if ( !seen[ t ] )
                {
                    seen[ t ] = true;
                    _parent[ t ] = parent_link{ s, a };
                    queue.push_back( t );
                }
    }

    std::vector< state_ref > order( _states.size() );
    std::iota( order.begin(), order.end(), 0 );
    std::sort( order.begin(), order.end(),
               [ & ]( state_ref a, state_ref b ) { return _serialized[ a ] < _serialized[ b ]; } );
    _rank.assign( _states.size(), 0 );
    for ( std::size_t i = 0; i < order.size(); ++i )
        _rank[ order[ i ] ] = static_cast< std::uint32_t >( i );
    std::sort( _scope.begin(), _scope.end(), [ & ]( state_ref a, state_ref b ) { return _rank[ a ] < _rank[ b ]; } );

    const auto& cfg = _sys->config();
    _obs.assign( cfg.domains().size(), std::vector< std::uint32_t >( _states.size(), 0 ) );
    for ( std::size_t d = 0; d < cfg.domains().size(); ++d )
    {
        std::map< observation, std::uint32_t > ids;
        for ( state_ref s = 0; s < _states.size(); ++s )
        {
            auto o = cfg.observer()( cfg.domains()[ d ], _states[ s ] );
            auto [ it, _ ] = ids.emplace( std::move( o ), static_cast< std::uint32_t >( ids.size() ) );
            _obs[ d ][ s ] = it->second;
        }
    }
}

std::optional< std::vector< path_step > > state_space::path_to( state_ref s ) const
{
    std::vector< path_step > path;
    while ( s != 0 )
    {
        if ( !_parent[ s ] )
            return std::nullopt;
        path.push_back( { _parent[ s ]->action, s } );
        s = _parent[ s ]->from;
    }
    std::reverse( path.begin(), path.end() );
    return path;
}

} // namespace ifsec
