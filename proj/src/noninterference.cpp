#include "ifsec/noninterference.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <unordered_map>

namespace ifsec
{

std::set< std::string > sources( const trace& as, const std::string& d, const info_flow_config& cfg )
{
    (void)cfg.domain_index( d );
    std::set< std::string > out{ d };
    for ( auto it = as.rbegin(); it != as.rend(); ++it )
    {
        const auto& w = cfg.dom( *it );
        if ( std::any_of( out.begin(), out.end(), [ & ]( const std::string& v ) { return cfg.allowed( w, v ); } ) )
            out.insert( w );
    }
    return out;
}

trace ipurge( const trace& as, const std::string& d, const info_flow_config& cfg )
{
    (void)cfg.domain_index( d );
    std::set< std::string > src{ d };
    trace kept;
    for ( auto it = as.rbegin(); it != as.rend(); ++it )
    {
        const auto& w = cfg.dom( *it );
        if ( std::any_of( src.begin(), src.end(), [ & ]( const std::string& v ) { return cfg.allowed( w, v ); } ) )
            src.insert( w );
        if ( src.contains( w ) )
            kept.push_back( *it );
    }
    std::reverse( kept.begin(), kept.end() );
    return kept;
}

namespace
{

constexpr std::int64_t mixed = -1;

// Run sets from the initial state, interned so that a (set, action) step is
// computed once.
class run_table
{
    const secure_system& _sys;
    std::size_t _state_budget;
    bool _stutter;
    std::vector< state > _states;
    std::unordered_map< state, std::uint32_t, state_hash > _state_index;
    std::vector< std::vector< std::uint32_t > > _obs; // [state][domain]
    std::vector< std::map< observation, std::uint32_t > > _obs_ids;
    std::unordered_map< std::uint64_t, std::vector< std::uint32_t > > _state_step;

    std::vector< std::vector< std::uint32_t > > _sets;
    std::vector< std::vector< std::int64_t > > _uniform; // [set][domain]
    std::map< std::vector< std::uint32_t >, std::uint32_t > _set_index;
    std::unordered_map< std::uint64_t, std::uint32_t > _set_step;

public:
    bool stuttered = false;

    run_table( const secure_system& sys, std::size_t state_budget, step_semantics semantics )
        : _sys{ sys }, _state_budget{ state_budget }, _stutter{ semantics == step_semantics::stutter }, _obs_ids( sys.config().domains().size() )
    {
    }

    std::uint32_t intern_state( const state& s )
    {
        auto [ it, inserted ] = _state_index.emplace( s, static_cast< std::uint32_t >( _states.size() ) );
        if ( inserted )
        {
            if ( _states.size() >= _state_budget )
                throw budget_error( "state budget of " + std::to_string( _state_budget ) + " exceeded" );
            _states.push_back( s );
            const auto& cfg = _sys.config();
            std::vector< std::uint32_t > row;
            for ( std::size_t d = 0; d < cfg.domains().size(); ++d )
            {
                auto [ oit, _ ] = _obs_ids[ d ].emplace( cfg.observer()( cfg.domains()[ d ], s ),
                                                         static_cast< std::uint32_t >( _obs_ids[ d ].size() ) );
                row.push_back( oit->second );
            }
            _obs.push_back( std::move( row ) );
        }
        return it->second;
    }

    std::uint32_t intern_set( std::vector< std::uint32_t > members )
    {
        std::sort( members.begin(), members.end() );
        members.erase( std::unique( members.begin(), members.end() ), members.end() );
        auto [ it, inserted ] = _set_index.emplace( members, static_cast< std::uint32_t >( _sets.size() ) );
        if ( inserted )
        {
            std::vector< std::int64_t > uniform( _sys.config().domains().size(), mixed );
            for ( std::size_t d = 0; d < uniform.size(); ++d )
            {
                if ( members.empty() )
                    continue;
                const auto first = _obs[ members.front() ][ d ];
                if ( std::all_of( members.begin(), members.end(),
                                  [ & ]( std::uint32_t s ) { return _obs[ s ][ d ] == first; } ) )
                    uniform[ d ] = first;
            }
            _sets.push_back( std::move( members ) );
            _uniform.push_back( std::move( uniform ) );
        }
        return it->second;
    }

    const std::vector< std::uint32_t >& step_state( std::uint32_t s, std::size_t a )
    {
        const auto key = ( static_cast< std::uint64_t >( s ) << 32 ) | a;
        auto it = _state_step.find( key );
        if ( it != _state_step.end() )
            return it->second;
        auto next = _sys.machine().step( _states[ s ], a );
        std::vector< std::uint32_t > refs;
        if ( next.empty() )
        {
            stuttered = true;
            if ( _stutter )
                refs.push_back( s );
        }
        for ( const auto& n : next )
            refs.push_back( intern_state( n ) );
        return _state_step.emplace( key, std::move( refs ) ).first->second;
    }

    std::uint32_t step_set( std::uint32_t set, std::size_t a )
    {
        const auto key = ( static_cast< std::uint64_t >( set ) << 32 ) | a;
        auto it = _set_step.find( key );
        if ( it != _set_step.end() )
            return it->second;
        std::vector< std::uint32_t > next;
        const auto members = _sets[ set ];
        for ( auto s : members )
        {
            const auto& refs = step_state( s, a );
            next.insert( next.end(), refs.begin(), refs.end() );
        }
        auto id = intern_set( std::move( next ) );
        _set_step.emplace( key, id );
        return id;
    }

    bool equidom( std::uint32_t lhs, std::uint32_t rhs, std::size_t d ) const
    {
        if ( _sets[ lhs ].empty() || _sets[ rhs ].empty() )
            return true;
        return _uniform[ lhs ][ d ] != mixed && _uniform[ lhs ][ d ] == _uniform[ rhs ][ d ];
    }

    std::vector< state > members( std::uint32_t set ) const
    {
        std::vector< state > out;
        for ( auto s : _sets[ set ] )
            out.push_back( _states[ s ] );
        canonicalize( out );
        return out;
    }

    std::size_t state_count() const { return _states.size(); }
};

} // namespace

ni_report check_ni( const secure_system& sys, const ni_options& options )
{
    const auto& cfg = sys.config();
    const auto& actions = sys.machine().actions();
    const std::size_t n = actions.size();

    std::vector< std::size_t > selected;
    if ( options.domains.empty() )
        for ( std::size_t d = 0; d < cfg.domains().size(); ++d )
            selected.push_back( d );
    else
    {
        for ( const auto& d : options.domains )
        {
            auto idx = cfg.find_domain( d );
            if ( !idx )
                throw usage_error( "unknown domain `" + d + "`" );
            selected.push_back( *idx );
        }
        std::sort( selected.begin(), selected.end() );
        selected.erase( std::unique( selected.begin(), selected.end() ), selected.end() );
    }

    // Level sizes n^k, refusing up front when the total exceeds the budget.
    std::vector< std::size_t > level_size{ 1 };
    std::size_t total = 1;
    for ( std::size_t k = 1; k <= options.max_len; ++k )
    {
        const auto prev = level_size.back();
        if ( n != 0 && prev > std::numeric_limits< std::size_t >::max() / n )
            throw budget_error( "trace count overflows" );
        level_size.push_back( prev * n );
        total += level_size.back();
        if ( total > options.trace_budget )
            throw budget_error( "trace budget of " + std::to_string( options.trace_budget ) + " exceeded: " +
                                std::to_string( options.max_len ) + " steps over " + std::to_string( n ) +
                                " actions" );
    }

    run_table table( sys, options.state_budget, options.semantics );
    ni_report report;
    report.max_len = options.max_len;
    report.semantics = options.semantics;

    std::vector< std::vector< std::uint32_t > > runs;
    runs.push_back( { table.intern_set( { table.intern_state( sys.machine().initial() ) } ) } );

    std::vector< std::size_t > word;
    std::vector< std::size_t > kept;
    std::vector< char > in_sources( cfg.domains().size() );

    for ( std::size_t k = 0; k <= options.max_len; ++k )
    {
        if ( k > 0 )
        {
            std::vector< std::uint32_t > level( level_size[ k ] );
            for ( std::size_t idx = 0; idx < level.size(); ++idx )
                level[ idx ] = table.step_set( runs[ k - 1 ][ idx / n ], idx % n );
            runs.push_back( std::move( level ) );
        }
        word.assign( k, 0 );
        for ( std::size_t idx = 0; idx < level_size[ k ]; ++idx )
        {
            ++report.traces;
            for ( std::size_t i = 0, rest = idx; i < k; ++i, rest /= n )
                word[ k - 1 - i ] = rest % n;
            for ( auto d : selected )
            {
                std::fill( in_sources.begin(), in_sources.end(), 0 );
                in_sources[ d ] = 1;
                kept.clear();
                for ( std::size_t i = k; i-- > 0; )
                {
                    const auto w = sys.action_domain( word[ i ] );
                    for ( std::size_t v = 0; v < in_sources.size() && !in_sources[ w ]; ++v )
                        if ( in_sources[ v ] && cfg.allowed( w, v ) )
                            in_sources[ w ] = 1;
                    if ( in_sources[ w ] )
                        kept.push_back( word[ i ] );
                }
                std::size_t purged_idx = 0;
                for ( auto it = kept.rbegin(); it != kept.rend(); ++it )
                    purged_idx = purged_idx * n + *it;
                const auto lhs = runs[ k ][ idx ];
                const auto rhs = runs[ kept.size() ][ purged_idx ];
                if ( table.equidom( lhs, rhs, d ) )
                    continue;
                ni_counterexample cx;
                for ( auto a : word )
                    cx.actions.push_back( actions[ a ] );
                for ( auto it = kept.rbegin(); it != kept.rend(); ++it )
                    cx.purged.push_back( actions[ *it ] );
                cx.domain = cfg.domains()[ d ];
                cx.lhs = table.members( lhs );
                cx.rhs = table.members( rhs );
                report.counterexample = std::move( cx );
                report.states = table.state_count();
                report.stuttered = table.stuttered;
                return report;
            }
        }
    }
    report.states = table.state_count();
    report.stuttered = table.stuttered;
    return report;
}

theorem_report validate_unwinding_theorem( const secure_system& sys, const ni_options& options,
                                           const scope_options& scope )
{
    return { check_unwinding( sys, scope ), check_ni( sys, options ) };
}

} // namespace ifsec
