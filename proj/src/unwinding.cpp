#include "ifsec/unwinding.hpp"

#include <algorithm>
#include <map>

namespace ifsec
{

std::string scope_summary::describe() const
{
    if ( kind == scope_kind::universe )
        return "universe";
    if ( depth )
        return "reachable(depth=" + std::to_string( *depth ) + ")";
    return "reachable";
}

scope_summary summarize( const state_space& space )
{
    return { space.options().kind, space.options().depth, space.scope().size(), space.size(),
             space.disabled_pairs() };
}

std::optional< std::vector< action_id > > action_path( const state_space& space, state_ref s )
{
    auto path = space.path_to( s );
    if ( !path )
        return std::nullopt;
    std::vector< action_id > out;
    for ( const auto& step : *path )
        out.push_back( space.system().machine().actions()[ step.action ] );
    return out;
}

std::optional< lr_witness > check_lr( const state_space& space )
{
    const auto& sys = space.system();
    const auto& domains = sys.config().domains();
    for ( std::size_t a = 0; a < space.action_count(); ++a )
    {
        const auto from = sys.action_domain( a );
        for ( std::size_t d = 0; d < domains.size(); ++d )
        {
            if ( sys.config().allowed( from, d ) )
                continue;
            for ( auto s : space.scope() )
                for ( auto next : space.successors( s, a ) )
                    if ( space.obs( d, s ) != space.obs( d, next ) )
                        return lr_witness{ sys.machine().actions()[ a ], domains[ d ], space.at( s ), space.at( next ),
                                           action_path( space, s ) };
        }
    }
    return std::nullopt;
}

namespace
{

struct sc_hit
{
    state_ref s1, s2, n1, n2;
};

// Least (s1, s2, s1', s2') inside one group known to be violating.
std::optional< sc_hit > least_in_group( const state_space& space, std::size_t a, std::size_t d,
                                        const std::vector< state_ref >& group )
{
    for ( auto s1 : group )
        for ( auto s2 : group )
            for ( auto n1 : space.successors( s1, a ) )
                for ( auto n2 : space.successors( s2, a ) )
                    if ( space.obs( d, n1 ) != space.obs( d, n2 ) )
                        return sc_hit{ s1, s2, n1, n2 };
    return std::nullopt;
}

} // namespace

std::optional< sc_witness > check_sc( const state_space& space )
{
    const auto& sys = space.system();
    const auto& domains = sys.config().domains();
    for ( std::size_t a = 0; a < space.action_count(); ++a )
    {
        const auto from = sys.action_domain( a );
        for ( std::size_t d = 0; d < domains.size(); ++d )
        {
            const bool flows = sys.config().allowed( from, d );
            // States related by the premise share a key; scope order is
            // canonical, so each group lists its members least first.
            std::map< std::pair< std::uint32_t, std::uint32_t >, std::vector< state_ref > > groups;
            for ( auto s : space.scope() )
            {
                if ( space.successors( s, a ).empty() )
                    continue;
                groups[ { space.obs( d, s ), flows ? space.obs( from, s ) : 0 } ].push_back( s );
            }
            std::optional< sc_hit > best;
            for ( const auto& [ key, members ] : groups )
            {
                if ( best && space.rank( members.front() ) >= space.rank( best->s1 ) )
                    continue;
                std::optional< std::uint32_t > seen;
                bool mixed = false;
                for ( auto s : members )
                {
                    for ( auto n : space.successors( s, a ) )
                    {
                        auto o = space.obs( d, n );
                        if ( seen && *seen != o )
                            mixed = true;
                        seen = o;
                    }
                    if ( mixed )
                        break;
                }
                if ( mixed )
                    best = least_in_group( space, a, d, members );
            }
            if ( best )
                return sc_witness{ sys.machine().actions()[ a ],
                                   domains[ d ],
                                   space.at( best->s1 ),
                                   space.at( best->s2 ),
                                   space.at( best->n1 ),
                                   space.at( best->n2 ),
                                   action_path( space, best->s1 ),
                                   action_path( space, best->s2 ) };
        }
    }
    return std::nullopt;
}

unwinding_report check_unwinding( const state_space& space )
{
    return { summarize( space ), check_lr( space ), check_sc( space ) };
}

unwinding_report check_unwinding( const secure_system& sys, const scope_options& options )
{
    return check_unwinding( state_space::explore( sys, options ) );
}

} // namespace ifsec
