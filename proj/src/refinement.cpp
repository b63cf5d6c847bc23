#include "ifsec/refinement.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_map>

namespace ifsec
{

const std::optional< action_id >& step_map::operator()( const action_id& a ) const
{
    auto it = _map.find( a );
    if ( it == _map.end() )
        throw model_error( "step mapping has no entry for action " + a.to_string() );
    return it->second;
}

state_relation state_relation::any()
{
    state_relation r;
    r.contains = []( const state&, const state& ) { return true; };
    r.universal = true;
    return r;
}

state_relation state_relation::identity()
{
    state_relation r;
    r.contains = []( const state& s, const state& t ) { return s == t; };
    r.successors = []( const state& s ) { return std::vector< state >{ s }; };
    return r;
}

bool simulation_report::refinement() const
{
    return std::none_of( std::begin( c ), std::end( c ), []( const auto& f ) { return f.has_value(); } );
}

std::vector< action_id > joint_result::path_to( const refinement_pair& pair, std::uint32_t p ) const
{
    std::vector< action_id > out;
    while ( parent[ p ] )
    {
        const auto& [ from, t ] = *parent[ p ];
        out.push_back( pair.concrete.machine().actions()[ transitions[ t ].action ] );
        p = from;
    }
    std::reverse( out.begin(), out.end() );
    return out;
}

namespace
{

void validate_pair( const refinement_pair& pair )
{
    const auto& cd = pair.concrete.config().domains();
    const auto& ad = pair.abstract.config().domains();
    if ( cd != ad )
        throw model_error( "concrete and abstract configurations declare different domains" );
    for ( const auto& a : pair.concrete.machine().actions() )
    {
        const auto& mapped = pair.zeta( a );
        if ( mapped && !pair.abstract.machine().find_action( *mapped ) )
            throw model_error( "step mapping sends " + a.to_string() + " to unknown abstract action " +
                               mapped->to_string() );
    }
}

class state_table
{
    std::unordered_map< state, std::uint32_t, state_hash > _index;

public:
    std::vector< state >* states = nullptr;

    std::uint32_t intern( const state& s )
    {
        auto [ it, inserted ] = _index.emplace( s, static_cast< std::uint32_t >( states->size() ) );
        if ( inserted )
            states->push_back( s );
        return it->second;
    }
};

} // namespace

joint_result joint_explore( const refinement_pair& pair, std::size_t budget )
{
    validate_pair( pair );
    joint_result out;
    state_table concrete, abstract;
    concrete.states = &out.concrete_states;
    abstract.states = &out.abstract_states;

    const auto& cm = pair.concrete.machine();
    const auto& am = pair.abstract.machine();

    const auto c0 = concrete.intern( cm.initial() );
    const auto a0 = abstract.intern( am.initial() );
    if ( !pair.alpha( cm.initial(), am.initial() ) )
    {
        sim_failure f;
        f.condition = "c1";
        f.detail = "initial states are not related by alpha";
        f.concrete = cm.initial();
        f.abstract = am.initial();
        out.c1 = std::move( f );
        return out;
    }

    std::unordered_map< std::uint64_t, std::uint32_t > pair_index;
    auto intern_pair = [ & ]( std::uint32_t c, std::uint32_t a, std::optional< std::pair< std::uint32_t, std::size_t > > parent )
    {
        const auto key = ( static_cast< std::uint64_t >( c ) << 32 ) | a;
        auto [ it, inserted ] = pair_index.emplace( key, static_cast< std::uint32_t >( out.pairs.size() ) );
        if ( inserted )
        {
            if ( out.pairs.size() >= budget )
                throw budget_error( "pair budget of " + std::to_string( budget ) + " exceeded" );
            out.pairs.emplace_back( c, a );
            out.parent.push_back( parent );
        }
        return it->second;
    };
    intern_pair( c0, a0, std::nullopt );

    std::vector< std::optional< std::size_t > > mapped;
    for ( const auto& a : cm.actions() )
    {
        const auto& z = pair.zeta( a );
        mapped.push_back( z ? std::optional< std::size_t >( am.action_index( *z ) ) : std::nullopt );
    }

    for ( std::uint32_t p = 0; p < out.pairs.size(); ++p )
    {
        const auto [ ci, ai ] = out.pairs[ p ];
        const state s = out.concrete_states[ ci ];
        const state sigma = out.abstract_states[ ai ];
        for ( std::size_t a = 0; a < cm.actions().size(); ++a )
        {
            for ( const auto& next : cm.step( s, a ) )
            {
                joint_transition t{ p, a, concrete.intern( next ), mapped[ a ], std::nullopt, std::nullopt };
                const auto tid = out.transitions.size();
                auto fail = [ & ]( const char* condition, std::string detail )
                {
                    sim_failure f;
                    f.condition = condition;
                    f.detail = std::move( detail );
                    f.path = out.path_to( pair, p );
                    f.action = cm.actions()[ a ];
                    if ( mapped[ a ] )
                        f.abstract_action = am.actions()[ *mapped[ a ] ];
                    f.concrete = s;
                    f.abstract = sigma;
                    f.concrete_next = next;
                    return f;
                };
                if ( !mapped[ a ] )
                {
                    if ( pair.alpha( next, sigma ) )
                        t.to = intern_pair( t.concrete_next, ai, std::pair{ p, tid } );
                    else if ( !out.c2 )
                        out.c2 = fail( "c2", "silent step leaves the alpha relation" );
                }
                else
                {
                    auto candidates = am.step( sigma, *mapped[ a ] );
                    for ( const auto& cand : candidates )
                        if ( pair.alpha( next, cand ) )
                        {
                            t.abstract_next = abstract.intern( cand );
                            t.to = intern_pair( t.concrete_next, *t.abstract_next, std::pair{ p, tid } );
                            break;
                        }
                    if ( !t.to && !out.c3 )
                        out.c3 = fail( "c3", candidates.empty()
                                                 ? "abstract action is not enabled in the related abstract state"
                                                 : "no abstract successor is related by alpha" );
                }
                out.transitions.push_back( t );
            }
        }
    }
    return out;
}

std::optional< sim_failure > check_domain_preservation( const refinement_pair& pair )
{
    validate_pair( pair );
    for ( const auto& a : pair.concrete.machine().actions() )
    {
        const auto& z = pair.zeta( a );
        if ( !z )
            continue;
        const auto& dc = pair.concrete.config().dom( a );
        const auto& da = pair.abstract.config().dom( *z );
        if ( dc != da )
        {
            sim_failure f;
            f.condition = "c4";
            f.detail = "concrete domain " + dc + " differs from abstract domain " + da;
            f.action = a;
            f.abstract_action = *z;
            f.domain = dc;
            return f;
        }
    }
    return std::nullopt;
}

std::optional< sim_failure > check_policy_inclusion( const refinement_pair& pair )
{
    const auto& concrete = pair.concrete.config().policy();
    for ( const auto& edge : pair.abstract.config().policy() )
        if ( !concrete.contains( edge ) )
        {
            sim_failure f;
            f.condition = "c5";
            f.detail = "abstract policy allows " + edge.first + " -> " + edge.second + " but the concrete one does not";
            f.domain = edge.first;
            return f;
        }
    return std::nullopt;
}

std::optional< sim_failure > check_alpha_preserves_indist( const refinement_pair& pair, const joint_result& joint,
                                                           bool universe )
{
    std::vector< state > cs, as;
    std::vector< std::pair< std::uint32_t, std::uint32_t > > pairs;
    const std::vector< state >* concrete_states = &joint.concrete_states;
    const std::vector< state >* abstract_states = &joint.abstract_states;
    if ( universe )
    {
        if ( !pair.concrete.machine().has_universe() || !pair.abstract.machine().has_universe() )
            throw usage_error( "universe mode needs a declared universe at both levels" );
        cs = pair.concrete.machine().universe();
        as = pair.abstract.machine().universe();
        canonicalize( cs );
        canonicalize( as );
        for ( std::uint32_t i = 0; i < cs.size(); ++i )
            for ( std::uint32_t j = 0; j < as.size(); ++j )
                if ( pair.alpha( cs[ i ], as[ j ] ) )
                    pairs.emplace_back( i, j );
        concrete_states = &cs;
        abstract_states = &as;
    }
    else
        pairs = joint.pairs;

    const auto& ccfg = pair.concrete.config();
    const auto& acfg = pair.abstract.config();
    for ( const auto& d : ccfg.domains() )
    {
        // Per observation, the first pair that showed it.
        std::map< observation, std::size_t > by_concrete, by_abstract;
        for ( std::size_t i = 0; i < pairs.size(); ++i )
        {
            const auto& s = ( *concrete_states )[ pairs[ i ].first ];
            const auto& sigma = ( *abstract_states )[ pairs[ i ].second ];
            auto oc = ccfg.observe( d, s );
            auto oa = acfg.observe( d, sigma );
            auto ic = by_concrete.emplace( oc, i ).first->second;
            auto ia = by_abstract.emplace( oa, i ).first->second;
            if ( ic == ia )
                continue;
            const auto j = std::min( ic, ia );
            sim_failure f;
            f.condition = "c6";
            f.domain = d;
            f.detail = ic < ia ? "concrete states indistinguishable to " + d + " but abstract states are not"
                               : "abstract states indistinguishable to " + d + " but concrete states are not";
            f.concrete = ( *concrete_states )[ pairs[ j ].first ];
            f.abstract = ( *abstract_states )[ pairs[ j ].second ];
            f.other_concrete = s;
            f.other_abstract = sigma;
            if ( !universe )
            {
                f.path = joint.path_to( pair, static_cast< std::uint32_t >( j ) );
                f.other_path = joint.path_to( pair, static_cast< std::uint32_t >( i ) );
            }
            return f;
        }
    }
    return std::nullopt;
}

simulation_report check_simulation( const refinement_pair& pair, const simulation_options& options )
{
    simulation_report report;
    auto joint = joint_explore( pair, options.budget );
    report.pairs = joint.pairs.size();
    report.transitions = joint.transitions.size();
    report.alpha_scope = options.universe ? "universe" : "discovered";
    report.c[ 0 ] = joint.c1;
    report.c[ 1 ] = joint.c2;
    report.c[ 2 ] = joint.c3;
    report.c[ 3 ] = check_domain_preservation( pair );
    report.c[ 4 ] = check_policy_inclusion( pair );
    report.c[ 5 ] = check_alpha_preserves_indist( pair, joint, options.universe );

    scope_options scope;
    scope.budget = options.budget;
    report.abstract_unwinding = check_unwinding( pair.abstract, scope );
    report.concrete_unwinding = check_unwinding( pair.concrete, scope );
    return report;
}

namespace
{

const component_rg& component_spec( const rely_guarantee_spec& rg, const std::string& k )
{
    auto it = rg.components.find( k );
    if ( it == rg.components.end() )
        throw model_error( "no rely/guarantee given for component `" + k + "`" );
    return it->second;
}

} // namespace

compositional_report check_compositional( const refinement_pair& pair, const rely_guarantee_spec& rg,
                                          std::size_t budget )
{
    if ( !rg.component_of )
        throw model_error( "rely/guarantee spec without a component assignment" );
    auto joint = joint_explore( pair, budget );
    compositional_report report;
    report.pairs = joint.pairs.size();
    report.monolithic_c2 = !joint.c2;
    report.monolithic_c3 = !joint.c3;

    const auto& cm = pair.concrete.machine();
    const auto& am = pair.abstract.machine();

    auto make_failure = [ & ]( const char* lemma, std::string component, std::string detail, const joint_transition* t )
    {
        sim_failure f;
        f.condition = lemma;
        f.component = std::move( component );
        f.detail = std::move( detail );
        if ( t )
        {
            const auto [ ci, ai ] = joint.pairs[ t->from ];
            f.path = joint.path_to( pair, t->from );
            f.action = cm.actions()[ t->action ];
            if ( t->mapped )
                f.abstract_action = am.actions()[ *t->mapped ];
            f.concrete = joint.concrete_states[ ci ];
            f.abstract = joint.abstract_states[ ai ];
            f.concrete_next = joint.concrete_states[ t->concrete_next ];
            if ( t->abstract_next )
                f.abstract_next = joint.abstract_states[ *t->abstract_next ];
        }
        return f;
    };

    std::vector< std::string > owner;
    for ( const auto& a : cm.actions() )
        owner.push_back( rg.component_of( a ) );
    for ( const auto& k : owner )
        (void)component_spec( rg, k );

    for ( const auto& t : joint.transitions )
    {
        const auto& k = owner[ t.action ];
        const auto& spec = component_spec( rg, k );
        const auto [ ci, ai ] = joint.pairs[ t.from ];
        const auto& s = joint.concrete_states[ ci ];
        const auto& sigma = joint.abstract_states[ ai ];
        const auto& next = joint.concrete_states[ t.concrete_next ];

        if ( !t.mapped )
        {
            if ( !report.lemma[ 0 ] )
            {
                if ( !spec.guarantee( s, next ) )
                    report.lemma[ 0 ] = make_failure( "lemma1", k, "silent step outside the guarantee of " + k, &t );
                else if ( !t.to )
                    report.lemma[ 0 ] = make_failure( "lemma1", k, "silent step leaves the alpha relation", &t );
            }
        }
        else if ( !report.lemma[ 1 ] )
        {
            bool found = false;
            if ( spec.guarantee( s, next ) )
                for ( const auto& cand : am.step( sigma, *t.mapped ) )
                    if ( spec.abstract_guarantee( sigma, cand ) && pair.alpha( next, cand ) )
                    {
                        found = true;
                        break;
                    }
            if ( !found )
                report.lemma[ 1 ] =
                    make_failure( "lemma2", k, "no abstract step within both guarantees of " + k + " keeps alpha", &t );
        }

        // Environment steps as seen by every other component.
        if ( !report.lemma[ 2 ] )
        {
            const auto counterparts = t.mapped ? am.step( sigma, *t.mapped ) : std::vector< state >{ sigma };
            for ( const auto& [ other, other_spec ] : rg.components )
            {
                if ( other == k || report.lemma[ 2 ] || !other_spec.rely( s, next ) )
                    continue;
                for ( const auto& sigma_next : counterparts )
                    if ( other_spec.abstract_rely( sigma, sigma_next ) && !pair.alpha( next, sigma_next ) )
                    {
                        report.lemma[ 2 ] = make_failure( "lemma3", other,
                                                          "environment step within the rely of " + other +
                                                              " breaks alpha",
                                                          &t );
                        report.lemma[ 2 ]->abstract_next = sigma_next;
                        break;
                    }
            }
        }
    }

    // Guarantee of each component inside the rely of every other one: on the
    // observed transitions, then on the enumerated guarantee successors.
    std::set< std::uint32_t > concrete_seen, abstract_seen;
    for ( const auto& [ c, a ] : joint.pairs )
    {
        concrete_seen.insert( c );
        abstract_seen.insert( a );
    }
    for ( const auto& [ k, spec ] : rg.components )
    {
        for ( const auto& [ other, other_spec ] : rg.components )
        {
            if ( other == k || report.lemma[ 3 ] )
                continue;
            auto fail = [ & ]( std::string detail, const joint_transition* t )
            {
                report.lemma[ 3 ] = make_failure( "lemma4", k, std::move( detail ), t );
                report.lemma[ 3 ]->other_component = other;
            };
            if ( spec.guarantee.universal && !other_spec.rely.universal )
            {
                fail( "guarantee of " + k + " is total but the rely of " + other + " is not", nullptr );
                continue;
            }
            if ( spec.abstract_guarantee.universal && !other_spec.abstract_rely.universal )
            {
                fail( "abstract guarantee of " + k + " is total but the abstract rely of " + other + " is not", nullptr );
                continue;
            }
            for ( const auto& t : joint.transitions )
            {
                if ( owner[ t.action ] != k )
                    continue;
                const auto [ ci, ai ] = joint.pairs[ t.from ];
                const auto& s = joint.concrete_states[ ci ];
                const auto& next = joint.concrete_states[ t.concrete_next ];
                if ( spec.guarantee( s, next ) && !other_spec.rely( s, next ) )
                {
                    fail( "step by " + k + " is inside its guarantee but outside the rely of " + other, &t );
                    break;
                }
                if ( t.abstract_next )
                {
                    const auto& sigma = joint.abstract_states[ ai ];
                    const auto& sigma_next = joint.abstract_states[ *t.abstract_next ];
                    if ( spec.abstract_guarantee( sigma, sigma_next ) && !other_spec.abstract_rely( sigma, sigma_next ) )
                    {
                        fail( "abstract step by " + k + " is inside its guarantee but outside the rely of " + other, &t );
                        break;
                    }
                }
            }
            if ( report.lemma[ 3 ] )
                continue;
            auto enumerate = [ & ]( const state_relation& g, const state_relation& r, const std::set< std::uint32_t >& seen,
                                    const std::vector< state >& states, bool concrete_level )
            {
                if ( !g.successors || r.universal )
                    return false;
                for ( auto i : seen )
                    for ( const auto& next : g.successors( states[ i ] ) )
                        if ( g( states[ i ], next ) && !r( states[ i ], next ) )
                        {
                            sim_failure f;
                            f.condition = "lemma4";
                            f.component = k;
                            f.other_component = other;
                            f.detail = std::string( concrete_level ? "" : "abstract " ) + "guarantee of " + k +
                                       " admits a step outside the rely of " + other;
                            if ( concrete_level )
                            {
                                f.concrete = states[ i ];
                                f.concrete_next = next;
                            }
                            else
                            {
                                f.abstract = states[ i ];
                                f.abstract_next = next;
                            }
                            report.lemma[ 3 ] = std::move( f );
                            return true;
                        }
                return false;
            };
            if ( !enumerate( spec.guarantee, other_spec.rely, concrete_seen, joint.concrete_states, true ) )
                enumerate( spec.abstract_guarantee, other_spec.abstract_rely, abstract_seen, joint.abstract_states,
                           false );
        }
    }
    return report;
}

} // namespace ifsec
