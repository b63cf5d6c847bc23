#include "ifsec/cli.hpp"

#include "ifsec/models.hpp"
#include "ifsec/report.hpp"
#include "ifsec/specfile.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

namespace ifsec::cli
{

using report::json;

namespace
{

// -- targets -----------------------------------------------------------------

struct target
{
    std::string kind; // builtin | file
    std::string name;
    std::map< std::string, std::string > parameters;
    std::optional< refinement_pair > pair;
    std::optional< secure_system > model; // single-level file
    std::optional< rely_guarantee_spec > rg;

    std::vector< std::string > levels() const
    {
        if ( model )
            return { "model" };
        return { "abstract", "concrete" };
    }

    const secure_system& level( const std::string& l ) const
    {
        if ( l == "model" && model )
            return *model;
        if ( l == "abstract" && pair )
            return pair->abstract;
        if ( l == "concrete" && pair )
            return pair->concrete;
        throw usage_error( model ? "a model document has a single level; drop --level"
                                 : "unknown level `" + l + "` (abstract, concrete or both)" );
    }

    json fingerprint() const
    {
        json out = json::object();
        for ( const auto& l : levels() )
        {
            const auto& m = level( l ).machine();
            out[ l ] = { { "actions", m.actions().size() }, { "initial", m.initial().serialize() } };
        }
        return out;
    }

    json describe() const
    {
        return { { "kind", kind }, { "name", name }, { "parameters", parameters }, { "fingerprint", fingerprint() } };
    }
};

bool is_file( const std::string& name )
{
    return name.ends_with( ".ifs" ) || name.find( '/' ) != std::string::npos;
}

target load_target( const std::string& name, const models::model_parameters& p )
{
    target t;
    t.name = name;
    if ( is_file( name ) )
    {
        const bool sized = p.threads || p.capacity || p.messages || p.users || p.bids || p.cpus || p.partitions ||
                           p.channels;
        if ( sized )
            throw usage_error( "size flags apply to built-in models only" );
        t.kind = "file";
        auto doc = specfile::load( name );
        if ( auto* m = std::get_if< specfile::model_document >( &doc ) )
            t.model = specfile::elaborate( *m );
        else
        {
            auto e = specfile::elaborate( std::get< specfile::refinement_document >( doc ) );
            t.pair = std::move( e.pair );
            t.rg = std::move( e.rg );
        }
        return t;
    }
    auto bundle = models::build_model( name, p );
    t.kind = "builtin";
    t.parameters = bundle.parameters;
    t.pair = std::move( bundle.pair );
    t.rg = std::move( bundle.rg );
    return t;
}

target load_target( const json& j )
{
    models::model_parameters p;
    const std::map< std::string, std::optional< int >* > slots{
        { "threads", &p.threads }, { "capacity", &p.capacity }, { "messages", &p.messages },
        { "users", &p.users },     { "bids", &p.bids },         { "cpus", &p.cpus },
        { "partitions", &p.partitions }, { "channels", &p.channels } };
    for ( const auto& [ key, value ] : j.at( "parameters" ).items() )
    {
        auto it = slots.find( key );
        if ( it == slots.end() )
            throw usage_error( "report names unknown parameter `" + key + "`" );
        *it->second = std::stoi( value.get< std::string >() );
    }
    auto t = load_target( j.at( "name" ).get< std::string >(), p );
    if ( t.fingerprint() != j.at( "fingerprint" ) )
        throw usage_error( "report is stale: the model `" + t.name + "` no longer matches it" );
    return t;
}

// -- text rendering ------------------------------------------------------------

std::string join_path( const std::vector< action_id >& path )
{
    if ( path.empty() )
        return "(initial state)";
    std::string out;
    for ( std::size_t i = 0; i < path.size(); ++i )
        out += ( i ? " " : "" ) + path[ i ].to_string();
    return out;
}

std::string show( const observation& o )
{
    std::string out = "(";
    for ( std::size_t i = 0; i < o.size(); ++i )
        out += ( i ? ", " : "" ) + std::to_string( o[ i ] );
    return out + ")";
}

void print_unwinding( std::ostream& out, const std::string& level, const unwinding_report& r )
{
    out << level << ": LR " << ( r.lr ? "VIOLATION" : "pass" ) << ", SC " << ( r.sc ? "VIOLATION" : "pass" ) << " over "
        << r.scope.describe() << "\n";
    if ( r.lr )
    {
        const auto& w = *r.lr;
        out << "  LR witness: " << w.action.to_string() << " changes what " << w.domain << " observes\n"
            << "    path: " << ( w.path ? join_path( *w.path ) : "(not reachable)" ) << "\n"
            << "    s:    " << w.s.serialize() << "\n"
            << "    next: " << w.next.serialize() << "\n";
    }
    if ( r.sc )
    {
        const auto& w = *r.sc;
        out << "  SC witness: " << w.action.to_string() << " splits states " << w.domain << " cannot tell apart\n"
            << "    path1: " << ( w.path1 ? join_path( *w.path1 ) : "(not reachable)" ) << "\n"
            << "    path2: " << ( w.path2 ? join_path( *w.path2 ) : "(not reachable)" ) << "\n"
            << "    s1:  " << w.s1.serialize() << "\n"
            << "    s2:  " << w.s2.serialize() << "\n"
            << "    s1': " << w.s1_next.serialize() << "\n"
            << "    s2': " << w.s2_next.serialize() << "\n";
    }
}

void print_failure( std::ostream& out, const std::string& name, const std::optional< sim_failure >& f )
{
    out << name << ": " << ( f ? "FAIL" : "pass" ) << "\n";
    if ( !f )
        return;
    out << "  " << f->detail << "\n";
    if ( f->action )
        out << "  action: " << f->action->to_string()
            << ( f->abstract_action ? " -> " + f->abstract_action->to_string() : std::string( " -> tau" ) ) << "\n";
    if ( f->concrete && ( !f->path.empty() || f->action ) )
        out << "  path: " << join_path( f->path ) << "\n";
    if ( f->concrete )
        out << "  concrete: " << f->concrete->serialize() << "\n";
    if ( f->concrete_next )
        out << "  concrete': " << f->concrete_next->serialize() << "\n";
    if ( f->abstract )
        out << "  abstract: " << f->abstract->serialize() << "\n";
    if ( f->abstract_next )
        out << "  abstract': " << f->abstract_next->serialize() << "\n";
    if ( f->other_concrete )
        out << "  other path: " << join_path( f->other_path ) << "\n"
            << "  other concrete: " << f->other_concrete->serialize() << "\n"
            << "  other abstract: " << f->other_abstract->serialize() << "\n";
}

// -- check ---------------------------------------------------------------------

struct check_flags
{
    std::optional< std::size_t > depth;
    std::size_t max_len = 4;
    std::vector< std::string > domains;
    bool universe = false;
    std::size_t budget = default_state_budget;
    std::size_t trace_budget = default_trace_budget;
    bool json_output = false;
    std::string level;
    std::string semantics = "raw";
    models::model_parameters sizes;
};

std::vector< std::string > selected_levels( const target& t, const std::string& flag, const char* fallback )
{
    if ( t.model )
    {
        if ( !flag.empty() && flag != "model" )
            throw usage_error( "a model document has a single level; drop --level" );
        return { "model" };
    }
    const auto l = flag.empty() ? std::string( fallback ) : flag;
    if ( l == "both" )
        return { "abstract", "concrete" };
    if ( l != "abstract" && l != "concrete" )
        throw usage_error( "--level takes abstract, concrete or both" );
    return { l };
}

const refinement_pair& need_pair( const target& t, const char* kind )
{
    if ( !t.pair )
        throw usage_error( std::string( "check " ) + kind + " needs a refinement pair; `" + t.name +
                           "` is a single model" );
    return *t.pair;
}

int run_check( const std::string& kind, const std::string& name, const check_flags& f,
               const std::vector< std::string >& args, std::ostream& out, std::ostream& err )
{
    const auto started = std::chrono::steady_clock::now();
    if ( !f.domains.empty() && kind != "ni" )
        throw usage_error( "--domain applies to `check ni` only" );
    if ( f.depth && kind != "unwinding" && kind != "ni" )
        throw usage_error( "--depth applies to `check unwinding` only" );
    if ( f.depth && kind == "ni" )
        throw usage_error( "`check ni` is bounded by --max-len, not --depth" );
    if ( !f.level.empty() && kind != "unwinding" && kind != "ni" )
        throw usage_error( "--level applies to `check unwinding` and `check ni`" );

    const auto t = load_target( name, f.sizes );
    for ( const auto& l : t.levels() )
        for ( const auto& d : t.level( l ).config().missing_reflexive() )
            err << "warning: " << l << " policy lacks " << d << " -> " << d << "\n";
    std::string command;
    for ( std::size_t i = 0; i < args.size(); ++i )
        command += ( i ? " " : "" ) + args[ i ];
    json doc{ { "schema", report::schema_version },
              { "command", command },
              { "check", kind },
              { "target", t.describe() },
              { "budget", { { "states", f.budget }, { "traces", f.trace_budget } } } };
    bool pass = true;
    std::ostringstream text;
    text << "check " << kind << " " << t.name;
    for ( const auto& [ k, v ] : t.parameters )
        text << " " << k << "=" << v;
    text << "\n";

    if ( kind == "unwinding" )
    {
        scope_options scope{ f.universe ? scope_kind::universe : scope_kind::reachable, f.depth, f.budget };
        json levels = json::object();
        for ( const auto& l : selected_levels( t, f.level, "both" ) )
        {
            const auto r = check_unwinding( t.level( l ), scope );
            pass = pass && r.passed();
            levels[ l ] = report::to_json( r );
            print_unwinding( text, l, r );
        }
        doc[ "levels" ] = levels;
    }
    else if ( kind == "ni" )
    {
        if ( f.universe )
            throw usage_error( "--universe does not apply to `check ni`; traces start at the initial state" );
        ni_options o;
        o.max_len = f.max_len;
        o.domains = f.domains;
        o.trace_budget = f.trace_budget;
        o.state_budget = f.budget;
        o.semantics = f.semantics == "stutter" ? step_semantics::stutter : step_semantics::raw;
        json levels = json::object();
        for ( const auto& l : selected_levels( t, f.level, "abstract" ) )
        {
            const auto r = validate_unwinding_theorem( t.level( l ), o, { scope_kind::reachable, {}, f.budget } );
            pass = pass && r.ni.passed();
            auto j = report::to_json( r.ni );
            j[ "cross_check" ] = { { "unwinding", r.unwinding.passed() ? "pass" : "violation" },
                                   { "alarm", r.alarm() },
                                   { "claim", "unwinding implies noninterference" } };
            levels[ l ] = j;
            text << l << ": NI " << ( r.ni.passed() ? "pass" : "VIOLATION" ) << " over " << r.ni.traces
                 << " traces of length <= " << r.ni.max_len << " (" << to_string( o.semantics ) << " steps)";
            text << "; unwinding " << ( r.unwinding.passed() ? "pass" : "fails" ) << "\n";
            if ( r.alarm() )
                text << "  SOUNDNESS ALARM: unwinding holds but noninterference fails\n";
            if ( r.ni.counterexample )
            {
                const auto& cx = *r.ni.counterexample;
                text << "  domain " << cx.domain << " tells apart\n"
                     << "    trace:  " << join_path( cx.actions ) << "\n"
                     << "    purged: " << join_path( cx.purged ) << "\n";
            }
        }
        doc[ "levels" ] = levels;
    }
    else if ( kind == "refine" )
    {
        const auto& pair = need_pair( t, "refine" );
        const auto r = check_simulation( pair, { f.budget, f.universe } );
        pass = r.passed();
        doc[ "result" ] = report::to_json( r );
        text << "joint exploration: " << r.pairs << " related pairs, " << r.transitions << " transitions; alpha checked on "
             << r.alpha_scope << " pairs\n";
        for ( int i = 0; i < 6; ++i )
            print_failure( text, "c" + std::to_string( i + 1 ), r.c[ i ] );
        print_unwinding( text, "abstract", r.abstract_unwinding );
        print_unwinding( text, "concrete", r.concrete_unwinding );
        if ( r.alarm() )
            text << "SOUNDNESS ALARM: refinement and abstract unwinding hold but concrete unwinding fails\n";
    }
    else if ( kind == "compositional" )
    {
        const auto& pair = need_pair( t, "compositional" );
        if ( !t.rg )
            throw usage_error( "`" + t.name + "` declares no [components] with rely/guarantee" );
        const auto r = check_compositional( pair, *t.rg, f.budget );
        pass = r.passed();
        doc[ "result" ] = report::to_json( r );
        text << "joint exploration: " << r.pairs << " related pairs\n";
        for ( int i = 0; i < 4; ++i )
            print_failure( text, "lemma" + std::to_string( i + 1 ), r.lemma[ i ] );
        text << "monolithic: c2 " << ( r.monolithic_c2 ? "pass" : "FAIL" ) << ", c3 "
             << ( r.monolithic_c3 ? "pass" : "FAIL" ) << "\n";
        if ( r.alarm() )
            text << "SOUNDNESS ALARM: lemmas hold but the monolithic check fails\n";
    }
    else
        throw usage_error( "unknown check `" + kind + "` (unwinding, ni, refine, compositional)" );

    doc[ "verdict" ] = pass ? "pass" : "violation";
    const std::chrono::duration< double > elapsed = std::chrono::steady_clock::now() - started;
    doc[ "wall_time" ] = elapsed.count();
    text << "verdict: " << ( pass ? "pass" : "VIOLATION" ) << "\n";
    if ( f.json_output )
        out << report::dump( doc );
    else
        out << text.str();
    return pass ? exit_pass : exit_violation;
}

// -- replay --------------------------------------------------------------------

class replayer
{
    const target& _t;
    std::ostream& _out;

public:
    replayer( const target& t, std::ostream& out ) : _t{ t }, _out{ out } {}

    [[noreturn]] static void stale( const std::string& why )
    {
        throw usage_error( "witness does not reproduce (" + why + "); the report is stale" );
    }

    static state parse( const secure_system& sys, const json& text )
    {
        return parse_state( sys.machine().layout(), text.get< std::string >() );
    }

    static std::size_t action( const secure_system& sys, const action_id& a )
    {
        auto idx = sys.machine().find_action( a );
        if ( !idx )
            stale( "unknown action " + a.to_string() );
        return *idx;
    }

    // Runs the path from the initial state, printing every step.
    std::vector< state > walk( const secure_system& sys, const std::string& title, const std::vector< action_id >& path )
    {
        _out << title << "\n";
        std::vector< state > current{ sys.machine().initial() };
        _out << "  0. initial\n       " << current.front().serialize() << "\n";
        for ( std::size_t i = 0; i < path.size(); ++i )
        {
            const auto a = action( sys, path[ i ] );
            std::vector< state > next;
            for ( const auto& s : current )
                for ( auto& n : sys.machine().step( s, a ) )
                    next.push_back( std::move( n ) );
            canonicalize( next );
            current = std::move( next );
            _out << "  " << i + 1 << ". " << path[ i ].to_string() << "  [" << sys.config().dom( path[ i ] ) << "]\n";
            if ( current.empty() )
                _out << "       (action disabled: no successor)\n";
            for ( const auto& s : current )
                _out << "       " << s.serialize() << "\n";
        }
        return current;
    }

    void reach( const secure_system& sys, const std::string& title, const std::vector< action_id >& path,
                const state& s )
    {
        const auto end = walk( sys, title, path );
        if ( std::find( end.begin(), end.end(), s ) == end.end() )
            stale( "the recorded state is not reached by its path" );
    }

    void stepped( const secure_system& sys, const state& s, std::size_t a, const state& next )
    {
        const auto succ = sys.machine().step( s, a );
        if ( std::find( succ.begin(), succ.end(), next ) == succ.end() )
            stale( "the recorded step is not a successor" );
    }

    void lr( const secure_system& sys, const json& w )
    {
        const auto a = parse_action( w.at( "action" ).get< std::string >() );
        const auto d = w.at( "domain" ).get< std::string >();
        const auto s = parse( sys, w.at( "s" ) );
        const auto next = parse( sys, w.at( "next" ) );
        if ( !w.at( "path" ).is_null() )
            reach( sys, "path to s:", report::path_from_json( w.at( "path" ) ), s );
        stepped( sys, s, action( sys, a ), next );
        const auto& from = sys.config().dom( a );
        const auto before = sys.config().observe( d, s );
        const auto after = sys.config().observe( d, next );
        _out << "step " << a.to_string() << "  [" << from << "]\n       " << next.serialize() << "\n";
        if ( before == after || sys.config().allowed( from, d ) )
            stale( "the step does not break local respect" );
        _out << "first indistinguishability break: " << d << " observes " << show( before ) << " before and "
             << show( after ) << " after, and " << from << " ~> " << d << " is not allowed\n"
             << "violated condition: local respect (LR)\n";
    }

    void sc( const secure_system& sys, const json& w )
    {
        const auto a = parse_action( w.at( "action" ).get< std::string >() );
        const auto d = w.at( "domain" ).get< std::string >();
        const auto s1 = parse( sys, w.at( "s1" ) ), s2 = parse( sys, w.at( "s2" ) );
        const auto n1 = parse( sys, w.at( "s1_next" ) ), n2 = parse( sys, w.at( "s2_next" ) );
        if ( !w.at( "path1" ).is_null() )
            reach( sys, "path to s1:", report::path_from_json( w.at( "path1" ) ), s1 );
        if ( !w.at( "path2" ).is_null() )
            reach( sys, "path to s2:", report::path_from_json( w.at( "path2" ) ), s2 );
        const auto idx = action( sys, a );
        stepped( sys, s1, idx, n1 );
        stepped( sys, s2, idx, n2 );
        const auto& cfg = sys.config();
        const auto& from = cfg.dom( a );
        const bool premise = indist( cfg, d, s1, s2 ) && ( !cfg.allowed( from, d ) || indist( cfg, from, s1, s2 ) );
        if ( !premise || indist( cfg, d, n1, n2 ) )
            stale( "the pair does not break step consistency" );
        _out << "step " << a.to_string() << " from both\n       " << n1.serialize() << "\n       " << n2.serialize()
             << "\nfirst indistinguishability break: " << d << " observes " << show( cfg.observe( d, n1 ) ) << " and "
             << show( cfg.observe( d, n2 ) ) << " after agreeing before\n"
             << "violated condition: step consistency (SC)\n";
    }

    void ni( const secure_system& sys, const json& w )
    {
        const auto d = w.at( "domain" ).get< std::string >();
        const auto actions = report::path_from_json( w.at( "actions" ) );
        const auto purged = report::path_from_json( w.at( "purged" ) );
        if ( ipurge( actions, d, sys.config() ) != purged )
            stale( "the purged trace differs" );
        const auto lhs = walk( sys, "trace:", actions );
        const auto rhs = walk( sys, "purged trace for " + d + ":", purged );
        for ( const auto& x : lhs )
            for ( const auto& y : rhs )
                if ( !indist( sys.config(), d, x, y ) )
                {
                    _out << "first indistinguishability break: " << d << " observes "
                         << show( sys.config().observe( d, x ) ) << " after the trace and "
                         << show( sys.config().observe( d, y ) ) << " after the purged trace\n"
                         << "violated condition: noninterference\n";
                    return;
                }
        stale( "the two runs agree" );
    }

    // Abstract path matching a concrete one: mapped actions in order.
    std::vector< action_id > image( const std::vector< action_id >& path ) const
    {
        std::vector< action_id > out;
        for ( const auto& a : path )
            if ( const auto& z = _t.pair->zeta( a ) )
                out.push_back( *z );
        return out;
    }

    void refinement( const json& w )
    {
        const auto& pair = *_t.pair;
        const auto& c = pair.concrete;
        const auto& ab = pair.abstract;
        const auto cond = w.at( "condition" ).get< std::string >();
        auto opt_state = [ & ]( const secure_system& sys, const char* key ) -> std::optional< state >
        {
            if ( !w.contains( key ) )
                return std::nullopt;
            return parse( sys, w.at( key ) );
        };
        const auto path = report::path_from_json( w.at( "path" ) );
        const auto s = opt_state( c, "concrete" );
        const auto sigma = opt_state( ab, "abstract" );
        const auto next = opt_state( c, "concrete_next" );
        const auto sigma_next = opt_state( ab, "abstract_next" );
        std::optional< action_id > a;
        if ( w.contains( "action" ) )
            a = parse_action( w.at( "action" ).get< std::string >() );

        _out << "condition " << cond << ": " << w.at( "detail" ).get< std::string >() << "\n";
        if ( cond == "c4" )
        {
            const auto& z = pair.zeta( *a );
            if ( !z || c.config().dom( *a ) == ab.config().dom( *z ) )
                stale( "the domains agree" );
            _out << "concrete " << a->to_string() << " [" << c.config().dom( *a ) << "] maps to abstract "
                 << z->to_string() << " [" << ab.config().dom( *z ) << "]\nviolated condition: c4\n";
            return;
        }
        if ( cond == "c5" )
        {
            auto again = check_policy_inclusion( pair );
            if ( !again || again->detail != w.at( "detail" ).get< std::string >() )
                stale( "the policies now agree" );
            _out << "violated condition: c5\n";
            return;
        }
        if ( cond == "lemma4" )
        {
            const auto& rg = need_rg();
            const auto k = w.at( "component" ).get< std::string >();
            if ( !w.contains( "other_component" ) || ( !next && !sigma_next ) )
            {
                _out << "violated condition: lemma4 (the guarantee of " << k << " is total)\n";
                return;
            }
            const auto other = w.at( "other_component" ).get< std::string >();
            const auto& g = rg.components.at( k );
            const auto& r = rg.components.at( other );
            const bool broken = next ? g.guarantee( *s, *next ) && !r.rely( *s, *next )
                                     : g.abstract_guarantee( *sigma, *sigma_next ) && !r.abstract_rely( *sigma, *sigma_next );
            if ( !broken )
                stale( "the step is inside the rely" );
            _out << "step " << ( next ? s->serialize() + "\n    -> " + next->serialize()
                                      : sigma->serialize() + "\n    -> " + sigma_next->serialize() )
                 << "\nis in the guarantee of " << k << " but not in the rely of " << other
                 << "\nviolated condition: lemma4\n";
            return;
        }
        if ( cond == "c1" )
        {
            if ( pair.alpha( c.machine().initial(), ab.machine().initial() ) )
                stale( "initial states are related" );
            _out << "violated condition: c1\n";
            return;
        }

        reach( c, "concrete path:", path, *s );
        reach( ab, "abstract path:", image( path ), *sigma );
        if ( !pair.alpha( *s, *sigma ) )
            stale( "the recorded pair is not related" );

        if ( cond == "c6" )
        {
            const auto other_path = report::path_from_json( w.at( "other_path" ) );
            const auto t2 = parse( c, w.at( "other_concrete" ) );
            const auto tau2 = parse( ab, w.at( "other_abstract" ) );
            reach( c, "other concrete path:", other_path, t2 );
            reach( ab, "other abstract path:", image( other_path ), tau2 );
            const auto d = w.at( "domain" ).get< std::string >();
            const bool ci = indist( c.config(), d, *s, t2 );
            const bool ai = indist( ab.config(), d, *sigma, tau2 );
            if ( !pair.alpha( t2, tau2 ) || ci == ai )
                stale( "indistinguishability agrees" );
            _out << "first indistinguishability break: " << d << ( ci ? " cannot" : " can" )
                 << " tell the concrete states apart but" << ( ai ? " cannot" : " can" )
                 << " tell the abstract ones apart\nviolated condition: c6\n";
            return;
        }

        const auto idx = action( c, *a );
        stepped( c, *s, idx, *next );
        const auto& z = pair.zeta( *a );
        _out << "concrete step " << a->to_string() << " -> " << ( z ? z->to_string() : std::string( "tau" ) )
             << "\n       " << next->serialize() << "\n";
        const auto candidates = z ? ab.machine().step( *sigma, action( ab, *z ) ) : std::vector< state >{ *sigma };
        bool reproduced = false;
        if ( cond == "c2" )
            reproduced = !z && !pair.alpha( *next, *sigma );
        else if ( cond == "c3" )
            reproduced = z && std::none_of( candidates.begin(), candidates.end(),
                                            [ & ]( const state& x ) { return pair.alpha( *next, x ); } );
        else if ( cond == "lemma1" || cond == "lemma2" || cond == "lemma3" )
        {
            const auto& rg = need_rg();
            const auto& spec = rg.components.at( w.at( "component" ).get< std::string >() );
            if ( cond == "lemma1" )
                reproduced = !z && ( !spec.guarantee( *s, *next ) || !pair.alpha( *next, *sigma ) );
            else if ( cond == "lemma2" )
                reproduced = z && ( !spec.guarantee( *s, *next ) ||
                                    std::none_of( candidates.begin(), candidates.end(),
                                                  [ & ]( const state& x )
                                                  { return spec.abstract_guarantee( *sigma, x ) && pair.alpha( *next, x ); } ) );
            else
                reproduced = sigma_next && spec.rely( *s, *next ) && spec.abstract_rely( *sigma, *sigma_next ) &&
                             std::find( candidates.begin(), candidates.end(), *sigma_next ) != candidates.end() &&
                             !pair.alpha( *next, *sigma_next );
        }
        if ( !reproduced )
            stale( "the step satisfies " + cond );
        for ( const auto& x : candidates )
            _out << "  abstract counterpart " << x.serialize() << "\n";
        _out << "alpha does not relate the concrete successor to any admissible abstract counterpart\n"
             << "violated condition: " << cond << "\n";
    }

    const rely_guarantee_spec& need_rg() const
    {
        if ( !_t.rg )
            stale( "the model has no rely/guarantee" );
        return *_t.rg;
    }
};

int run_replay( const std::string& path, std::ostream& out )
{
    std::ifstream in( path );
    if ( !in )
        throw usage_error( "cannot read `" + path + "`" );
    json doc;
    try
    {
        doc = json::parse( in );
    }
    catch ( const json::exception& e )
    {
        throw usage_error( "`" + path + "` is not a JSON report: " + e.what() );
    }
    if ( !doc.is_object() || doc.value( "schema", 0 ) != report::schema_version || !doc.contains( "target" ) )
        throw usage_error( "`" + path + "` is not a schema 1 report" );
    if ( doc.value( "verdict", "" ) != "violation" )
        throw usage_error( "report records no violation; nothing to replay" );

    const auto t = load_target( doc.at( "target" ) );
    replayer r( t, out );
    const auto kind = doc.at( "check" ).get< std::string >();
    out << "replay " << kind << " " << t.name << "\n";

    auto unwinding_level = [ & ]( const std::string& level, const json& j )
    {
        if ( j.at( "lr" ).at( "verdict" ) == "violation" )
        {
            out << "level " << level << "\n";
            r.lr( t.level( level ), j.at( "lr" ).at( "witness" ) );
            return true;
        }
        if ( j.at( "sc" ).at( "verdict" ) == "violation" )
        {
            out << "level " << level << "\n";
            r.sc( t.level( level ), j.at( "sc" ).at( "witness" ) );
            return true;
        }
        return false;
    };

    if ( kind == "unwinding" )
    {
        for ( const auto& [ level, j ] : doc.at( "levels" ).items() )
            if ( unwinding_level( level, j ) )
                return exit_violation;
    }
    else if ( kind == "ni" )
    {
        for ( const auto& [ level, j ] : doc.at( "levels" ).items() )
            if ( j.contains( "witness" ) )
            {
                out << "level " << level << "\n";
                r.ni( t.level( level ), j.at( "witness" ) );
                return exit_violation;
            }
    }
    else if ( kind == "refine" || kind == "compositional" )
    {
        const auto& res = doc.at( "result" );
        const auto keys = kind == "refine" ? std::vector< std::string >{ "c1", "c2", "c3", "c4", "c5", "c6" }
                                           : std::vector< std::string >{ "lemma1", "lemma2", "lemma3", "lemma4" };
        for ( const auto& k : keys )
            if ( res.at( k ).contains( "witness" ) )
            {
                r.refinement( res.at( k ).at( "witness" ) );
                return exit_violation;
            }
        if ( kind == "refine" )
            for ( const char* level : { "abstract", "concrete" } )
                if ( unwinding_level( level, res.at( std::string( level ) + "_unwinding" ) ) )
                    return exit_violation;
    }
    throw usage_error( "report records no replayable witness" );
}

// -- list ----------------------------------------------------------------------

int run_list( bool as_json, std::ostream& out )
{
    if ( as_json )
    {
        json models = json::array();
        for ( const auto& m : models::registry() )
        {
            json defaults = json::object();
            for ( const auto& [ k, v ] : m.defaults )
                defaults[ k ] = v;
            models.push_back(
                { { "name", m.name }, { "description", m.description }, { "defaults", defaults }, { "secure", m.secure } } );
        }
        out << report::dump( { { "schema", report::schema_version }, { "models", models } } );
        return exit_pass;
    }
    for ( const auto& m : models::registry() )
    {
        out << m.name << ( m.secure ? "" : " (insecure)" ) << "\n  " << m.description << "\n  defaults:";
        for ( const auto& [ k, v ] : m.defaults )
            out << " --" << k << " " << v;
        out << "\n";
    }
    return exit_pass;
}

} // namespace

int run_cli( const std::vector< std::string >& args, std::ostream& out, std::ostream& err )
{
    CLI::App app{ "information-flow security checker for finite concurrent systems", "ifsec" };
    app.require_subcommand( 1 );

    bool list_json = false;
    auto* list = app.add_subcommand( "list", "list the built-in models" );
    list->add_flag( "--json", list_json, "machine-readable listing" );

    check_flags f;
    std::string kind, name;
    auto* check = app.add_subcommand( "check", "run a checker on a built-in model or an .ifs file" );
    check->add_option( "kind", kind, "unwinding, ni, refine or compositional" )
        ->required()
        ->check( CLI::IsMember( { "unwinding", "ni", "refine", "compositional" } ) );
    check->add_option( "target", name, "built-in model name or path to an .ifs file" )->required();
    std::size_t depth = 0;
    auto* depth_opt = check->add_option( "--depth", depth, "reachability bound for unwinding" );
    check->add_option( "--max-len", f.max_len, "longest trace for ni" )->capture_default_str();
    check->add_option( "--domain", f.domains, "restrict ni to these observers" );
    check->add_flag( "--universe", f.universe, "quantify over every declared state, not just reachable ones" );
    check->add_option( "--budget", f.budget, "explored state budget" )->capture_default_str();
    check->add_option( "--trace-budget", f.trace_budget, "trace budget for ni" )->capture_default_str();
    check->add_flag( "--json", f.json_output, "print the JSON report" );
    check->add_option( "--level", f.level, "abstract, concrete or both (unwinding: both, ni: abstract)" );
    check->add_option( "--semantics", f.semantics, "disabled actions in ni: raw (no successor) or stutter" )
        ->check( CLI::IsMember( { "raw", "stutter" } ) )
        ->capture_default_str();
    auto size = [ & ]( const char* flag, std::optional< int >& slot, const char* help )
    {
        check->add_option_function< int >( flag, [ &slot ]( const int& v ) { slot = v; }, help );
    };
    size( "--threads", f.sizes.threads, "demo threads" );
    size( "--capacity", f.sizes.capacity, "queue capacity" );
    size( "--messages", f.sizes.messages, "message alphabet size" );
    size( "--users", f.sizes.users, "auction users" );
    size( "--bids", f.sizes.bids, "auction bid amounts" );
    size( "--cpus", f.sizes.cpus, "arinc cpus" );
    size( "--partitions", f.sizes.partitions, "arinc partitions" );
    size( "--channels", f.sizes.channels, "arinc channels" );

    std::string report_path;
    auto* replay = app.add_subcommand( "replay", "re-execute the witness recorded in a JSON report" );
    replay->add_option( "report", report_path, "report written by `check --json`" )->required();

    try
    {
        std::vector< std::string > reversed( args.rbegin(), args.rend() );
        app.parse( reversed );
        if ( depth_opt->count() )
            f.depth = depth;
        if ( list->parsed() )
            return run_list( list_json, out );
        if ( check->parsed() )
            return run_check( kind, name, f, args, out, err );
        return run_replay( report_path, out );
    }
    catch ( const CLI::CallForHelp& )
    {
        out << app.help();
        return exit_pass;
    }
    catch ( const CLI::CallForAllHelp& )
    {
        out << app.help( "", CLI::AppFormatMode::All );
        return exit_pass;
    }
    catch ( const CLI::ParseError& e )
    {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    catch ( const usage_error& e )
    {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    catch ( const budget_error& e )
    {
        err << "budget exceeded: " << e.what() << "\n";
        return exit_budget;
    }
    catch ( const model_error& e )
    {
        err << "model error: " << e.what() << "\n";
        return exit_model;
    }
    catch ( const std::exception& e )
    {
        err << "internal error: " << e.what() << "\n";
        return exit_model;
    }
}

} // namespace ifsec::cli
