#include "ifsec/specfile.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ifsec::specfile
{

parse_error::parse_error( std::size_t line, std::size_t column, std::string message, std::string hint )
    : model_error( std::to_string( line ) + ":" + std::to_string( column ) + ": " + message +
                   ( hint.empty() ? "" : " (hint: " + hint + ")" ) ),
      _line{ line }, _column{ column }, _message{ std::move( message ) }, _hint{ std::move( hint ) }
{
}

namespace
{

bool name_char( char c )
{
    return ( c >= 'a' && c <= 'z' ) || ( c >= 'A' && c <= 'Z' ) || ( c >= '0' && c <= '9' ) || c == '_' || c == '.' ||
           c == '/' || c == '-';
}

// One source line, comment stripped.
class cursor
{
    std::string_view _text;
    std::size_t _line;
    std::size_t _pos = 0;

public:
    cursor( std::string_view text, std::size_t line ) : _text{ text }, _line{ line } {}

    std::size_t line() const { return _line; }
    // Column of the next token.
    std::size_t column()
    {
        skip_ws();
        return _pos + 1;
    }

    [[noreturn]] void fail( std::string message, std::string hint = {} )
    {
        throw parse_error( _line, column(), std::move( message ), std::move( hint ) );
    }

    void skip_ws()
    {
        while ( _pos < _text.size() && ( _text[ _pos ] == ' ' || _text[ _pos ] == '\t' || _text[ _pos ] == '\r' ) )
            ++_pos;
    }

    bool at_end()
    {
        skip_ws();
        return _pos >= _text.size();
    }

    bool peek( std::string_view token )
    {
        skip_ws();
        return _text.substr( _pos ).starts_with( token );
    }

    bool accept( std::string_view token )
    {
        if ( !peek( token ) )
            return false;
        _pos += token.size();
        return true;
    }

    bool accept_keyword( std::string_view word )
    {
        if ( !peek( word ) )
            return false;
        const auto after = _pos + word.size();
        if ( after < _text.size() && name_char( _text[ after ] ) )
            return false;
        _pos = after;
        return true;
    }

    void expect( std::string_view token, std::string_view what )
    {
        if ( !accept( token ) )
            fail( "expected `" + std::string( token ) + "` " + std::string( what ), {} );
    }

    // Names may contain '-' but never swallow an arrow.
    std::string name( std::string_view what )
    {
        skip_ws();
        const auto start = _pos;
        while ( _pos < _text.size() && name_char( _text[ _pos ] ) )
        {
            if ( _text[ _pos ] == '-' && _pos + 1 < _text.size() && _text[ _pos + 1 ] == '>' )
                break;
            ++_pos;
        }
        if ( start == _pos )
            fail( "expected " + std::string( what ), "names use letters, digits, `_`, `.`, `/` and `-`" );
        return std::string( _text.substr( start, _pos - start ) );
    }

    void finish()
    {
        if ( !at_end() )
            fail( "unexpected `" + std::string( _text.substr( _pos ) ) + "`", "one declaration per line" );
    }
};

struct source_line
{
    std::size_t number;
    std::string text;
};

struct section
{
    std::string name;
    std::size_t line;
    std::vector< source_line > body;
};

std::vector< section > split( std::string_view text )
{
    std::vector< section > out;
    std::size_t number = 0;
    std::size_t start = 0;
    while ( start <= text.size() )
    {
        auto end = text.find( '\n', start );
        if ( end == std::string_view::npos )
            end = text.size();
        ++number;
        std::string line( text.substr( start, end - start ) );
        start = end + 1;
        if ( auto hash = line.find( '#' ); hash != std::string::npos )
            line.erase( hash );
        cursor c( line, number );
        if ( c.at_end() )
            continue;
        if ( c.accept( "[" ) )
        {
            c.skip_ws();
            std::string name = c.name( "section name" );
            if ( name == "rely" || name == "guarantee" )
                name += " " + c.name( "component name" );
            c.expect( "]", "to close the section header" );
            c.finish();
            for ( const auto& s : out )
                if ( s.name == name )
                    throw parse_error( number, 1, "duplicate section [" + name + "]", "merge the two sections" );
            out.push_back( { name, number, {} } );
            continue;
        }
        if ( out.empty() )
            throw parse_error( number, 1, "declaration outside any section", "start with a header such as [domains]" );
        out.back().body.push_back( { number, std::move( line ) } );
    }
    return out;
}

// Name resolution for one level.
struct scope
{
    std::set< std::string > domains;
    std::map< std::string, std::vector< std::string > > vars;
    std::set< std::string > actions;
};

pattern parse_pattern( cursor& c, const scope& sc, bool allow_any, const char* stop )
{
    pattern out;
    if ( allow_any && c.accept( "*" ) )
        return out;
    if ( !allow_any && c.accept_keyword( "skip" ) )
        return out;
    std::set< std::string > seen;
    do
    {
        const auto col = c.column();
        auto var = c.name( "variable" );
        auto it = sc.vars.find( var );
        if ( it == sc.vars.end() )
            throw parse_error( c.line(), col, "undeclared variable `" + var + "`",
                               "declare it under [state]" );
        if ( !seen.insert( var ).second )
            c.fail( "variable `" + var + "` bound twice", "keep one binding per variable" );
        c.expect( "=", "after the variable" );
        const auto vcol = c.column();
        auto v = c.name( "value" );
        if ( std::find( it->second.begin(), it->second.end(), v ) == it->second.end() )
            throw parse_error( c.line(), vcol, "value `" + v + "` is not in the value set of `" + var + "`",
                               "add it to the declaration of `" + var + "`" );
        out.push_back( { std::move( var ), std::move( v ) } );
    } while ( c.accept( "," ) );
    if ( stop && !c.peek( stop ) && !c.at_end() )
        c.fail( "expected `" + std::string( stop ) + "`" );
    return out;
}

std::vector< std::string > parse_names( cursor& c, const char* what )
{
    std::vector< std::string > out;
    if ( c.at_end() )
        return out;
    do
        out.push_back( c.name( what ) );
    while ( c.accept( "," ) );
    return out;
}

const section* find_section( const std::vector< section >& all, const std::string& name )
{
    for ( const auto& s : all )
        if ( s.name == name )
            return &s;
    return nullptr;
}

model_document parse_level( const std::vector< section >& all, const std::string& prefix, scope& sc,
                            std::size_t header_line )
{
    model_document doc;
    auto get = [ & ]( const char* name ) { return find_section( all, prefix + name ); };

    const auto* domains = get( "domains" );
    if ( !domains )
        throw parse_error( header_line, 1, "missing [" + prefix + "domains]", "list the security domains first" );
    for ( const auto& l : domains->body )
    {
        cursor c( l.text, l.number );
        auto d = c.name( "domain name" );
        c.finish();
        if ( !sc.domains.insert( d ).second )
            throw parse_error( l.number, 1, "duplicate domain `" + d + "`", "remove the repeated line" );
        doc.domains.push_back( std::move( d ) );
    }

    if ( const auto* st = get( "state" ) )
        for ( const auto& l : st->body )
        {
            cursor c( l.text, l.number );
            var_decl v;
            v.name = c.name( "variable name" );
            if ( sc.vars.contains( v.name ) )
                throw parse_error( l.number, 1, "duplicate variable `" + v.name + "`", "remove the repeated line" );
            c.expect( ":", "before the value set" );
            if ( c.accept( "{" ) )
            {
                do
                {
                    const auto col = c.column();
                    auto value = c.name( "value" );
                    if ( std::find( v.values.begin(), v.values.end(), value ) != v.values.end() )
                        throw parse_error( l.number, col, "duplicate value `" + value + "`", "values must be distinct" );
                    v.values.push_back( std::move( value ) );
                } while ( c.accept( "," ) );
                c.expect( "}", "to close the value set" );
            }
            else
            {
                auto lo_text = c.name( "value set" );
                auto dots = lo_text.find( ".." );
                std::string hi_text;
                if ( dots != std::string::npos )
                {
                    hi_text = lo_text.substr( dots + 2 );
                    lo_text.erase( dots );
                }
                int lo = 0, hi = -1;
                try
                {
                    std::size_t a = 0, b = 0;
                    lo = std::stoi( lo_text, &a );
                    hi = std::stoi( hi_text, &b );
                    if ( a != lo_text.size() || b != hi_text.size() )
                        hi = -1;
                }
                catch ( const std::exception& )
                {
                    hi = -1;
                }
                if ( dots == std::string::npos || hi < lo || hi - lo > 255 )
                    c.fail( "bad value set", "write `{a, b}` or a range `0..3`" );
                for ( int i = lo; i <= hi; ++i )
                    v.values.push_back( std::to_string( i ) );
            }
            c.expect( "=", "before the initial value" );
            const auto col = c.column();
            v.initial = c.name( "initial value" );
            if ( std::find( v.values.begin(), v.values.end(), v.initial ) == v.values.end() )
                throw parse_error( l.number, col, "initial value `" + v.initial + "` is not in the value set",
                                   "pick one of the declared values" );
            c.finish();
            sc.vars.emplace( v.name, v.values );
            doc.state.push_back( std::move( v ) );
        }

    if ( const auto* pol = get( "policy" ) )
        for ( const auto& l : pol->body )
        {
            cursor c( l.text, l.number );
            auto domain = [ & ]()
            {
                const auto col = c.column();
                auto d = c.name( "domain" );
                if ( !sc.domains.contains( d ) )
                    throw parse_error( l.number, col, "policy names undeclared domain `" + d + "`",
                                       "add `" + d + "` to [" + prefix + "domains]" );
                return d;
            };
            auto from = domain();
            c.expect( "->", "between the two domains" );
            auto to = domain();
            c.finish();
            doc.policy.emplace_back( std::move( from ), std::move( to ) );
        }

    if ( const auto* acts = get( "actions" ) )
        for ( const auto& l : acts->body )
        {
            cursor c( l.text, l.number );
            auto label = c.name( "action label" );
            c.expect( "@", "before the action's domain" );
            const auto col = c.column();
            auto d = c.name( "domain" );
            if ( !sc.domains.contains( d ) )
                throw parse_error( l.number, col, "action assigned to undeclared domain `" + d + "`",
                                   "add `" + d + "` to [" + prefix + "domains]" );
            c.expect( ":", "before the guard" );
            rule r;
            r.guard = parse_pattern( c, sc, true, "->" );
            c.expect( "->", "between guard and update" );
            r.update = parse_pattern( c, sc, false, nullptr );
            c.finish();
            auto it = std::find_if( doc.actions.begin(), doc.actions.end(),
                                    [ & ]( const action_decl& a ) { return a.label == label; } );
            if ( it == doc.actions.end() )
            {
                sc.actions.insert( label );
                doc.actions.push_back( { label, d, { std::move( r ) } } );
            }
            else if ( it->domain != d )
                throw parse_error( l.number, col, "action `" + label + "` already belongs to domain `" + it->domain + "`",
                                   "an action has exactly one domain" );
            else
                it->rules.push_back( std::move( r ) );
        }

    if ( const auto* obs = get( "observe" ) )
        for ( const auto& l : obs->body )
        {
            cursor c( l.text, l.number );
            const auto d = c.name( "domain" );
            if ( !sc.domains.contains( d ) )
                throw parse_error( l.number, 1, "observation for undeclared domain `" + d + "`",
                                   "add `" + d + "` to [" + prefix + "domains]" );
            for ( const auto& [ seen, _ ] : doc.observe )
                if ( seen == d )
                    throw parse_error( l.number, 1, "second observation line for `" + d + "`",
                                       "list all visible variables on one line" );
            c.expect( ":", "after the domain" );
            std::vector< std::string > vars;
            if ( !c.at_end() )
                do
                {
                    const auto col = c.column();
                    auto v = c.name( "variable" );
                    if ( !sc.vars.contains( v ) )
                        throw parse_error( l.number, col, "undeclared variable `" + v + "`",
                                           "declare it under [" + prefix + "state]" );
                    vars.push_back( std::move( v ) );
                } while ( c.accept( "," ) );
            c.finish();
            doc.observe.emplace_back( d, std::move( vars ) );
        }
    return doc;
}

const std::set< std::string > model_sections{ "domains", "policy", "state", "actions", "observe" };

relation_decl parse_relation( const section& s, const scope& sc )
{
    relation_decl r;
    r.any = false;
    for ( const auto& l : s.body )
    {
        cursor c( l.text, l.number );
        if ( c.accept_keyword( "any" ) )
            r.any = true;
        else if ( c.accept_keyword( "frame" ) )
        {
            for ( auto& v : parse_names( c, "variable" ) )
            {
                if ( !sc.vars.contains( v ) )
                    c.fail( "undeclared variable `" + v + "`", "frame variables are concrete state variables" );
                r.frame.push_back( std::move( v ) );
            }
        }
        else if ( c.accept_keyword( "pair" ) )
        {
            auto lhs = parse_pattern( c, sc, true, "->" );
            c.expect( "->", "between the two states" );
            auto rhs = parse_pattern( c, sc, true, nullptr );
            r.pairs.emplace_back( std::move( lhs ), std::move( rhs ) );
        }
        else
            c.fail( "expected `any`, `frame` or `pair`" );
        c.finish();
    }
    if ( r.any && ( !r.frame.empty() || !r.pairs.empty() ) )
        throw parse_error( s.line, 1, "[" + s.name + "] mixes `any` with constraints", "drop `any` or the constraints" );
    return r;
}

refinement_document parse_refinement_sections( const std::vector< section >& all )
{
    refinement_document doc;
    for ( const auto& s : all )
    {
        const auto dot = s.name.find( '.' );
        const bool level = dot != std::string::npos && model_sections.contains( s.name.substr( dot + 1 ) ) &&
                           ( s.name.starts_with( "concrete." ) || s.name.starts_with( "abstract." ) );
        if ( !level && s.name != "alpha" && s.name != "zeta" && s.name != "components" &&
             !s.name.starts_with( "rely " ) && !s.name.starts_with( "guarantee " ) )
            throw parse_error( s.line, 1, "unknown section [" + s.name + "] in a refinement document",
                               "prefix model sections with `concrete.` or `abstract.`" );
    }
    scope cs, as;
    doc.concrete = parse_level( all, "concrete.", cs, 1 );
    doc.abstract = parse_level( all, "abstract.", as, 1 );

    if ( const auto* alpha = find_section( all, "alpha" ) )
        for ( const auto& l : alpha->body )
        {
            cursor c( l.text, l.number );
            if ( c.accept_keyword( "match" ) )
            {
                auto cv = c.name( "concrete variable" );
                if ( !cs.vars.contains( cv ) )
                    c.fail( "undeclared concrete variable `" + cv + "`", "the left side names a concrete variable" );
                c.expect( "==", "between the two variables" );
                auto av = c.name( "abstract variable" );
                if ( !as.vars.contains( av ) )
                    c.fail( "undeclared abstract variable `" + av + "`", "the right side names an abstract variable" );
                doc.match.emplace_back( std::move( cv ), std::move( av ) );
            }
            else if ( c.accept_keyword( "pair" ) )
            {
                auto lhs = parse_pattern( c, cs, true, "~" );
                c.expect( "~", "between the concrete and abstract patterns" );
                auto rhs = parse_pattern( c, as, true, nullptr );
                doc.alpha_pairs.emplace_back( std::move( lhs ), std::move( rhs ) );
            }
            else
                c.fail( "expected `match` or `pair`" );
            c.finish();
        }

    if ( const auto* zeta = find_section( all, "zeta" ) )
        for ( const auto& l : zeta->body )
        {
            cursor c( l.text, l.number );
            auto from = c.name( "concrete action" );
            if ( !cs.actions.contains( from ) )
                c.fail( "unknown concrete action `" + from + "`", "declare it under [concrete.actions]" );
            for ( const auto& [ seen, _ ] : doc.zeta )
                if ( seen == from )
                    c.fail( "`" + from + "` mapped twice", "keep one line per concrete action" );
            c.expect( "->", "after the concrete action" );
            auto to = c.name( "abstract action or tau" );
            std::optional< std::string > target;
            if ( to != "tau" )
            {
                if ( !as.actions.contains( to ) )
                    c.fail( "unknown abstract action `" + to + "`", "declare it under [abstract.actions] or use `tau`" );
                target = std::move( to );
            }
            c.finish();
            doc.zeta.emplace_back( std::move( from ), std::move( target ) );
        }

    std::set< std::string > assigned;
    if ( const auto* comps = find_section( all, "components" ) )
        for ( const auto& l : comps->body )
        {
            cursor c( l.text, l.number );
            component_decl k;
            k.name = c.name( "component name" );
            for ( const auto& other : doc.components )
                if ( other.name == k.name )
                    c.fail( "duplicate component `" + k.name + "`" );
            c.expect( ":", "after the component name" );
            for ( auto& a : parse_names( c, "concrete action" ) )
            {
                if ( !cs.actions.contains( a ) )
                    c.fail( "unknown concrete action `" + a + "`", "declare it under [concrete.actions]" );
                if ( !assigned.insert( a ).second )
                    c.fail( "action `" + a + "` is already in a component", "each action runs on one component" );
                k.actions.push_back( std::move( a ) );
            }
            c.finish();
            doc.components.push_back( std::move( k ) );
        }
    for ( const auto& s : all )
    {
        const bool rely = s.name.starts_with( "rely " );
        if ( !rely && !s.name.starts_with( "guarantee " ) )
            continue;
        const auto name = s.name.substr( s.name.find( ' ' ) + 1 );
        auto it = std::find_if( doc.components.begin(), doc.components.end(),
                                [ & ]( const component_decl& k ) { return k.name == name; } );
        if ( it == doc.components.end() )
            throw parse_error( s.line, 1, "[" + s.name + "] for unknown component `" + name + "`",
                               "list the component under [components]" );
        ( rely ? it->rely : it->guarantee ) = parse_relation( s, cs );
    }
    return doc;
}

} // namespace

document parse( std::string_view text )
{
    const auto all = split( text );
    const bool refinement = std::any_of( all.begin(), all.end(), []( const section& s )
                                         { return s.name.starts_with( "concrete." ) || s.name.starts_with( "abstract." ); } );
    if ( refinement )
        return parse_refinement_sections( all );
    for ( const auto& s : all )
        if ( !model_sections.contains( s.name ) )
            throw parse_error( s.line, 1, "unknown section [" + s.name + "]",
                               "model sections are domains, policy, state, actions, observe" );
    scope sc;
    return parse_level( all, "", sc, 1 );
}

model_document parse_model( std::string_view text )
{
    auto doc = parse( text );
    if ( auto* m = std::get_if< model_document >( &doc ) )
        return std::move( *m );
    throw parse_error( 1, 1, "expected a model document, found a refinement document", "drop the level prefixes" );
}

refinement_document parse_refinement( std::string_view text )
{
    auto doc = parse( text );
    if ( auto* r = std::get_if< refinement_document >( &doc ) )
        return std::move( *r );
    throw parse_error( 1, 1, "expected a refinement document", "use [concrete.*] and [abstract.*] sections" );
}

namespace
{

std::string join( const std::vector< std::string >& items )
{
    std::string out;
    for ( std::size_t i = 0; i < items.size(); ++i )
        out += ( i ? ", " : "" ) + items[ i ];
    return out;
}

std::string print_pattern( const pattern& p, bool update )
{
    if ( p.empty() )
        return update ? "skip" : "*";
    std::string out;
    for ( std::size_t i = 0; i < p.size(); ++i )
        out += ( i ? ", " : "" ) + p[ i ].var + "=" + p[ i ].value;
    return out;
}

void print_level( std::ostringstream& out, const model_document& doc, const std::string& prefix )
{
    out << "[" << prefix << "domains]\n";
    for ( const auto& d : doc.domains )
        out << d << "\n";
    out << "\n[" << prefix << "policy]\n";
    for ( const auto& [ a, b ] : doc.policy )
        out << a << " -> " << b << "\n";
    out << "\n[" << prefix << "state]\n";
    for ( const auto& v : doc.state )
        out << v.name << " : {" << join( v.values ) << "} = " << v.initial << "\n";
    out << "\n[" << prefix << "actions]\n";
    for ( const auto& a : doc.actions )
        for ( const auto& r : a.rules )
            out << a.label << " @ " << a.domain << " : " << print_pattern( r.guard, false ) << " -> "
                << print_pattern( r.update, true ) << "\n";
    out << "\n[" << prefix << "observe]\n";
    for ( const auto& [ d, vars ] : doc.observe )
        out << d << " :" << ( vars.empty() ? "" : " " + join( vars ) ) << "\n";
}

void print_relation( std::ostringstream& out, const std::string& header, const relation_decl& r )
{
    out << "\n[" << header << "]\n";
    if ( r.any )
        out << "any\n";
    if ( !r.frame.empty() )
        out << "frame " << join( r.frame ) << "\n";
    for ( const auto& [ a, b ] : r.pairs )
        out << "pair " << print_pattern( a, false ) << " -> " << print_pattern( b, false ) << "\n";
}

} // namespace

std::string print( const model_document& doc )
{
    std::ostringstream out;
    print_level( out, doc, "" );
    return out.str();
}

std::string print( const refinement_document& doc )
{
    std::ostringstream out;
    print_level( out, doc.concrete, "concrete." );
    out << "\n";
    print_level( out, doc.abstract, "abstract." );
    out << "\n[alpha]\n";
    for ( const auto& [ c, a ] : doc.match )
        out << "match " << c << " == " << a << "\n";
    for ( const auto& [ c, a ] : doc.alpha_pairs )
        out << "pair " << print_pattern( c, false ) << " ~ " << print_pattern( a, false ) << "\n";
    out << "\n[zeta]\n";
    for ( const auto& [ c, a ] : doc.zeta )
        out << c << " -> " << a.value_or( "tau" ) << "\n";
    if ( !doc.components.empty() )
    {
        out << "\n[components]\n";
        for ( const auto& k : doc.components )
            out << k.name << " :" << ( k.actions.empty() ? "" : " " + join( k.actions ) ) << "\n";
        for ( const auto& k : doc.components )
        {
            print_relation( out, "rely " + k.name, k.rely );
            print_relation( out, "guarantee " + k.name, k.guarantee );
        }
    }
    return out.str();
}

std::string print( const document& doc )
{
    return std::visit( []( const auto& d ) { return print( d ); }, doc );
}

document load( const std::string& path )
{
    std::ifstream in( path, std::ios::binary );
    if ( !in )
        throw usage_error( "cannot read `" + path + "`" );
    std::ostringstream text;
    text << in.rdbuf();
    try
    {
        return parse( text.str() );
    }
    catch ( const parse_error& e )
    {
        throw model_error( path + ":" + e.what() );
    }
}

// -- elaboration -------------------------------------------------------------

namespace
{

struct compiled_pattern
{
    std::vector< std::pair< std::size_t, value > > items;

    bool matches( const state& s ) const
    {
        return std::all_of( items.begin(), items.end(), [ & ]( const auto& b ) { return s[ b.first ] == b.second; } );
    }
    void apply( state& s ) const
    {
        for ( const auto& [ v, x ] : items )
            s[ v ] = x;
    }
};

struct level
{
    schema_ptr layout;
    std::vector< var_decl > vars;

    std::size_t var( const std::string& name ) const { return layout->index( name ); }
    value value_of( std::size_t v, const std::string& text ) const
    {
        const auto& values = vars[ v ].values;
        return static_cast< value >( std::find( values.begin(), values.end(), text ) - values.begin() );
    }
    compiled_pattern compile( const pattern& p ) const
    {
        compiled_pattern out;
        for ( const auto& b : p )
        {
            const auto v = var( b.var );
            out.items.emplace_back( v, value_of( v, b.value ) );
        }
        return out;
    }
};

level make_level( const model_document& doc )
{
    std::vector< variable > vars;
    for ( const auto& v : doc.state )
        vars.push_back( { v.name, value_format::label, v.values } );
    return { std::make_shared< const schema >( std::move( vars ) ), doc.state };
}

std::vector< state > product( const level& L, std::size_t budget )
{
    std::size_t total = 1;
    for ( const auto& v : L.vars )
    {
        if ( total > budget / v.values.size() )
            throw budget_error( "declared value sets span more than " + std::to_string( budget ) + " states" );
        total *= v.values.size();
    }
    std::vector< state > out;
    out.reserve( total );
    std::vector< value > digits( L.vars.size(), 0 );
    for ( std::size_t n = 0; n < total; ++n )
    {
        out.emplace_back( L.layout, digits );
        for ( std::size_t i = digits.size(); i-- > 0; )
        {
            if ( ++digits[ i ] < static_cast< value >( L.vars[ i ].values.size() ) )
                break;
            digits[ i ] = 0;
        }
    }
    return out;
}

secure_system build( const model_document& doc, const level& L, std::size_t budget )
{
    std::vector< value > init;
    for ( std::size_t i = 0; i < L.vars.size(); ++i )
        init.push_back( L.value_of( i, L.vars[ i ].initial ) );

    std::vector< action_id > actions;
    std::map< action_id, std::string > dom;
    std::map< std::string, std::vector< std::pair< compiled_pattern, compiled_pattern > > > rules;
    for ( const auto& a : doc.actions )
    {
        actions.push_back( { a.label, std::nullopt } );
        dom.emplace( action_id{ a.label, std::nullopt }, a.domain );
        for ( const auto& r : a.rules )
            rules[ a.label ].emplace_back( L.compile( r.guard ), L.compile( r.update ) );
    }
    std::vector< action_id > sorted = actions;
    std::sort( sorted.begin(), sorted.end() );
    std::vector< std::vector< std::pair< compiled_pattern, compiled_pattern > > > by_index;
    for ( const auto& a : sorted )
        by_index.push_back( rules[ a.label ] );

    auto step = [ by_index ]( const state& s, std::size_t a )
    {
        std::vector< state > out;
        for ( const auto& [ guard, update ] : by_index.at( a ) )
            if ( guard.matches( s ) )
            {
                out.push_back( s );
                update.apply( out.back() );
            }
        return out;
    };
    auto universe = [ L, budget ]() { return product( L, budget ); };
    state_machine machine( L.layout, std::move( actions ), state( L.layout, init ), step, universe );

    std::map< std::string, std::vector< std::size_t > > visible;
    for ( const auto& [ d, vars ] : doc.observe )
        for ( const auto& v : vars )
            visible[ d ].push_back( L.var( v ) );
    auto observe = [ visible ]( const std::string& d, const state& s )
    {
        observation out;
        if ( auto it = visible.find( d ); it != visible.end() )
            for ( auto v : it->second )
                out.push_back( s[ v ] );
        return out;
    };
    std::set< std::pair< std::string, std::string > > policy( doc.policy.begin(), doc.policy.end() );
    return { std::move( machine ), info_flow_config( doc.domains, std::move( policy ), std::move( dom ), observe ) };
}

state_relation make_relation( const relation_decl& r, const level& L, std::size_t budget )
{
    if ( r.any )
        return state_relation::any();
    std::vector< std::size_t > frame;
    for ( const auto& v : r.frame )
        frame.push_back( L.var( v ) );
    std::vector< std::pair< compiled_pattern, compiled_pattern > > pairs;
    for ( const auto& [ a, b ] : r.pairs )
        pairs.emplace_back( L.compile( a ), L.compile( b ) );
    state_relation out;
    out.contains = [ frame, pairs ]( const state& s, const state& t )
    {
        for ( auto v : frame )
            if ( s[ v ] != t[ v ] )
                return false;
        if ( pairs.empty() )
            return true;
        return std::any_of( pairs.begin(), pairs.end(),
                            [ & ]( const auto& p ) { return p.first.matches( s ) && p.second.matches( t ); } );
    };
    auto contains = out.contains;
    out.successors = [ contains, L, budget ]( const state& s )
    {
        std::vector< state > next;
        for ( auto& t : product( L, budget ) )
            if ( contains( s, t ) )
                next.push_back( std::move( t ) );
        return next;
    };
    return out;
}

} // namespace

secure_system elaborate( const model_document& doc, std::size_t budget )
{
    return build( doc, make_level( doc ), budget );
}

elaborated_pair elaborate( const refinement_document& doc, std::size_t budget )
{
    const auto cl = make_level( doc.concrete );
    const auto al = make_level( doc.abstract );
    auto concrete = build( doc.concrete, cl, budget );
    auto abstract = build( doc.abstract, al, budget );

    step_map zeta;
    for ( const auto& [ c, a ] : doc.zeta )
        zeta.set( { c, std::nullopt },
                  a ? std::optional< action_id >( action_id{ *a, std::nullopt } ) : std::optional< action_id >() );
    for ( const auto& a : doc.concrete.actions )
        if ( !zeta.contains( { a.label, std::nullopt } ) )
            throw model_error( "zeta does not map concrete action `" + a.label + "`" );

    // Values are compared by their written form, so the two levels may
    // declare their value sets in different orders.
    std::vector< std::pair< std::size_t, std::size_t > > match;
    for ( const auto& [ c, a ] : doc.match )
        match.emplace_back( cl.var( c ), al.var( a ) );
    std::vector< std::pair< compiled_pattern, compiled_pattern > > pairs;
    for ( const auto& [ c, a ] : doc.alpha_pairs )
        pairs.emplace_back( cl.compile( c ), al.compile( a ) );
    auto alpha = [ match, pairs, cl, al ]( const state& s, const state& sigma )
    {
        for ( const auto& [ c, a ] : match )
            if ( cl.vars[ c ].values[ s[ c ] ] != al.vars[ a ].values[ sigma[ a ] ] )
                return false;
        if ( pairs.empty() )
            return true;
        return std::any_of( pairs.begin(), pairs.end(),
                            [ & ]( const auto& p ) { return p.first.matches( s ) && p.second.matches( sigma ); } );
    };

    elaborated_pair out{ refinement_pair{ std::move( concrete ), std::move( abstract ), alpha, std::move( zeta ) },
                         std::nullopt };
    if ( doc.components.empty() )
        return out;

    rely_guarantee_spec rg;
    std::map< std::string, std::string > owner;
    for ( const auto& k : doc.components )
    {
        for ( const auto& a : k.actions )
            owner.emplace( a, k.name );
        component_rg spec;
        spec.rely = make_relation( k.rely, cl, budget );
        spec.guarantee = make_relation( k.guarantee, cl, budget );
        spec.abstract_rely = state_relation::any();
        spec.abstract_guarantee = state_relation::any();
        rg.components.emplace( k.name, std::move( spec ) );
    }
    for ( const auto& a : doc.concrete.actions )
        if ( !owner.contains( a.label ) )
            throw model_error( "concrete action `" + a.label + "` belongs to no component" );
    rg.component_of = [ owner ]( const action_id& a )
    {
        auto it = owner.find( a.label );
        if ( it == owner.end() )
            throw model_error( "action `" + a.to_string() + "` belongs to no component" );
        return it->second;
    };
    out.rg = std::move( rg );
    return out;
}

} // namespace ifsec::specfile
