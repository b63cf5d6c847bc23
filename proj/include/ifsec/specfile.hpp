#pragma once

#include "ifsec/refinement.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

// Line-oriented `.ifs` documents describing finite systems by explicit
// guarded-assignment rules.
//
//   [domains]    one name per line
//   [policy]     A -> B
//   [state]      x : {v1, v2} = v1      or   n : 0..3 = 0
//   [actions]    label @ domain : x=v1, n=0 -> x=v2      (`*` any, `skip` none)
//   [observe]    D : x, n
//
// A refinement document prefixes the five sections with `concrete.` and
// `abstract.` and adds
//
//   [alpha]      match cx == ax   |   pair cx=v ~ ax=w
//   [zeta]       concrete_label -> abstract_label | tau
//   [components] K : label, label
//   [rely K]     any | frame x, y | pair x=v -> x=w
//   [guarantee K]
namespace ifsec::specfile
{

class parse_error : public model_error
{
    std::size_t _line;
    std::size_t _column;
    std::string _message;
    std::string _hint;

public:
    parse_error( std::size_t line, std::size_t column, std::string message, std::string hint );

    [[nodiscard]] std::size_t line() const { return _line; }
    [[nodiscard]] std::size_t column() const { return _column; }
    [[nodiscard]] const std::string& message() const { return _message; }
    [[nodiscard]] const std::string& hint() const { return _hint; }
};

struct binding
{
    std::string var;
    std::string value;

    friend bool operator==( const binding&, const binding& ) = default;
};

using pattern = std::vector< binding >; // empty matches everything

struct var_decl
{
    std::string name;
    std::vector< std::string > values;
    std::string initial;

    friend bool operator==( const var_decl&, const var_decl& ) = default;
};

struct rule
{
    pattern guard;
    pattern update; // empty is skip

    friend bool operator==( const rule&, const rule& ) = default;
};

struct action_decl
{
    std::string label;
    std::string domain;
    std::vector< rule > rules; // every matching rule contributes a successor

    friend bool operator==( const action_decl&, const action_decl& ) = default;
};

struct model_document
{
    std::vector< std::string > domains;
    std::vector< std::pair< std::string, std::string > > policy;
    std::vector< var_decl > state;
    std::vector< action_decl > actions;
    std::vector< std::pair< std::string, std::vector< std::string > > > observe;

    friend bool operator==( const model_document&, const model_document& ) = default;
};

struct relation_decl
{
    bool any = false;
    std::vector< std::string > frame;
    std::vector< std::pair< pattern, pattern > > pairs;

    friend bool operator==( const relation_decl&, const relation_decl& ) = default;
};

struct component_decl
{
    std::string name;
    std::vector< std::string > actions;
    relation_decl rely{ true, {}, {} };
    relation_decl guarantee{ true, {}, {} };

    friend bool operator==( const component_decl&, const component_decl& ) = default;
};

struct refinement_document
{
    model_document concrete;
    model_document abstract;
    std::vector< std::pair< std::string, std::string > > match; // concrete var, abstract var
    std::vector< std::pair< pattern, pattern > > alpha_pairs;
    std::vector< std::pair< std::string, std::optional< std::string > > > zeta;
    std::vector< component_decl > components;

    friend bool operator==( const refinement_document&, const refinement_document& ) = default;
};

using document = std::variant< model_document, refinement_document >;

[[nodiscard]] document parse( std::string_view text );
[[nodiscard]] model_document parse_model( std::string_view text );
[[nodiscard]] refinement_document parse_refinement( std::string_view text );

// Canonical form: parse(print(d)) == d.
[[nodiscard]] std::string print( const model_document& doc );
[[nodiscard]] std::string print( const refinement_document& doc );
[[nodiscard]] std::string print( const document& doc );

// Reads and parses a file; a missing file is a usage_error, a parse_error
// message is prefixed with the path.
[[nodiscard]] document load( const std::string& path );

[[nodiscard]] secure_system elaborate( const model_document& doc, std::size_t budget = default_state_budget );

struct elaborated_pair
{
    refinement_pair pair;
    std::optional< rely_guarantee_spec > rg; // present when [components] is given
};

[[nodiscard]] elaborated_pair elaborate( const refinement_document& doc, std::size_t budget = default_state_budget );

} // namespace ifsec::specfile
