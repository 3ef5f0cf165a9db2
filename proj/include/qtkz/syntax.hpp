#pragma once

// Tokenizer and matrix parser for quantikz source. The output is untyped:
// every command is kept as a CommandCall regardless of whether it is known,
// so the parser never fails on vocabulary, only on structure.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qtkz/length.hpp"

namespace qtkz {

/// Half-open byte range [begin, end) into the source text.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
    friend bool operator==(const Span &, const Span &) = default;
};

enum class TokenKind {
    Command,          // text = control word without the backslash
    BeginGroup,       // {
    EndGroup,         // }
    CellSeparator,    // & (or \& under ampersand replacement); length from `&[2mm]`
    RowSeparator,     // \\ ; length from `\\[1cm]`
    OptionOpen,       // [ at brace depth 0
    OptionClose,      // ]
    Text,             // any other run, raw
    InlineNodeStyle,  // |[...]| at the start of a cell; text = the bracket content
    Comment,          // % to end of line
};

struct Token {
    TokenKind kind = TokenKind::Text;
    std::string text;
    std::optional<Length> length;
    Span span;

    friend bool operator==(const Token &, const Token &) = default;
};

/// Splits source into tokens whose spans tile the input exactly. Whitespace
/// after a control word and around separators is folded into that token's
/// span. Throws Error{UnbalancedBraces, UnterminatedOptionBlock,
/// BadControlSymbol}.
std::vector<Token> tokenize(std::string_view source, bool ampersand_replacement = false);

/// Tokenize a slice of a larger document; spans are offset by `base`.
std::vector<Token> tokenize(std::string_view source, bool ampersand_replacement, std::size_t base);

struct CommandCall {
    std::string name;
    std::vector<std::string> opt_args;     // raw content of each [...]
    std::vector<std::string> braced_args;  // raw content of each {...}
    Span span;
};

struct TextRun {
    std::string text;
    Span span;
};

using CellItem = std::variant<CommandCall, TextRun>;

struct CellSource {
    std::vector<CellItem> items;
    std::optional<std::string> inline_style;  // raw `|[...]|` content
    std::size_t offset = 0;                   // where the cell starts
};

struct RowSource {
    std::vector<CellSource> cells;
    std::size_t offset = 0;
};

struct MatrixSource {
    std::string env_name = "quantikz";
    std::vector<std::string> env_options_raw;
    std::size_t env_options_offset = 0;
    std::vector<RowSource> rows;
    std::map<int, Length> col_extra_space;  // gap index (after column i) -> extra space
    std::map<int, Length> row_extra_space;  // gap index (after row i) -> extra space
    std::optional<std::size_t> trailing_row_separator;
    std::string source;
};

/// Accepts a `.qtz` body (optionally headed by `%!quantikz [options]`) or a
/// document holding a full `\begin{quantikz}...\end{quantikz}` environment.
MatrixSource parse_document(std::string_view source);

struct KeyValue {
    std::string key;
    std::optional<std::string> value;
    friend bool operator==(const KeyValue &, const KeyValue &) = default;
};

std::vector<KeyValue> parse_key_values(std::string_view raw);
std::string serialize_key_values(const std::vector<KeyValue> &pairs);

}  // namespace qtkz
