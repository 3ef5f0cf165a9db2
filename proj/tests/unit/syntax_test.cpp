#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "qtkz/error.hpp"
#include "qtkz/syntax.hpp"

using namespace qtkz;

namespace {

std::vector<Token> significant(const std::vector<Token> &tokens) {
    std::vector<Token> out;
    for (const auto &t : tokens) {
        if (t.kind == TokenKind::Comment) continue;
        out.push_back(t);
    }
    return out;
}

std::string concat_spans(std::string_view src, const std::vector<Token> &tokens) {
    std::string out;
    for (const auto &t : tokens) out += src.substr(t.span.begin, t.span.end - t.span.begin);
    return out;
}

ErrorCode error_of(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::BadStylesheet;
}

}  // namespace

TEST(tokenize, gate_then_wire) {
    auto toks = tokenize("\\gate{H} & \\qw");
    ASSERT_EQ(toks.size(), 6u);
    EXPECT_EQ(toks[0].kind, TokenKind::Command);
    EXPECT_EQ(toks[0].text, "gate");
    EXPECT_EQ(toks[1].kind, TokenKind::BeginGroup);
    EXPECT_EQ(toks[2].kind, TokenKind::Text);
    EXPECT_EQ(toks[2].text, "H");
    EXPECT_EQ(toks[3].kind, TokenKind::EndGroup);
    EXPECT_EQ(toks[4].kind, TokenKind::CellSeparator);
    EXPECT_EQ(toks[5].kind, TokenKind::Command);
    EXPECT_EQ(toks[5].text, "qw");
}

TEST(tokenize, empty_input) { EXPECT_TRUE(tokenize("").empty()); }

TEST(tokenize, ampersand_replacement_keeps_inner_ampersand) {
    std::string src = "\\gate{\\left(\\begin{array}{cc} \\alpha & \\beta \\end{array}\\right)} \\& \\ctrl{1}";
    auto toks = tokenize(src, true);
    int separators = 0;
    bool inner_amp_is_text = false;
    for (const auto &t : toks) {
        if (t.kind == TokenKind::CellSeparator) ++separators;
        if (t.kind == TokenKind::Text && t.text.find('&') != std::string::npos) inner_amp_is_text = true;
    }
    EXPECT_EQ(separators, 1);
    EXPECT_TRUE(inner_amp_is_text);
}

TEST(tokenize, bare_ampersand_is_text_under_replacement) {
    auto toks = tokenize("a & b \\& c", true);
    int separators = 0;
    for (const auto &t : toks) separators += t.kind == TokenKind::CellSeparator;
    EXPECT_EQ(separators, 1);
}

TEST(tokenize, comments_run_to_end_of_line) {
    std::string src = "\\qw % trailing & not a separator\n& \\qw";
    auto toks = tokenize(src);
    int separators = 0, comments = 0;
    for (const auto &t : toks) {
        separators += t.kind == TokenKind::CellSeparator;
        comments += t.kind == TokenKind::Comment;
    }
    EXPECT_EQ(separators, 1);
    EXPECT_EQ(comments, 1);
    EXPECT_EQ(concat_spans(src, toks), src);
}

TEST(tokenize, separator_lengths) {
    auto toks = tokenize("a &[2mm] b \\\\[1cm] c");
    std::vector<Token> seps;
    for (const auto &t : toks) {
        if (t.kind == TokenKind::CellSeparator || t.kind == TokenKind::RowSeparator) seps.push_back(t);
    }
    ASSERT_EQ(seps.size(), 2u);
    EXPECT_EQ(seps[0].length, Length::mm(2));
    EXPECT_EQ(seps[1].length, Length::cm(1));
}

TEST(tokenize, inline_node_style_at_cell_start) {
    auto toks = significant(tokenize("& |[linecont, inner ysep=3pt]| & x"));
    ASSERT_GE(toks.size(), 2u);
    EXPECT_EQ(toks[1].kind, TokenKind::InlineNodeStyle);
    EXPECT_EQ(toks[1].text, "linecont, inner ysep=3pt");
}

TEST(tokenize, control_space_is_text) {
    auto toks = tokenize("\\ \\ldots\\ \\qw");
    ASSERT_EQ(toks.size(), 4u);
    EXPECT_EQ(toks[0].kind, TokenKind::Text);
    EXPECT_EQ(toks[1].text, "ldots");
    EXPECT_EQ(toks[2].kind, TokenKind::Text);
    EXPECT_EQ(toks[3].text, "qw");
}

TEST(tokenize, errors_are_positioned) {
    try {
        tokenize("\\gate{H & \\qw");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::UnbalancedBraces);
        EXPECT_EQ(e.offset(), 5u);
    }
    try {
        tokenize("\\qw } ");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::UnbalancedBraces);
        EXPECT_EQ(e.offset(), 4u);
    }
    try {
        tokenize("\\gate[style={fill=red]{U}");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::UnbalancedBraces);
    }
    try {
        tokenize("\\gate[wires=2");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::UnterminatedOptionBlock);
        EXPECT_EQ(e.offset(), 5u);
    }
    try {
        tokenize("x \\@ y");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::BadControlSymbol);
        EXPECT_EQ(e.offset(), 2u);
    }
}

TEST(tokenize, command_names_are_letters) {
    auto toks = tokenize("\\gate1{H}");
    EXPECT_EQ(toks[0].text, "gate");
    EXPECT_EQ(toks[1].kind, TokenKind::Text);
}

// Random sources drawn from a small alphabet of quantikz fragments.
TEST(tokenize, property_spans_tile_source) {
    const std::vector<std::string> pieces = {
        "\\gate",  "{",    "}",   "H",  " ",  "  ",   "&",     "\\\\",    "[wires=2]", "\\qw",
        "% c\n",   "\n",   "$",   "\\ ", "&[2mm]", "\\\\[1cm]", "|[x]|", "\\&", "{}",     "\\ket{0}",
        "\\lstick", "=",   "\\,", "]"};
    std::mt19937 rng(1234);
    int checked = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        std::string src;
        int n = std::uniform_int_distribution<int>(0, 14)(rng);
        for (int k = 0; k < n; ++k) src += pieces[std::uniform_int_distribution<std::size_t>(0, pieces.size() - 1)(rng)];
        for (bool amp : {false, true}) {
            std::vector<Token> toks;
            try {
                toks = tokenize(src, amp);
            } catch (const Error &e) {
                ASSERT_TRUE(e.offset().has_value()) << src;
                ASSERT_LE(*e.offset(), src.size());
                continue;
            }
            std::size_t cursor = 0;
            for (const auto &t : toks) {
                ASSERT_EQ(t.span.begin, cursor) << src;
                ASSERT_LT(t.span.begin, t.span.end) << src;
                if (t.kind == TokenKind::Command) {
                    for (char c : t.text) ASSERT_TRUE(std::isalpha(static_cast<unsigned char>(c)));
                }
                cursor = t.span.end;
            }
            ASSERT_EQ(cursor, src.size()) << src;
            ASSERT_EQ(concat_spans(src, toks), src);
            ++checked;
        }
    }
    EXPECT_GT(checked, 1000);
}

TEST(parse_document, single_wire_listing) {
    auto m = parse_document(
        "\\begin{quantikz}\n"
        "\\lstick{\\ket{0}} & \\phase{\\alpha} & \\gate{H}\n"
        "    & \\phase{\\beta} & \\gate{H} & \\phase{\\gamma}\n"
        "    & \\rstick{Arbitrary\\\\pure state}\\qw\n"
        "\\end{quantikz}\n");
    ASSERT_EQ(m.rows.size(), 1u);
    EXPECT_EQ(m.rows[0].cells.size(), 7u);
    auto &stick = std::get<CommandCall>(m.rows[0].cells[6].items[0]);
    EXPECT_EQ(stick.name, "rstick");
    ASSERT_EQ(stick.braced_args.size(), 1u);
    EXPECT_EQ(stick.braced_args[0], "Arbitrary\\\\pure state");
    EXPECT_EQ(m.env_name, "quantikz");
}

TEST(parse_document, column_extra_space_and_two_commands) {
    auto m = parse_document("\\lstick{$\\ket{0}^{\\otimes n}$} &[2mm] \\gate{H}\\qwbundle{3} & \\qw");
    ASSERT_EQ(m.rows.size(), 1u);
    ASSERT_EQ(m.rows[0].cells.size(), 3u);
    ASSERT_EQ(m.col_extra_space.size(), 1u);
    EXPECT_EQ(m.col_extra_space.at(0), Length::mm(2));
    EXPECT_EQ(m.rows[0].cells[1].items.size(), 2u);
}

TEST(parse_document, row_extra_space) {
    auto m = parse_document("a \\\\[1cm] b");
    ASSERT_EQ(m.rows.size(), 2u);
    ASSERT_EQ(m.row_extra_space.size(), 1u);
    EXPECT_EQ(m.row_extra_space.at(0), Length::cm(1));
}

TEST(parse_document, options_and_arguments) {
    auto m = parse_document("\\begin{quantikz}[row sep={0.6cm,between origins}, column sep=1cm]\n"
                            "& \\gate[wires=2][2cm]{U} \\\\ & \n\\end{quantikz}");
    ASSERT_EQ(m.env_options_raw.size(), 1u);
    auto kv = parse_key_values(m.env_options_raw[0]);
    ASSERT_EQ(kv.size(), 2u);
    EXPECT_EQ(kv[0].key, "row sep");
    EXPECT_EQ(kv[0].value, "0.6cm,between origins");
    auto &gate = std::get<CommandCall>(m.rows[0].cells[1].items[0]);
    EXPECT_EQ(gate.opt_args, (std::vector<std::string>{"wires=2", "2cm"}));
    EXPECT_EQ(gate.braced_args, (std::vector<std::string>{"U"}));
}

TEST(parse_document, header_line_supplies_options) {
    auto m = parse_document("%!quantikz [slice all]\n& \\gate{H} & \\qw\n");
    ASSERT_EQ(m.env_options_raw.size(), 1u);
    EXPECT_EQ(m.env_options_raw[0], "slice all");
    ASSERT_EQ(m.rows.size(), 1u);
    EXPECT_EQ(m.rows[0].cells.size(), 3u);
}

TEST(parse_document, trailing_row_separator_is_recorded) {
    auto m = parse_document("& \\qw \\\\\n& \\qw \\\\\n");
    EXPECT_EQ(m.rows.size(), 2u);
    EXPECT_TRUE(m.trailing_row_separator.has_value());
}

TEST(parse_document, ampersand_replacement_from_environment) {
    auto m = parse_document("\\begin{quantikz}[ampersand replacement=\\&]\n"
                            "\\lstick{$\\ket{0}$} \\& \\gate{\\left(\\begin{array}{cc} \\alpha & \\beta \\\\ \\beta & "
                            "-\\alpha \\end{array}\\right)} \\& \\ctrl{1} \\\\\n"
                            "\\lstick{$\\ket{0}$} \\& \\qw \\& \\targ{}\n\\end{quantikz}");
    ASSERT_EQ(m.rows.size(), 2u);
    EXPECT_EQ(m.rows[0].cells.size(), 3u);
    EXPECT_EQ(m.rows[1].cells.size(), 3u);
}

TEST(parse_document, missing_environment_end) {
    EXPECT_EQ(error_of([] { parse_document("\\begin{quantikz} & \\qw"); }), ErrorCode::MissingEnvironmentEnd);
}

TEST(parse_document, empty_body_has_no_rows) { EXPECT_TRUE(parse_document("").rows.empty()); }

TEST(parse_key_values, nested_braces_stay_in_value) {
    auto kv = parse_key_values("wires=2,steps=3,style={inner sep=6pt}");
    ASSERT_EQ(kv.size(), 3u);
    EXPECT_EQ(kv[0], (KeyValue{"wires", "2"}));
    EXPECT_EQ(kv[1], (KeyValue{"steps", "3"}));
    EXPECT_EQ(kv[2], (KeyValue{"style", "inner sep=6pt"}));
}

TEST(parse_key_values, bare_key) {
    auto kv = parse_key_values("slice all");
    ASSERT_EQ(kv.size(), 1u);
    EXPECT_EQ(kv[0], (KeyValue{"slice all", std::nullopt}));
}

TEST(parse_key_values, empty) { EXPECT_TRUE(parse_key_values("").empty()); }

TEST(parse_key_values, shorten_keys_split_on_first_equals) {
    auto kv = parse_key_values("shorten <=-0.1cm,shorten >=-0.1cm");
    ASSERT_EQ(kv.size(), 2u);
    EXPECT_EQ(kv[0], (KeyValue{"shorten <", "-0.1cm"}));
    EXPECT_EQ(kv[1], (KeyValue{"shorten >", "-0.1cm"}));
}

TEST(parse_key_values, property_reserialization_is_stable) {
    const std::vector<std::string> keys = {"wires", "style", "slice all", "label style", "inner  sep", "a"};
    const std::vector<std::string> values = {"2", "{dashed,fill=blue!20}", "x=y", "", "{}", "slice \\col",
                                             "{0.6cm,between origins}"};
    std::mt19937 rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        std::string raw;
        int n = std::uniform_int_distribution<int>(0, 5)(rng);
        for (int k = 0; k < n; ++k) {
            if (k) raw += std::string(std::uniform_int_distribution<int>(0, 2)(rng), ' ') + ",";
            raw += " " + keys[std::uniform_int_distribution<std::size_t>(0, keys.size() - 1)(rng)];
            if (rng() % 2) raw += "=" + values[std::uniform_int_distribution<std::size_t>(0, values.size() - 1)(rng)];
        }
        auto first = parse_key_values(raw);
        auto second = parse_key_values(serialize_key_values(first));
        ASSERT_EQ(first, second) << raw;
    }
}

TEST(length, parses_units_and_spaces) {
    EXPECT_EQ(parse_length("2mm"), Length::mm(2));
    EXPECT_EQ(parse_length("-0.3cm"), Length::cm(-0.3));
    EXPECT_EQ(parse_length(".7em"), Length::em(0.7));
    EXPECT_EQ(parse_length("6 pt"), Length::pt(6));
    EXPECT_FALSE(parse_length("6").has_value());
    EXPECT_FALSE(parse_length("cm").has_value());
    EXPECT_FALSE(parse_length("2in").has_value());
}

TEST(length, conversion_table) {
    EXPECT_DOUBLE_EQ(Length::cm(1).to_units(), 100.0);
    EXPECT_DOUBLE_EQ(Length::mm(1).to_units(), 10.0);
    EXPECT_DOUBLE_EQ(Length::pt(28.4526).to_units(), 100.0);
    EXPECT_DOUBLE_EQ(Length::em(2).to_units(40.0), 80.0);
}
