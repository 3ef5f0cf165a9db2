#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qtkz/error.hpp"
#include "qtkz/style.hpp"

using namespace qtkz;

namespace {

// Independent oracle: linear blend a*w + b*(1-w), channel by channel.
Color blend(Color a, Color b, double w) {
    return {a.r * w + b.r * (1 - w), a.g * w + b.g * (1 - w), a.b * w + b.b * (1 - w)};
}

void expect_color_near(const Color &got, const Color &want, double tol = 1e-9) {
    EXPECT_NEAR(got.r, want.r, tol);
    EXPECT_NEAR(got.g, want.g, tol);
    EXPECT_NEAR(got.b, want.b, tol);
}

const std::vector<StyleTarget> kAllTargets = {
    StyleTarget::Gate,       StyleTarget::GateLabel,  StyleTarget::Meter,     StyleTarget::MeterLabel,
    StyleTarget::Slice,      StyleTarget::SliceLabel, StyleTarget::Wave,      StyleTarget::GateInput,
    StyleTarget::GateOutput, StyleTarget::LeftBrace,  StyleTarget::RightBrace, StyleTarget::Phase,
    StyleTarget::OpenPhase,  StyleTarget::PhaseLabel, StyleTarget::Targ,      StyleTarget::Swap,
    StyleTarget::Group,      StyleTarget::GroupLabel, StyleTarget::Wire,      StyleTarget::StickLabel,
    StyleTarget::Trash,      StyleTarget::Push,       StyleTarget::Ebit,      StyleTarget::EbitLabel,
    StyleTarget::Arrow,
};

}  // namespace

TEST(parse_color, blue_twenty) { expect_color_near(parse_color("blue!20"), blend({0, 0, 1}, {1, 1, 1}, 0.2)); }

TEST(parse_color, base_names) {
    EXPECT_EQ(parse_color("white"), (Color{1, 1, 1}));
    EXPECT_EQ(parse_color("red"), (Color{1, 0, 0}));
}

TEST(parse_color, three_part_mix) { expect_color_near(parse_color("red!50!blue"), Color{0.5, 0, 0.5}); }

TEST(parse_color, errors) {
    auto code_of = [](std::string_view spec) {
        try {
            parse_color(spec);
        } catch (const Error &e) {
            return e.code();
        }
        return ErrorCode::BadStylesheet;
    };
    EXPECT_EQ(code_of("mauve"), ErrorCode::UnknownColorName);
    EXPECT_EQ(code_of("blue!120"), ErrorCode::BadPercent);
    EXPECT_EQ(code_of("blue!x"), ErrorCode::BadPercent);
    EXPECT_EQ(code_of("blue!20!mauve"), ErrorCode::UnknownColorName);
}

TEST(parse_color, property_channels_in_range) {
    const std::vector<std::string> names = {"red", "green", "blue",  "cyan", "magenta",
                                            "yellow", "black", "white", "gray", "orange"};
    std::mt19937 rng(7);
    std::uniform_int_distribution<std::size_t> pick(0, names.size() - 1);
    std::uniform_real_distribution<double> pct(0, 100);
    for (int i = 0; i < 500; ++i) {
        std::string a = names[pick(rng)], b = names[pick(rng)];
        double p = pct(rng);
        Color c = parse_color(a + "!" + std::to_string(p) + "!" + b);
        for (double ch : {c.r, c.g, c.b}) {
            EXPECT_GE(ch, 0.0);
            EXPECT_LE(ch, 1.0);
        }
        expect_color_near(c, blend(parse_color(a), parse_color(b), p / 100.0), 1e-6);
    }
}

TEST(to_hex, formats) {
    EXPECT_EQ(to_hex(parse_color("red!20")), "#ffcccc");
    EXPECT_EQ(to_hex(Color{0, 0, 0}), "#000000");
}

TEST(parse_style_keys, boxing_example) {
    auto parsed = parse_style_keys("dashed,rounded corners,fill=blue!20, inner xsep=2pt");
    EXPECT_TRUE(parsed.unknown_keys.empty());
    EXPECT_EQ(parsed.style.dashed, true);
    EXPECT_EQ(parsed.style.rounded, true);
    ASSERT_TRUE(parsed.style.fill && parsed.style.fill->color);
    expect_color_near(*parsed.style.fill->color, Color{0.8, 0.8, 1.0});
    EXPECT_EQ(parsed.style.inner_xsep, Length::pt(2));
}

TEST(parse_style_keys, unknown_shape_is_reported) {
    auto parsed = parse_style_keys("starburst,fill=yellow,line width=0.15mm,inner xsep=-4pt,inner ysep=-5pt");
    ASSERT_EQ(parsed.unknown_keys.size(), 1u);
    EXPECT_EQ(parsed.unknown_keys[0], "starburst");
    EXPECT_EQ(parsed.style.fill->color, (Color{1, 1, 0}));
    EXPECT_EQ(parsed.style.line_width, Length::mm(0.15));
    EXPECT_EQ(parsed.style.inner_ysep, Length::pt(-5));
}

TEST(parse_style_keys, empty) {
    auto parsed = parse_style_keys("");
    EXPECT_TRUE(parsed.style.empty());
    EXPECT_TRUE(parsed.unknown_keys.empty());
}

TEST(parse_style_keys, bare_color_is_stroke_and_shorten) {
    auto parsed = parse_style_keys("blue, shorten <= 0.2cm, shorten >= 0.3cm, label position=above");
    EXPECT_EQ(parsed.style.stroke->color, (Color{0, 0, 1}));
    EXPECT_EQ(parsed.style.label_position, LabelPosition::Above);
    // `shorten <=x` splits as key "shorten <" and value "x".
    EXPECT_EQ(parsed.style.shorten_start, Length::cm(0.2));
    EXPECT_EQ(parsed.style.shorten_end, Length::cm(0.3));
}

TEST(style_sheet, documented_names_seeded) {
    StyleSheet sheet;
    EXPECT_EQ(sheet.named().size(), 16u);
    for (const auto &name : StyleSheet::documented_names()) EXPECT_NE(sheet.find(name), nullptr) << name;
}

TEST(resolve_style, operator_fill_applies_to_gates) {
    StyleSheet sheet;
    sheet.append("operator", parse_style_keys("fill=red!20").style);
    auto s = resolve_style(StyleTarget::Gate, sheet, {});
    ASSERT_TRUE(s.fill.color);
    expect_color_near(*s.fill.color, Color{1.0, 0.8, 0.8});
    EXPECT_EQ(resolve_style(StyleTarget::Meter, sheet, {}).fill, builtin_style(StyleTarget::Meter).fill);
}

TEST(resolve_style, per_element_beats_transparent) {
    StyleSheet sheet;
    GlobalFlags flags;
    flags.transparent = true;
    auto s = resolve_style(StyleTarget::Gate, sheet, flags, parse_style_keys("fill=yellow").style);
    EXPECT_EQ(s.fill.color, (Color{1, 1, 0}));
    EXPECT_FALSE(resolve_style(StyleTarget::Gate, sheet, flags).fill.visible());
}

TEST(resolve_style, identity_without_edits) {
    StyleSheet sheet;
    for (auto t : kAllTargets) EXPECT_EQ(resolve_style(t, sheet, {}), builtin_style(t));
}

TEST(resolve_style, json_stylesheet) {
    StyleSheet sheet;
    auto unknown = load_stylesheet_json(R"({"styles":{"operator":{"fill":"red!20"},"wave":"dashed"}})", sheet);
    EXPECT_TRUE(unknown.empty());
    EXPECT_EQ(resolve_style(StyleTarget::Gate, sheet, {}).fill.color, parse_color("red!20"));
    EXPECT_TRUE(resolve_style(StyleTarget::Wave, sheet, {}).dashed);
    EXPECT_THROW(load_stylesheet_json("[1]", sheet), Error);
    EXPECT_THROW(load_stylesheet_json("{", sheet), Error);
}

TEST(merge, property_associative) {
    const std::vector<std::string> fragments = {
        "fill=red",  "fill=blue!20", "draw=none", "dashed",         "solid",    "line width=1pt",
        "inner xsep=2pt", "rotate=90", "xshift=1mm", "rounded corners", "anchor=north", "label position=below",
    };
    std::mt19937 rng(99);
    std::uniform_int_distribution<std::size_t> pick(0, fragments.size() - 1);
    auto random_partial = [&] {
        std::string raw;
        for (int k = 0; k < 3; ++k) raw += fragments[pick(rng)] + ",";
        return parse_style_keys(raw).style;
    };
    for (int i = 0; i < 300; ++i) {
        auto a = random_partial(), b = random_partial(), c = random_partial();
        EXPECT_EQ(merge(merge(a, b), c), merge(a, merge(b, c)));
        NodeStyle base = builtin_style(StyleTarget::Gate);
        EXPECT_EQ(apply(apply(apply(base, a), b), c), apply(base, merge(merge(a, b), c)));
    }
}

TEST(resolve_style, thin_lines_touches_only_line_width) {
    StyleSheet sheet;
    GlobalFlags thin;
    thin.thin_lines = true;
    for (auto t : kAllTargets) {
        NodeStyle plain = resolve_style(t, sheet, {});
        NodeStyle thinned = resolve_style(t, sheet, thin);
        EXPECT_NEAR(thinned.line_width.to_units(), plain.line_width.to_units() / 2, 1e-12);
        thinned.line_width = plain.line_width;
        EXPECT_EQ(thinned, plain);
    }
    EXPECT_EQ(resolve_style(StyleTarget::Gate, sheet, thin).line_width, Length::pt(0.3));
}

TEST(resolve_style, transparent_touches_only_fill) {
    StyleSheet sheet;
    GlobalFlags clear;
    clear.transparent = true;
    for (auto t : kAllTargets) {
        NodeStyle plain = resolve_style(t, sheet, {});
        NodeStyle cleared = resolve_style(t, sheet, clear);
        cleared.fill = plain.fill;
        EXPECT_EQ(cleared, plain);
    }
}
