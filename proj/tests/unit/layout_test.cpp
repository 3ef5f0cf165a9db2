#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qtkz/error.hpp"
#include "qtkz/layout.hpp"
#include "qtkz/text.hpp"
#include "test_support.hpp"

using namespace qtkz;
using qtkz::testing::corpus;
using qtkz::testing::corpus_files;
using qtkz::testing::read_file;

namespace {

constexpr double kTol = 1e-9;

// Hand arithmetic from the estimator constants.
constexpr double kFs = 10.0 * 100.0 / 28.4526;  // 10pt in units
constexpr double kPt = 100.0 / 28.4526;

LayoutResult lay(std::string_view src) { return layout(compile(src), StyleSheet{}); }

}  // namespace

TEST(text, plain_label) { EXPECT_EQ(format_label("H").plain(), "H"); }

TEST(text, math_delimiters_and_ket) { EXPECT_EQ(format_label("$\\ket{0}$").plain(), "|0⟩"); }

TEST(text, bra_and_greek) { EXPECT_EQ(format_label("$\\bra{\\psi}$").plain(), "⟨ψ|"); }

TEST(text, superscript_is_a_scaled_raised_run) {
    auto t = format_label("$U^\\dagger$");
    ASSERT_EQ(t.lines.size(), 1u);
    ASSERT_EQ(t.lines[0].size(), 2u);
    EXPECT_EQ(t.lines[0][0].text, "U");
    EXPECT_EQ(t.lines[0][1].text, "†");
    EXPECT_DOUBLE_EQ(t.lines[0][1].scale, 0.7);
    EXPECT_GT(t.lines[0][1].rise, 0.0);
}

TEST(text, subscript_lowers) {
    auto t = format_label("$R_z$");
    ASSERT_EQ(t.lines[0].size(), 2u);
    EXPECT_LT(t.lines[0][1].rise, 0.0);
}

TEST(text, smallcaps_group_stripped) { EXPECT_EQ(format_label("{\\sc Reset}").plain(), "Reset"); }

TEST(text, line_breaks) {
    auto t = format_label("a\\\\b");
    EXPECT_EQ(t.lines.size(), 2u);
    EXPECT_EQ(t.plain(), "a\nb");
}

TEST(text, unknown_macro_passes_through) { EXPECT_EQ(format_label("\\foo x").plain(), "\\foo x"); }

TEST(text, empty_label) {
    EXPECT_TRUE(format_label("").empty());
    EXPECT_EQ(TextMetrics{}.height(format_label("")), 0.0);
}

TEST(text, width_counts_code_points) {
    TextMetrics m;
    EXPECT_NEAR(m.width("αβ"), 2 * 0.52 * kFs, kTol);
    EXPECT_EQ(utf8_length("|0⟩"), 3u);
}

TEST(measure, gate_h_default_style) {
    TextMetrics m;
    Gate g;
    g.label = "H";
    Size s = measure(g, builtin_style(StyleTarget::Gate), m);
    EXPECT_NEAR(s.w, 0.52 * kFs + 2 * 3 * kPt, 1e-6);
    EXPECT_NEAR(s.h, 1.2 * kFs + 2 * 3 * kPt, 1e-6);
}

TEST(measure, min_width_wins) {
    Gate g;
    g.label = "H";
    g.min_width = Length::cm(2);
    EXPECT_NEAR(measure(g, builtin_style(StyleTarget::Gate), TextMetrics{}).w, 200.0, kTol);
}

TEST(measure, ghost_is_height_only) {
    TextMetrics m;
    Gate g;
    g.label = "X";
    auto gs = measure(g, builtin_style(StyleTarget::Gate), m);
    Size s = measure(Phantom{PhantomKind::Ghost, "X"}, builtin_style(StyleTarget::Gate), m);
    EXPECT_EQ(s.w, 0.0);
    EXPECT_NEAR(s.h, gs.h, kTol);
}

TEST(measure, hphantomgate_is_width_only) {
    TextMetrics m;
    Gate g;
    g.label = "wide";
    auto gs = measure(g, builtin_style(StyleTarget::Gate), m);
    Size s = measure(Phantom{PhantomKind::BoxWidener, "wide"}, builtin_style(StyleTarget::Gate), m);
    EXPECT_NEAR(s.w, gs.w, kTol);
    EXPECT_EQ(s.h, 0.0);
}

TEST(measure, fixed_glyphs) {
    TextMetrics m;
    auto st = builtin_style(StyleTarget::Phase);
    EXPECT_NEAR(measure(PhaseDot{}, st, m).w, 4.4 * kPt, 1e-9);
    EXPECT_NEAR(measure(TargCircle{}, st, m).w, 10 * kPt, 1e-9);
    EXPECT_NEAR(measure(SwapCross{}, st, m).h, 9 * kPt, 1e-9);
    EXPECT_EQ(measure(WireStub{}, st, m), Size{});
}

TEST(place, columns_example) {
    GeometryConfig cfg;
    cfg.column_sep = 5;
    EXPECT_EQ(place_columns({10, 10}, cfg), (std::vector<double>{5, 20}));
    EXPECT_EQ(place_columns({10, 10}, cfg, {{0, Length::mm(2)}}), (std::vector<double>{5, 40}));
    EXPECT_EQ(place_columns({8}, cfg), (std::vector<double>{4}));
    EXPECT_TRUE(place_columns({}, cfg).empty());
}

TEST(place, rows_gap_mode) {
    GeometryConfig cfg;
    cfg.row_sep = 10;
    EXPECT_EQ(place_rows({20, 20}, cfg).row_y, (std::vector<double>{0, 30}));
    EXPECT_EQ(place_rows({20}, cfg).row_y, (std::vector<double>{0}));
}

TEST(place, rows_between_origins) {
    GeometryConfig cfg;
    cfg.row_sep = 60;
    cfg.between_origins = true;
    auto p = place_rows({40, 40, 40}, cfg);
    EXPECT_EQ(p.row_y, (std::vector<double>{0, 60, 120}));
    EXPECT_TRUE(p.pitch_too_small.empty());
}

TEST(place, between_origins_tall_rows_reported) {
    GeometryConfig cfg;
    cfg.row_sep = 60;
    cfg.between_origins = true;
    auto p = place_rows({100, 40}, cfg);
    EXPECT_EQ(p.row_y, (std::vector<double>{0, 70}));
    EXPECT_EQ(p.pitch_too_small, (std::vector<int>{0}));
}

TEST(baseline, examples) {
    EXPECT_DOUBLE_EQ(baseline({0, 60}, 1.5), 30.0);
    EXPECT_DOUBLE_EQ(baseline({7, 60}, 1.0), 7.0);
    EXPECT_DOUBLE_EQ(baseline({0, 100}, std::nullopt), 50.0);
    EXPECT_DOUBLE_EQ(baseline({0, 40, 100}, 2.5), 70.0);
}

TEST(baseline, out_of_range) {
    try {
        baseline({0, 60}, 3.0);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::OutOfRangeAlign);
    }
    EXPECT_THROW(baseline({0, 60}, 0.5), Error);
}

TEST(layout, corpus_between_origins_listing_has_equal_pitch) {
    auto r = lay(corpus("29_row_sep_between_origins.qtz"));
    ASSERT_EQ(r.row_y.size(), 4u);
    double pitch = r.row_y[1] - r.row_y[0];
    for (std::size_t i = 1; i + 1 < r.row_y.size(); ++i) EXPECT_NEAR(r.row_y[i + 1] - r.row_y[i], pitch, 1e-9);
    EXPECT_GE(pitch, 60.0 - 1e-9);
}

TEST(layout, ghost_inflates_row) {
    auto plain = lay("\\gate{A\\\\B} & \\qw \\\\ \\qw & \\qw");
    auto ghosted = lay("\\gate{A\\\\B} & \\qw \\\\ \\ghost{A\\\\B}\\qw & \\qw");
    auto bare = lay("\\gate{A} & \\qw \\\\ \\qw & \\qw");
    EXPECT_GT(ghosted.row_h[1], plain.row_h[1]);
    EXPECT_NEAR(ghosted.row_h[1], ghosted.row_h[0], kTol);
    EXPECT_NEAR(plain.row_h[1], bare.row_h[1], kTol);
    // A ghost never adds width.
    EXPECT_NEAR(ghosted.col_w[0], plain.col_w[0], kTol);
}

TEST(layout, auto_height_floor) {
    auto r = lay("\\qw & \\qw");
    EXPECT_NEAR(r.row_h[0], default_row_height(TextMetrics{}), kTol);
}

TEST(layout, disable_auto_height_lifts_floor) {
    auto r = lay("\\gate[2,disable auto height][1cm][0.2cm]{M} & \\qw \\\\ & \\qw");
    EXPECT_NEAR(r.row_h[0], 20.0, 1e-9);
    EXPECT_NEAR(r.row_h[1], 20.0, 1e-9);
}

TEST(layout, column_extra_space) {
    auto a = lay(corpus("25_local_spacing.qtz"));
    auto b = lay("\\gate{H} & \\gate{X} & \\gate{H} & \\qw \\\\ \\gate{X} & \\gate{Z} & \\gate{Z} & \\qw \\\\ "
                 "\\gate{X} & \\gate{Z} & \\gate{Z} & \\qw");
    // The listing's leading empty column shifts everything by the same offset.
    double shift = (a.col_x[2] - a.col_x[1]) - (b.col_x[1] - b.col_x[0]);
    EXPECT_NEAR(shift, 200.0, 1e-6);
    double rshift = (a.row_y[1] - a.row_y[0]) - (b.row_y[1] - b.row_y[0]);
    EXPECT_NEAR(rshift, 100.0, 1e-6);
}

TEST(layout, column_sep_from_env) {
    auto r = lay("\\begin{quantikz}[column sep=1cm] \\qw & \\qw \\end{quantikz}");
    double gap = (r.col_x[1] - r.col_w[1] / 2) - (r.col_x[0] + r.col_w[0] / 2);
    EXPECT_NEAR(gap, 100.0, 1e-9);
}

TEST(layout, align_equals_from_env) {
    auto r = lay(corpus("39_align_equals_at_lhs.qtz"));
    EXPECT_NEAR(r.baseline_y, (r.row_y[0] + r.row_y[1]) / 2, kTol);
    EXPECT_THROW(lay("\\begin{quantikz}[align equals at=4] \\qw \\end{quantikz}"), Error);
}

TEST(layout, slices_sit_between_columns) {
    auto c = compile(corpus("21_slice_all.qtz"));
    auto r = layout(c, StyleSheet{});
    ASSERT_EQ(r.slice_x.size(), c.slices.size());
    for (std::size_t i = 0; i < c.slices.size(); ++i) {
        int col = c.slices[i].after_col;
        EXPECT_GT(r.slice_x[i], r.col_x[col] + r.col_w[col] / 2 - kTol);
        if (col + 1 < static_cast<int>(r.col_x.size())) {
            EXPECT_LT(r.slice_x[i], r.col_x[col + 1] - r.col_w[col + 1] / 2 + kTol);
        }
    }
}

TEST(layout, group_rect_covers_cells) {
    auto c = compile(corpus("49_gategroup.qtz"));
    auto r = layout(c, StyleSheet{});
    ASSERT_EQ(r.group_rects.size(), c.groups.size());
    for (std::size_t i = 0; i < c.groups.size(); ++i) {
        const auto &g = c.groups[i];
        const auto &box = r.group_rects[i];
        for (int dr = 0; dr < g.group.wires; ++dr) {
            for (int dc = 0; dc < g.group.steps; ++dc) {
                EXPECT_LE(box.x, r.col_x[g.col + dc] - r.col_w[g.col + dc] / 2);
                EXPECT_GE(box.right(), r.col_x[g.col + dc] + r.col_w[g.col + dc] / 2);
                EXPECT_LE(box.y, r.row_y[g.row + dr] - r.row_h[g.row + dr] / 2);
                EXPECT_GE(box.bottom(), r.row_y[g.row + dr] + r.row_h[g.row + dr] / 2);
            }
        }
    }
}

TEST(layout, multiwire_gate_spans_rows) {
    auto r = lay("\\gate[3]{U} & \\qw \\\\ & \\qw \\\\ & \\qw");
    const auto &box = r.boxes.at({0, 0});
    EXPECT_LT(box.y, r.row_y[0]);
    EXPECT_GT(box.bottom(), r.row_y[2]);
}

TEST(layout, hphantomgate_widens_column) {
    auto r = lay(corpus("26_phantoms.qtz"));
    auto plain = lay("& \\gate{X} & \\gate{X} & \\qw & \\gate{X}");
    EXPECT_GT(r.col_w[1], plain.col_w[1]);
    EXPECT_GT(r.col_w[3], plain.col_w[3]);
}

TEST(layout, empty_grid) {
    auto r = lay("");
    EXPECT_TRUE(r.col_x.empty() || r.col_x.size() == 1);
}

TEST(layout, corpus_properties) {
    for (const auto &path : corpus_files()) {
        SCOPED_TRACE(path.filename().string());
        auto c = compile(read_file(path));
        auto r = layout(c, StyleSheet{});
        for (std::size_t i = 0; i + 1 < r.col_x.size(); ++i) {
            EXPECT_LT(r.col_x[i] + r.col_w[i] / 2, r.col_x[i + 1] - r.col_w[i + 1] / 2 + kTol);
        }
        for (std::size_t i = 0; i + 1 < r.row_y.size(); ++i) EXPECT_LT(r.row_y[i], r.row_y[i + 1]);
        auto again = layout(c, StyleSheet{});
        EXPECT_EQ(r.col_x, again.col_x);
        EXPECT_EQ(r.row_y, again.row_y);
        EXPECT_EQ(r.boxes, again.boxes);
    }
}

TEST(layout, random_widths_monotone) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> w(0.0, 300.0);
    std::uniform_real_distribution<double> sep(0.0, 80.0);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> widths(1 + trial % 9);
        for (auto &x : widths) x = w(rng);
        GeometryConfig cfg;
        cfg.column_sep = sep(rng);
        auto xs = place_columns(widths, cfg);
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
            EXPECT_NEAR(xs[i + 1] - xs[i], widths[i] / 2 + cfg.column_sep + widths[i + 1] / 2, 1e-9);
        }
        cfg.row_sep = sep(rng);
        cfg.between_origins = true;
        auto rows = place_rows(widths, cfg);
        for (std::size_t i = 0; i + 1 < rows.row_y.size(); ++i) {
            double step = rows.row_y[i + 1] - rows.row_y[i];
            EXPECT_GE(step + 1e-9, cfg.row_sep);
            EXPECT_GE(step + 1e-9, widths[i] / 2 + widths[i + 1] / 2);
        }
    }
}
