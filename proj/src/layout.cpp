#include "qtkz/layout.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "qtkz/error.hpp"

namespace qtkz {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

double units(const Length &len, const TextMetrics &m) { return len.to_units(m.font_size); }

double gate_width_for(const std::string &label, const NodeStyle &style, const TextMetrics &m) {
    return std::max(0.0, m.width(format_label(label)) + 2 * units(style.inner_xsep, m));
}

double gate_height_for(const std::string &label, const NodeStyle &style, const TextMetrics &m) {
    return std::max(0.0, m.height(format_label(label)) + 2 * units(style.inner_ysep, m));
}

GlobalFlags flags_of(const EnvOptions &env) { return GlobalFlags{env.thin_lines, env.transparent}; }

}  // namespace

GeometryConfig GeometryConfig::from_env(const EnvOptions &env) {
    GeometryConfig g;
    if (env.column_sep) g.column_sep = env.column_sep->to_units(g.metrics.font_size);
    if (env.row_sep) g.row_sep = env.row_sep->to_units(g.metrics.font_size);
    g.between_origins = env.between_origins;
    return g;
}

double default_row_height(const TextMetrics &metrics) {
    return gate_height_for("U", builtin_style(StyleTarget::Gate), metrics);
}

Size measure(const Element &element, const NodeStyle &style, const TextMetrics &m) {
    const double xsep = units(style.inner_xsep, m);
    const double unit_h = default_row_height(m);
    return std::visit(
        Overloaded{
            [&](const Gate &g) {
                Size s;
                s.w = gate_width_for(g.label, style, m);
                if (g.min_width) s.w = std::max(s.w, units(*g.min_width, m));
                if (g.swap_variant) s.w = std::max(s.w, unit_h);
                if (g.disable_auto_height) {
                    s.h = g.min_height ? units(*g.min_height, m) : unit_h;
                } else {
                    s.h = gate_height_for(g.label, style, m);
                    if (g.min_height) s.h = std::max(s.h, units(*g.min_height, m));
                }
                return s;
            },
            [&](const Meter &meter) {
                double h = gate_height_for("U", style, m);
                double label_w = m.width(format_label(meter.basis_label)) + 2 * xsep;
                switch (meter.variant) {
                    case MeterVariant::Box: return Size{GlyphTable::kMeterAspect * h, h};
                    case MeterVariant::D: return Size{std::max(0.9 * h, label_w + 0.3 * h), h};
                    case MeterVariant::Tab: return Size{std::max(h, label_w + 0.3 * h), h};
                    case MeterVariant::Rounded: return Size{std::max(h, label_w), h};
                }
                return Size{h, h};
            },
            [&](const PhaseDot &) {
                double d = 2 * GlyphTable::pt(GlyphTable::kDotRadiusPt);
                return Size{d, d};
            },
            [&](const CtrlLine &) {
                double d = 2 * GlyphTable::pt(GlyphTable::kDotRadiusPt);
                return Size{d, d};
            },
            [&](const TargCircle &) {
                double d = 2 * GlyphTable::pt(GlyphTable::kTargRadiusPt);
                return Size{d, d};
            },
            [&](const SwapCross &) {
                double d = 2 * GlyphTable::pt(GlyphTable::kCrossHalfPt);
                return Size{d, d};
            },
            [&](const Trash &t) {
                auto label = format_label(t.label);
                return Size{std::max(m.width(label), GlyphTable::pt(10)) + 2 * xsep,
                            m.height(label) + GlyphTable::pt(GlyphTable::kTrashArrowPt)};
            },
            [&](const Push &p) {
                auto label = format_label(p.content);
                return Size{m.width(label) + 2 * xsep, m.height(label)};
            },
            [&](const Phantom &p) {
                switch (p.kind) {
                    case PhantomKind::BoxWidener: return Size{gate_width_for(p.content, style, m), 0.0};
                    case PhantomKind::WireLengthener: return Size{m.width(format_label(p.content)), 0.0};
                    case PhantomKind::Ghost: return Size{0.0, gate_height_for(p.content, style, m)};
                }
                return Size{};
            },
            [&](const Stick &s) {
                double w = m.width(format_label(s.label)) + xsep;
                bool braced = s.side == StickSide::Mid ? s.brackets != Brackets::None : s.wires > 1;
                if (braced) w += GlyphTable::pt(GlyphTable::kBraceWidthPt) + xsep;
                if (s.side == StickSide::Mid && (s.brackets == Brackets::Both)) {
                    w += GlyphTable::pt(GlyphTable::kBraceWidthPt) + xsep;
                }
                return Size{w, 0.0};
            },
            [&](const auto &) { return Size{}; },
        },
        element);
}

std::vector<double> place_columns(const std::vector<double> &widths, const GeometryConfig &config,
                                  const std::map<int, Length> &extra) {
    std::vector<double> x;
    if (widths.empty()) return x;
    x.push_back(widths[0] / 2);
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        double gap = config.column_sep;
        if (auto it = extra.find(static_cast<int>(i)); it != extra.end()) {
            gap += it->second.to_units(config.metrics.font_size);
        }
        x.push_back(x.back() + widths[i] / 2 + gap + widths[i + 1] / 2);
    }
    return x;
}

RowPlacement place_rows(const std::vector<double> &heights, const GeometryConfig &config,
                        const std::map<int, Length> &extra) {
    RowPlacement out;
    if (heights.empty()) return out;
    out.row_y.push_back(0.0);
    for (std::size_t i = 0; i + 1 < heights.size(); ++i) {
        double add = 0.0;
        if (auto it = extra.find(static_cast<int>(i)); it != extra.end()) {
            add = it->second.to_units(config.metrics.font_size);
        }
        double half_sum = heights[i] / 2 + heights[i + 1] / 2;
        double step;
        if (config.between_origins) {
            if (config.row_sep < half_sum) out.pitch_too_small.push_back(static_cast<int>(i));
            step = std::max(config.row_sep, half_sum) + add;
        } else {
            step = half_sum + config.row_sep + add;
        }
        out.row_y.push_back(out.row_y.back() + step);
    }
    return out;
}

double baseline(const std::vector<double> &row_y, std::optional<double> align_equals_at) {
    if (row_y.empty()) return 0.0;
    if (!align_equals_at) return (row_y.front() + row_y.back()) / 2;
    double k = *align_equals_at;
    if (!(k >= 1.0 && k <= static_cast<double>(row_y.size()))) {
        throw Error(ErrorCode::OutOfRangeAlign,
                    fmt::format("align equals at={} is outside 1..{}", k, row_y.size()));
    }
    auto lo = static_cast<std::size_t>(std::floor(k));
    double frac = k - static_cast<double>(lo);
    if (frac == 0.0) return row_y[lo - 1];
    return row_y[lo - 1] + frac * (row_y[lo] - row_y[lo - 1]);
}

NodeStyle element_style(const Element &element, const StyleSheet &sheet, const EnvOptions &env) {
    auto flags = flags_of(env);
    auto with = [&](StyleTarget t, const std::string &raw) {
        return resolve_style(t, sheet, flags, parse_style_keys(raw).style);
    };
    return std::visit(Overloaded{
                          [&](const Gate &g) { return with(StyleTarget::Gate, g.style); },
                          [&](const Meter &m) { return with(StyleTarget::Meter, m.style); },
                          [&](const PhaseDot &d) {
                              return with(d.open ? StyleTarget::OpenPhase : StyleTarget::Phase, d.style);
                          },
                          [&](const CtrlLine &c) {
                              return with(c.open ? StyleTarget::OpenPhase : StyleTarget::Phase, c.style);
                          },
                          [&](const TargCircle &t) { return with(StyleTarget::Targ, t.style); },
                          [&](const SwapCross &s) { return with(StyleTarget::Swap, s.style); },
                          [&](const Trash &t) { return with(StyleTarget::Trash, t.style); },
                          [&](const Push &) { return with(StyleTarget::Push, ""); },
                          [&](const Wave &w) { return with(StyleTarget::Wave, w.style); },
                          [&](const Ebit &) { return with(StyleTarget::Ebit, ""); },
                          [&](const Stick &s) { return with(StyleTarget::StickLabel, s.label_style); },
                          [&](const ArrowMark &a) { return with(StyleTarget::Arrow, a.style); },
                          [&](const Phantom &) { return with(StyleTarget::Gate, ""); },
                          [&](const auto &) { return with(StyleTarget::Wire, ""); },
                      },
                      element);
}

LayoutResult layout(const ResolvedCircuit &circuit, const StyleSheet &sheet) {
    return layout(circuit, sheet, GeometryConfig::from_env(circuit.grid.env));
}

LayoutResult layout(const ResolvedCircuit &circuit, const StyleSheet &sheet, const GeometryConfig &config) {
    const auto &grid = circuit.grid;
    const auto &m = config.metrics;
    const int rows = grid.rows();
    const int cols = grid.cols();
    const double unit_h = default_row_height(m);

    LayoutResult out;
    out.font_size = m.font_size;
    out.col_w.assign(cols, 0.0);
    out.row_h.assign(rows, 0.0);

    // Row floors: every row gets the "U" height unless the only gates
    // touching it asked for no automatic height.
    std::vector<int> gates_touching(rows, 0), gates_without_auto(rows, 0);
    std::vector<std::vector<Size>> sizes(rows, std::vector<Size>(cols));
    std::vector<std::vector<NodeStyle>> styles(rows, std::vector<NodeStyle>(cols));

    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const auto &cell = grid.at(r, c);
            styles[r][c] = element_style(cell.element, sheet, grid.env);
            Size s = measure(cell.element, styles[r][c], m);
            double cell_w = s.w;
            const auto *gate = std::get_if<Gate>(&cell.element);
            for (const auto &a : cell.attachments) {
                const auto *e = std::get_if<Element>(&a);
                const auto *p = e ? std::get_if<Phantom>(e) : nullptr;
                if (!p) continue;
                Size ps = measure(*e, element_style(*e, sheet, grid.env), m);
                if (p->kind == PhantomKind::BoxWidener && gate) s.w = std::max(s.w, ps.w);
                cell_w = std::max({cell_w, s.w, ps.w});
                out.row_h[r] = std::max(out.row_h[r], ps.h);
            }
            sizes[r][c] = s;
            if (!cell.covered_by) out.col_w[c] = std::max(out.col_w[c], cell_w);
            if (gate) {
                for (int k = 0; k < gate->wires; ++k) {
                    ++gates_touching[r + k];
                    if (gate->disable_auto_height) ++gates_without_auto[r + k];
                    out.row_h[r + k] = std::max(out.row_h[r + k], s.h);
                }
            } else if (!std::holds_alternative<Stick>(cell.element)) {
                out.row_h[r] = std::max(out.row_h[r], s.h);
            }
        }
    }
    for (int r = 0; r < rows; ++r) {
        bool only_manual = gates_touching[r] > 0 && gates_touching[r] == gates_without_auto[r];
        if (!only_manual) out.row_h[r] = std::max(out.row_h[r], unit_h);
    }

    out.col_x = place_columns(out.col_w, config, grid.col_extra_space);
    auto rows_placed = place_rows(out.row_h, config, grid.row_extra_space);
    out.row_y = rows_placed.row_y;
    for (int gap : rows_placed.pitch_too_small) {
        out.warnings.push_back(Lint{"RowPitchTooSmall",
                                    fmt::format("row pitch between rows {} and {} is smaller than their contents",
                                                gap + 1, gap + 2),
                                    gap, -1, LintSeverity::Warning});
    }

    // Element boxes.
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const auto &cell = grid.at(r, c);
            const Size s = sizes[r][c];
            const NodeStyle &st = styles[r][c];
            const double dx = units(st.xshift, m);
            const double dy = -units(st.yshift, m);  // tikz y points up
            Box box;
            bool has_box = true;
            std::visit(Overloaded{
                           [&](const Gate &g) {
                               int last = r + g.wires - 1;
                               double top = out.row_y[r] - s.h / 2;
                               double bottom = out.row_y[last] + s.h / 2;
                               if (g.wires > 1 && g.disable_auto_height) {
                                   top = out.row_y[r] - out.row_h[r] / 2;
                                   bottom = out.row_y[last] + out.row_h[last] / 2;
                               }
                               box = Box{out.col_x[c] - s.w / 2, top, s.w, bottom - top};
                           },
                           [&](const Stick &st_el) {
                               int last = r + st_el.wires - 1;
                               double text_h = m.height(format_label(st_el.label));
                               double top = std::min(out.row_y[r] - text_h / 2, out.row_y[r] - unit_h / 2);
                               double bottom = std::max(out.row_y[last] + text_h / 2, out.row_y[last] + unit_h / 2);
                               if (st_el.wires == 1) {
                                   top = out.row_y[r] - text_h / 2;
                                   bottom = out.row_y[r] + text_h / 2;
                               }
                               double x = out.col_x[c] - s.w / 2;
                               if (st_el.side == StickSide::Left) x = out.col_x[c] + out.col_w[c] / 2 - s.w;
                               if (st_el.side == StickSide::Right) x = out.col_x[c] - out.col_w[c] / 2;
                               box = Box{x, top, s.w, bottom - top};
                           },
                           [&](const Empty &) { has_box = false; },
                           [&](const WireStub &) { has_box = false; },
                           [&](const VerticalWire &) { has_box = false; },
                           [&](const ClassicalBend &) { has_box = false; },
                           [&](const ArrowMark &) { has_box = false; },
                           [&](const Phantom &) { has_box = false; },
                           [&](const Wave &) {
                               box = Box{out.col_x.front() - out.col_w.front() / 2, out.row_y[r] - out.row_h[r] / 2,
                                         out.col_x.back() + out.col_w.back() / 2 -
                                             (out.col_x.front() - out.col_w.front() / 2),
                                         out.row_h[r]};
                           },
                           [&](const Ebit &) {
                               box = Box{out.col_x[c], out.row_y[r], 0.0, 0.0};
                           },
                           [&](const auto &) {
                               box = Box{out.col_x[c] - s.w / 2, out.row_y[r] - s.h / 2, s.w, s.h};
                           },
                       },
                       cell.element);
            if (!has_box) continue;
            box.x += dx;
            box.y += dy;
            out.boxes[{r, c}] = box;
        }
    }

    // Slices sit in the middle of the gap after their column.
    for (const auto &slice : circuit.slices) {
        int c = slice.after_col;
        double left = out.col_x[c] + out.col_w[c] / 2;
        double right = c + 1 < cols ? out.col_x[c + 1] - out.col_w[c + 1] / 2 : left + config.column_sep;
        out.slice_x.push_back((left + right) / 2);
    }

    for (const auto &pg : circuit.groups) {
        const auto style = resolve_style(StyleTarget::Group, sheet, flags_of(grid.env),
                                         parse_style_keys(pg.group.style).style);
        int c1 = pg.col + pg.group.steps - 1;
        int r1 = pg.row + pg.group.wires - 1;
        double x0 = out.col_x[pg.col] - out.col_w[pg.col] / 2 - units(style.inner_xsep, m);
        double x1 = out.col_x[c1] + out.col_w[c1] / 2 + units(style.inner_xsep, m);
        double y0 = out.row_y[pg.row] - out.row_h[pg.row] / 2 - units(style.inner_ysep, m);
        double y1 = out.row_y[r1] + out.row_h[r1] / 2 + units(style.inner_ysep, m);
        out.group_rects.push_back(Box{x0, y0, x1 - x0, y1 - y0});
    }

    out.baseline_y = baseline(out.row_y, grid.env.align_equals_at);
    return out;
}

}  // namespace qtkz
