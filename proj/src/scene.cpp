#include <algorithm>
#include <array>
#include <cmath>

#include "qtkz/scene.hpp"

namespace qtkz {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

constexpr double kPi = 3.14159265358979323846;
constexpr int kLayerCount = 7;

double rad(double deg) { return deg * kPi / 180.0; }

class SceneBuilder {
   public:
    SceneBuilder(const ResolvedCircuit &c, const LayoutResult &l, const StyleSheet &s)
        : circuit_(c), grid_(c.grid), lay_(l), sheet_(s), flags_{c.grid.env.thin_lines, c.grid.env.transparent} {
        metrics_.font_size = l.font_size;
    }

    Scene run() {
        groups();
        wires();
        links();
        for (int r = 0; r < grid_.rows(); ++r) {
            for (int c = 0; c < grid_.cols(); ++c) {
                const auto &cell = grid_.at(r, c);
                element(cell.element, r, c);
                for (const auto &a : cell.attachments) {
                    if (const auto *e = std::get_if<Element>(&a)) attached(*e, r, c);
                }
            }
        }
        slices();

        Scene scene;
        for (auto &bucket : layers_) {
            for (auto &p : bucket) scene.primitives.push_back(std::move(p));
        }
        scene.baseline_y = lay_.baseline_y;
        return scene;
    }

   private:
    const ResolvedCircuit &circuit_;
    const CircuitGrid &grid_;
    const LayoutResult &lay_;
    const StyleSheet &sheet_;
    GlobalFlags flags_;
    TextMetrics metrics_;
    std::array<std::vector<Primitive>, kLayerCount> layers_;

    double u(const Length &len) const { return len.to_units(metrics_.font_size); }

    NodeStyle style(StyleTarget target, const std::string &raw = "") const {
        return resolve_style(target, sheet_, flags_, parse_style_keys(raw).style);
    }

    static DrawStyle stroke_only(const NodeStyle &s, double lw) {
        DrawStyle d;
        d.stroke = s.stroke.color;
        d.line_width = lw;
        d.dashed = s.dashed;
        return d;
    }

    DrawStyle draw(const NodeStyle &s) const {
        DrawStyle d = stroke_only(s, u(s.line_width));
        d.fill = s.fill.color;
        return d;
    }

    void add(Layer layer, std::string role, Shape shape, DrawStyle st) {
        layers_[static_cast<int>(layer)].push_back(Primitive{layer, std::move(role), std::move(shape), st});
    }

    void line(Layer layer, const std::string &role, Point a, Point b, const DrawStyle &st) {
        add(layer, role, LinePrim{a, b}, st);
    }

    void text(const std::string &role, const std::string &raw, Point pos, const NodeStyle &st,
              const std::string &anchor = "middle", double rotate = 0.0) {
        auto content = format_label(raw);
        if (content.empty()) return;
        TextMetrics m = metrics_;
        m.font_size = metrics_.font_size * st.font_scale;
        TextPrim t{pos, content, anchor, rotate + st.rotate_deg, m.font_size, m.width(content), m.height(content)};
        t.pos.x += u(st.xshift);
        t.pos.y -= u(st.yshift);
        DrawStyle d;
        d.fill = st.stroke.color ? st.stroke.color : Color{0, 0, 0};
        add(Layer::Labels, role, std::move(t), d);
    }

    double text_height(const std::string &raw, double scale = 1.0) const {
        TextMetrics m = metrics_;
        m.font_size *= scale;
        return m.height(format_label(raw));
    }

    double text_width(const std::string &raw, double scale = 1.0) const {
        TextMetrics m = metrics_;
        m.font_size *= scale;
        return m.width(format_label(raw));
    }

    // Box a wire or link should stop at for a cell, if any.
    std::optional<Box> stop_box(int r, int c) const {
        const auto &cell = grid_.at(r, c);
        int br = r, bc = c;
        if (cell.covered_by) {
            br = cell.covered_by->row;
            bc = cell.covered_by->col;
        }
        if (std::holds_alternative<Wave>(grid_.at(br, bc).element)) return std::nullopt;
        auto it = lay_.boxes.find({br, bc});
        if (it == lay_.boxes.end()) return std::nullopt;
        return it->second;
    }

    double top() const { return lay_.row_y.front() - lay_.row_h.front() / 2; }
    double bottom() const { return lay_.row_y.back() + lay_.row_h.back() / 2; }
    double left() const { return lay_.col_x.front() - lay_.col_w.front() / 2; }
    double right() const { return lay_.col_x.back() + lay_.col_w.back() / 2; }

    // ---- groups

    void groups() {
        for (std::size_t i = 0; i < circuit_.groups.size(); ++i) {
            const auto &g = circuit_.groups[i].group;
            const Box &box = lay_.group_rects[i];
            NodeStyle st = style(StyleTarget::Group, g.style);
            Layer layer = g.background ? Layer::BackgroundGroups : Layer::ForegroundGroups;
            double radius = st.rounded ? u(st.corner_radius) : 0.0;
            add(layer, "group", RectPrim{box, radius}, draw(st));

            NodeStyle ls = style(StyleTarget::GroupLabel, g.label_style);
            double h = text_height(g.label, ls.font_scale);
            double pad = u(ls.inner_ysep);
            if (ls.label_position == LabelPosition::Below) {
                text("group-label", g.label, Point{box.x, box.bottom() + pad + h / 2}, ls, "start");
            } else {
                text("group-label", g.label, Point{box.x, box.y - pad - h / 2}, ls, "start");
            }
        }
    }

    // ---- wires

    void wire_lines(Point a, Point b, const WireSpec &spec, const DrawStyle &st) {
        const double off = GlyphTable::cm(GlyphTable::kClassicalOffsetCm);
        switch (spec.kind) {
            case WireKind::None: return;
            case WireKind::Quantum: line(Layer::Wires, "wire", a, b, st); return;
            case WireKind::Classical:
                line(Layer::Wires, "double-line", Point{a.x, a.y - off}, Point{b.x, b.y - off}, st);
                line(Layer::Wires, "double-line", Point{a.x, a.y + off}, Point{b.x, b.y + off}, st);
                return;
            case WireKind::Bundle: break;
        }
        if (spec.alternate >= 2) {
            const double gap = GlyphTable::cm(GlyphTable::kAlternateSpacingCm);
            for (int k = 0; k < spec.alternate; ++k) {
                double dy = (k - (spec.alternate - 1) / 2.0) * gap;
                line(Layer::Wires, "alternate", Point{a.x, a.y + dy}, Point{b.x, b.y + dy}, st);
            }
            return;
        }
        line(Layer::Wires, "wire", a, b, st);
        const double sw = GlyphTable::cm(GlyphTable::kStrikeWidthCm);
        const double sh = GlyphTable::cm(GlyphTable::kStrikeHeightCm);
        double x = a.x + std::min((b.x - a.x) / 2, GlyphTable::cm(0.3));
        line(Layer::Wires, "strike", Point{x - sw / 2, a.y + sh / 2}, Point{x + sw / 2, a.y - sh / 2}, st);
        if (spec.count) {
            NodeStyle ls = style(StyleTarget::GateInput);
            double h = text_height(std::to_string(*spec.count), ls.font_scale);
            text("strike-label", std::to_string(*spec.count), Point{x + sw / 2, a.y - sh / 2 - h / 2}, ls,
                 "start");
        }
    }

    void wires() {
        NodeStyle ws = style(StyleTarget::Wire);
        DrawStyle st = stroke_only(ws, u(ws.line_width));
        for (int r = 0; r < grid_.rows(); ++r) {
            for (int g = 0; g + 1 < grid_.cols(); ++g) {
                const WireSpec &spec = circuit_.wire_segments[r][g];
                if (spec.kind == WireKind::None) continue;
                double y = lay_.row_y[r];
                double x0 = lay_.col_x[g];
                double x1 = lay_.col_x[g + 1];
                if (auto b = stop_box(r, g)) x0 = std::max(x0, b->right());
                if (auto b = stop_box(r, g + 1)) x1 = std::min(x1, b->x);
                if (x1 <= x0) continue;
                wire_lines(Point{x0, y}, Point{x1, y}, spec, st);
            }
        }
    }

    // ---- vertical links

    // Glyph-like elements sit on the link; boxes cut it off.
    bool link_passes_through(int r, int c) const {
        const auto &e = grid_.at(r, c).element;
        if (grid_.at(r, c).covered_by) return false;
        return std::holds_alternative<PhaseDot>(e) || std::holds_alternative<CtrlLine>(e) ||
               std::holds_alternative<TargCircle>(e) || std::holds_alternative<SwapCross>(e) ||
               std::holds_alternative<Stick>(e) || std::holds_alternative<Ebit>(e);
    }

    double link_end(int row, int col, double toward) const {
        double y = lay_.row_y[row];
        if (link_passes_through(row, col)) return y;
        auto b = stop_box(row, col);
        if (!b) return y;
        return toward > y ? b->bottom() : b->y;
    }

    void links() {
        NodeStyle ws = style(StyleTarget::Wire);
        const double off = GlyphTable::cm(GlyphTable::kClassicalOffsetCm);
        for (const auto &link : circuit_.links) {
            NodeStyle ls = apply(ws, parse_style_keys(link.style).style);
            DrawStyle st = stroke_only(ls, u(ls.line_width));
            double x = lay_.col_x[link.col] + u(ls.xshift);
            double y0 = link_end(link.from_row, link.col, lay_.row_y[link.to_row]);
            double y1 = link_end(link.to_row, link.col, lay_.row_y[link.from_row]);
            if (link.kind != LinkKind::Quantum) {
                std::string role = link.kind == LinkKind::Bend ? "bend" : "double-line";
                line(Layer::Links, role, Point{x - off, y0}, Point{x - off, y1}, st);
                line(Layer::Links, role, Point{x + off, y0}, Point{x + off, y1}, st);
                continue;
            }
            if (!link.bundle) {
                line(Layer::Links, "link", Point{x, y0}, Point{x, y1}, st);
                continue;
            }
            // Control bundle: one line out of the dot, then a fan of wires.
            int n = link.bundle_wires.value_or(3);
            double mid = (y0 + y1) / 2;
            double gap = GlyphTable::cm(GlyphTable::kAlternateSpacingCm);
            line(Layer::Links, "link", Point{x, y0}, Point{x, mid}, st);
            for (int k = 0; k < n; ++k) {
                double dx = (k - (n - 1) / 2.0) * gap;
                add(Layer::Links, "split", PolylinePrim{{Point{x, mid}, Point{x + dx, mid + (y1 - mid) * 0.25},
                                                         Point{x + dx, y1}}},
                    st);
            }
        }
    }

    // ---- glyphs

    void dot(Point c, bool open, const std::string &raw) {
        NodeStyle st = style(open ? StyleTarget::OpenPhase : StyleTarget::Phase, raw);
        DrawStyle d = draw(st);
        if (!open && !d.fill) d.fill = st.stroke.color;
        c.x += u(st.xshift);
        c.y -= u(st.yshift);
        add(Layer::Glyphs, open ? "open-dot" : "dot", CirclePrim{c, GlyphTable::pt(GlyphTable::kDotRadiusPt)}, d);
    }

    void cross(Point c, const NodeStyle &st) {
        double h = GlyphTable::pt(GlyphTable::kCrossHalfPt);
        DrawStyle d = stroke_only(st, u(st.line_width));
        line(Layer::Glyphs, "cross", Point{c.x - h, c.y - h}, Point{c.x + h, c.y + h}, d);
        line(Layer::Glyphs, "cross", Point{c.x - h, c.y + h}, Point{c.x + h, c.y - h}, d);
    }

    // Curly brace between y0 and y1 at x; the tip points left when
    // `tip_left`, right otherwise.
    PathPrim brace(double x, double y0, double y1, bool tip_left) const {
        double w = GlyphTable::pt(GlyphTable::kBraceWidthPt);
        double s = tip_left ? -1.0 : 1.0;
        double mid = (y0 + y1) / 2;
        double q = w / 2;
        PathPrim p;
        p.segments.push_back({'M', {Point{x, y0}}});
        p.segments.push_back({'C', {Point{x + s * q, y0}, Point{x + s * q, y0}, Point{x + s * q, y0 + q}}});
        p.segments.push_back({'L', {Point{x + s * q, mid - q}}});
        p.segments.push_back({'C', {Point{x + s * q, mid}, Point{x + s * w, mid}, Point{x + s * w, mid}}});
        p.segments.push_back({'C', {Point{x + s * w, mid}, Point{x + s * q, mid}, Point{x + s * q, mid + q}}});
        p.segments.push_back({'L', {Point{x + s * q, y1 - q}}});
        p.segments.push_back({'C', {Point{x + s * q, y1}, Point{x + s * q, y1}, Point{x, y1}}});
        return p;
    }

    void gate(const Gate &g, int r, int c) {
        const Box &box = lay_.boxes.at({r, c});
        NodeStyle st = style(StyleTarget::Gate, g.style);
        double radius = st.rounded ? u(st.corner_radius) : 0.0;
        add(Layer::Glyphs, "gate", RectPrim{box, radius}, draw(st));
        if (g.swap_variant && r + 1 < grid_.rows()) {
            DrawStyle d = stroke_only(st, u(st.line_width));
            double ya = lay_.row_y[r], yb = lay_.row_y[r + 1];
            line(Layer::Glyphs, "swap-wire", Point{box.x, ya}, Point{box.right(), yb}, d);
            line(Layer::Glyphs, "swap-wire", Point{box.x, yb}, Point{box.right(), ya}, d);
        }
        NodeStyle ls = style(StyleTarget::GateLabel, g.label_style);
        text("gate-label", g.label, Point{box.cx(), box.cy()}, ls);

        auto port_y = [&](const PortLabel &p) {
            return (lay_.row_y[r + p.first_wire] + lay_.row_y[r + p.first_wire + p.wires - 1]) / 2;
        };
        for (const auto &p : g.inputs) {
            NodeStyle ps = style(StyleTarget::GateInput, p.label_style);
            text("gate-input", p.label, Point{box.x + u(ps.inner_xsep), port_y(p)}, ps, "start");
        }
        for (const auto &p : g.outputs) {
            NodeStyle ps = style(StyleTarget::GateOutput, p.label_style);
            text("gate-output", p.label, Point{box.right() - u(ps.inner_xsep), port_y(p)}, ps, "end");
        }
    }

    void meter(const Meter &m, int r, int c) {
        const Box &b = lay_.boxes.at({r, c});
        NodeStyle st = style(StyleTarget::Meter, m.style);
        DrawStyle d = draw(st);
        NodeStyle ls = style(StyleTarget::MeterLabel);
        switch (m.variant) {
            case MeterVariant::Box: {
                add(Layer::Glyphs, "meter", RectPrim{b, st.rounded ? u(st.corner_radius) : 0.0}, d);
                DrawStyle ink = stroke_only(st, u(st.line_width));
                Point centre{b.cx(), b.bottom() - 0.2 * b.h};
                double radius = 0.35 * b.w;
                double half = GlyphTable::kMeterArcSweepDeg / 2;
                add(Layer::Glyphs, "meter-arc", ArcPrim{centre, radius, 90 - half, 90 + half}, ink);
                double a = rad(GlyphTable::kMeterNeedleDeg);
                Point tip{centre.x + 1.1 * radius * std::cos(a), centre.y - 1.1 * radius * std::sin(a)};
                line(Layer::Glyphs, "meter-needle", centre, tip, ink);
                if (!m.basis_label.empty()) {
                    double h = text_height(m.basis_label, ls.font_scale);
                    text("meter-label", m.basis_label, Point{b.right(), b.y - h / 2}, ls, "start");
                }
                return;
            }
            case MeterVariant::D: {
                double depth = std::min(GlyphTable::kMeterDDepth * b.h, b.w);
                double flat = b.right() - depth;
                double k = 4.0 / 3.0 * depth;
                PathPrim p;
                p.segments.push_back({'M', {Point{b.x, b.y}}});
                p.segments.push_back({'L', {Point{flat, b.y}}});
                p.segments.push_back(
                    {'C', {Point{flat + k, b.y}, Point{flat + k, b.bottom()}, Point{flat, b.bottom()}}});
                p.segments.push_back({'L', {Point{b.x, b.bottom()}}});
                p.segments.push_back({'Z', {}});
                add(Layer::Glyphs, "meter-d", std::move(p), d);
                text("meter-label", m.basis_label, Point{b.x + (b.w - 0.3 * b.h) / 2, b.cy()},
                     style(StyleTarget::GateLabel));
                return;
            }
            case MeterVariant::Tab: {
                double tip = 0.3 * b.h;
                PolylinePrim p{{Point{b.x, b.y}, Point{b.right() - tip, b.y}, Point{b.right(), b.cy()},
                                Point{b.right() - tip, b.bottom()}, Point{b.x, b.bottom()}},
                               true};
                add(Layer::Glyphs, "meter-tab", std::move(p), d);
                text("meter-label", m.basis_label, Point{b.x + (b.w - tip) / 2, b.cy()},
                     style(StyleTarget::GateLabel));
                return;
            }
            case MeterVariant::Rounded:
                add(Layer::Glyphs, "measure", RectPrim{b, b.h / 2}, d);
                text("meter-label", m.basis_label, Point{b.cx(), b.cy()}, style(StyleTarget::GateLabel));
                return;
        }
    }

    void stick(const Stick &s, int r, int c) {
        const Box &b = lay_.boxes.at({r, c});
        NodeStyle ls = style(StyleTarget::StickLabel, s.label_style);
        double xsep = u(ls.inner_xsep);
        double bw = GlyphTable::pt(GlyphTable::kBraceWidthPt);
        int last = r + s.wires - 1;
        double y0 = lay_.row_y[r] - lay_.row_h[r] / 4;
        double y1 = lay_.row_y[last] + lay_.row_h[last] / 4;
        double cy = (lay_.row_y[r] + lay_.row_y[last]) / 2;

        auto brace_at = [&](double x, bool tip_left, StyleTarget target) {
            NodeStyle bs = style(target, s.brace_style);
            add(Layer::Glyphs, "brace", brace(x, y0, y1, tip_left), stroke_only(bs, u(bs.line_width)));
        };

        switch (s.side) {
            case StickSide::Left: {
                double x = b.right();
                if (s.wires > 1) {
                    brace_at(x - xsep / 2, true, StyleTarget::LeftBrace);
                    x -= bw + xsep;
                }
                text("stick-label", s.label, Point{x - xsep / 2, cy}, ls, "end");
                return;
            }
            case StickSide::Right: {
                double x = b.x;
                if (s.wires > 1) {
                    brace_at(x + xsep / 2, false, StyleTarget::RightBrace);
                    x += bw + xsep;
                }
                text("stick-label", s.label, Point{x + xsep / 2, cy}, ls, "start");
                return;
            }
            case StickSide::Mid: {
                double x0 = b.x, x1 = b.right();
                if (s.brackets == Brackets::Left || s.brackets == Brackets::Both) {
                    brace_at(x0 + xsep / 2, false, StyleTarget::RightBrace);
                    x0 += bw + xsep;
                }
                if (s.brackets == Brackets::Right || s.brackets == Brackets::Both) {
                    brace_at(x1 - xsep / 2, true, StyleTarget::LeftBrace);
                    x1 -= bw + xsep;
                }
                text("stick-label", s.label, Point{(x0 + x1) / 2, cy}, ls);
                return;
            }
        }
    }

    void arrow(Point a, Point b, const DrawStyle &st, const std::string &role) {
        double len = std::hypot(b.x - a.x, b.y - a.y);
        if (len <= 0) return;
        double head = GlyphTable::pt(GlyphTable::kArrowHeadPt);
        double ux = (b.x - a.x) / len, uy = (b.y - a.y) / len;
        Point base{b.x - ux * head, b.y - uy * head};
        line(Layer::Glyphs, role, a, base, st);
        DrawStyle fill = st;
        fill.fill = st.stroke;
        add(Layer::Glyphs, role + "-head",
            PolylinePrim{{b, Point{base.x - uy * head / 2, base.y + ux * head / 2},
                          Point{base.x + uy * head / 2, base.y - ux * head / 2}},
                         true},
            fill);
    }

    void arrow_mark(const ArrowMark &a, int r, int c) {
        int dr = 0, dc = 0;
        for (char ch : a.dirs) {
            if (ch == 'r') ++dc;
            if (ch == 'l') --dc;
            if (ch == 'd') ++dr;
            if (ch == 'u') --dr;
        }
        int tr = r + dr, tc = c + dc;
        if ((dr == 0 && dc == 0) || tr < 0 || tc < 0 || tr >= grid_.rows() || tc >= grid_.cols()) return;
        Point from{lay_.col_x[c], lay_.row_y[r]};
        Point to{lay_.col_x[tc], lay_.row_y[tr]};
        if (auto b = stop_box(r, c)) {
            if (dc > 0) from.x = b->right();
            if (dc < 0) from.x = b->x;
            if (dc == 0) from.y = dr > 0 ? b->bottom() : b->y;
        }
        if (auto b = stop_box(tr, tc)) {
            if (dc > 0) to.x = b->x;
            if (dc < 0) to.x = b->right();
            if (dc == 0) to.y = dr > 0 ? b->y : b->bottom();
        }
        NodeStyle st = style(StyleTarget::Arrow, a.style);
        arrow(from, to, stroke_only(st, u(st.line_width)), "arrow");
    }

    void wave(const Wave &w, int r) {
        NodeStyle st = style(StyleTarget::Wave, w.style);
        double x0 = left(), x1 = right();
        double y = lay_.row_y[r];
        double amp = lay_.row_h[r] * 0.15;
        double half = GlyphTable::pt(5);
        int n = std::max(1, static_cast<int>(std::round((x1 - x0) / half)));
        double step = (x1 - x0) / n;
        PathPrim p;
        p.segments.push_back({'M', {Point{x0, y}}});
        for (int k = 0; k < n; ++k) {
            double a = x0 + k * step;
            double s = (k % 2 == 0) ? -1.0 : 1.0;
            p.segments.push_back({'C', {Point{a + step / 3, y + s * amp * 4 / 3}, Point{a + 2 * step / 3, y + s * amp * 4 / 3},
                                        Point{a + step, y}}});
        }
        add(Layer::Glyphs, "wave", std::move(p), stroke_only(st, u(st.line_width)));
    }

    void ebit(const Ebit &e, int r, int c) {
        NodeStyle st = style(StyleTarget::Ebit);
        DrawStyle d = stroke_only(st, u(st.line_width));
        double ya = lay_.row_y[r];
        double yb = r + 1 < grid_.rows() ? lay_.row_y[r + 1] : ya + default_row_height(metrics_);
        double mid = (ya + yb) / 2;
        double dx = (yb - ya) / 2 * std::tan(rad(std::fabs(e.angle_deg)));
        Point apex{lay_.col_x[c] - dx, mid};
        line(Layer::Glyphs, "ebit", apex, Point{lay_.col_x[c], ya}, d);
        line(Layer::Glyphs, "ebit", apex, Point{lay_.col_x[c], yb}, d);
        NodeStyle ls = style(StyleTarget::EbitLabel, e.label_style);
        text("ebit-label", e.label, Point{apex.x - u(ls.inner_xsep), apex.y}, ls, "end");
    }

    void element(const Element &e, int r, int c) {
        Point centre{lay_.col_x[c], lay_.row_y[r]};
        if (auto it = lay_.boxes.find({r, c}); it != lay_.boxes.end()) centre = {it->second.cx(), it->second.cy()};
        std::visit(Overloaded{
                       [&](const Gate &g) { gate(g, r, c); },
                       [&](const Meter &m) { meter(m, r, c); },
                       [&](const Stick &s) { stick(s, r, c); },
                       [&](const PhaseDot &p) {
                           dot(centre, p.open, p.style);
                           if (!p.label.empty()) {
                               NodeStyle ls = style(StyleTarget::PhaseLabel);
                               double h = text_height(p.label, ls.font_scale);
                               double rr = GlyphTable::pt(GlyphTable::kDotRadiusPt);
                               text("phase-label", p.label, Point{centre.x + rr, centre.y - rr - h / 2}, ls,
                                    "start");
                           }
                       },
                       [&](const CtrlLine &ctl) { dot(centre, ctl.open, ctl.style); },
                       [&](const TargCircle &t) {
                           NodeStyle st = style(StyleTarget::Targ, t.style);
                           double rr = GlyphTable::pt(GlyphTable::kTargRadiusPt);
                           add(Layer::Glyphs, "targ", CirclePrim{centre, rr}, draw(st));
                           DrawStyle ink = stroke_only(st, u(st.line_width));
                           line(Layer::Glyphs, "targ", Point{centre.x - rr, centre.y}, Point{centre.x + rr, centre.y},
                                ink);
                           line(Layer::Glyphs, "targ", Point{centre.x, centre.y - rr}, Point{centre.x, centre.y + rr},
                                ink);
                       },
                       [&](const SwapCross &s) { cross(centre, style(StyleTarget::Swap, s.style)); },
                       [&](const Trash &t) {
                           NodeStyle st = style(StyleTarget::Trash, t.style);
                           double y = lay_.row_y[r];
                           double len = GlyphTable::pt(GlyphTable::kTrashArrowPt);
                           double x = lay_.col_x[c];
                           arrow(Point{x, y}, Point{x, y + len}, stroke_only(st, u(st.line_width)), "trash");
                           double h = text_height(t.label);
                           text("trash-label", t.label, Point{x, y + len + h / 2}, st);
                       },
                       [&](const Push &p) { text("push", p.content, centre, style(StyleTarget::Push)); },
                       [&](const Wave &w) { wave(w, r); },
                       [&](const Ebit &eb) { ebit(eb, r, c); },
                       [&](const ArrowMark &a) { arrow_mark(a, r, c); },
                       [](const auto &) {},
                   },
                   e);
    }

    void attached(const Element &e, int r, int c) {
        if (const auto *a = std::get_if<ArrowMark>(&e)) arrow_mark(*a, r, c);
    }

    // ---- slices

    void slices() {
        if (lay_.row_y.empty()) return;
        for (std::size_t i = 0; i < circuit_.slices.size(); ++i) {
            const auto &s = circuit_.slices[i];
            NodeStyle st = style(StyleTarget::Slice, s.style);
            double x = lay_.slice_x[i];
            double y0 = top() + u(st.shorten_start);
            double y1 = bottom() - u(st.shorten_end);
            line(Layer::Slices, "slice", Point{x, y0}, Point{x, y1}, stroke_only(st, u(st.line_width)));

            NodeStyle ls = style(StyleTarget::SliceLabel, s.label_style);
            double pad = u(ls.inner_ysep);
            if (grid_.env.vertical_slice_labels) {
                double w = text_width(s.title, ls.font_scale);
                text("slice-label", s.title, Point{x, y0 - pad - w / 2}, ls, "middle", 90.0);
            } else {
                double h = text_height(s.title, ls.font_scale);
                text("slice-label", s.title, Point{x, y0 - pad - h / 2}, ls);
            }
        }
    }
};

}  // namespace

std::string_view layer_name(Layer layer) {
    switch (layer) {
        case Layer::BackgroundGroups: return "background-groups";
        case Layer::Wires: return "wires";
        case Layer::Links: return "links";
        case Layer::Glyphs: return "glyphs";
        case Layer::Slices: return "slices";
        case Layer::ForegroundGroups: return "foreground-groups";
        case Layer::Labels: return "labels";
    }
    return "";
}

std::string_view shape_kind(const Shape &shape) {
    return std::visit(Overloaded{
                          [](const LinePrim &) { return "line"; },
                          [](const PolylinePrim &) { return "polyline"; },
                          [](const RectPrim &) { return "rect"; },
                          [](const CirclePrim &) { return "circle"; },
                          [](const ArcPrim &) { return "arc"; },
                          [](const PathPrim &) { return "path"; },
                          [](const TextPrim &) { return "text"; },
                      },
                      shape);
}

Scene build_scene(const ResolvedCircuit &circuit, const LayoutResult &layout, const StyleSheet &sheet) {
    return SceneBuilder(circuit, layout, sheet).run();
}

}  // namespace qtkz
