#include <algorithm>

#include <fmt/format.h>
#include <json.hpp>

#include "qtkz/error.hpp"
#include "qtkz/model.hpp"

namespace qtkz {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

// Glyph drawn where a link lands on an existing element.
Endpoint landing_glyph(const Element &e) {
    return std::visit(Overloaded{
                          [](const TargCircle &) { return Endpoint::Targ; },
                          [](const PhaseDot &d) { return d.open ? Endpoint::OpenDot : Endpoint::Dot; },
                          [](const CtrlLine &c) { return c.open ? Endpoint::OpenDot : Endpoint::Dot; },
                          [](const SwapCross &) { return Endpoint::Cross; },
                          [](const auto &) { return Endpoint::None; },
                      },
                      e);
}

std::optional<WireSpec> explicit_stub(const CellModel &cell) {
    std::optional<WireSpec> found;
    if (const auto *s = std::get_if<WireStub>(&cell.element)) found = s->wire;
    for (const auto &a : cell.attachments) {
        if (const auto *e = std::get_if<Element>(&a)) {
            if (const auto *s = std::get_if<WireStub>(e)) found = s->wire;
        }
    }
    return found;
}

WireSpec gate_wire(const Gate &g, int index) {
    if (g.cwires.count(index)) return {WireKind::Classical, std::nullopt, 0};
    if (g.nwires.count(index)) return {WireKind::None, std::nullopt, 0};
    if (g.bundle.count(index)) return {WireKind::Bundle, std::nullopt, 0};
    return {WireKind::Quantum, std::nullopt, 0};
}

// The wire drawn into a cell from its left neighbour.
WireSpec incoming_wire(const CircuitGrid &grid, int r, int c) {
    const auto &cell = grid.at(r, c);
    if (auto stub = explicit_stub(cell)) return *stub;

    CellRef owner{r, c};
    if (cell.covered_by) owner = *cell.covered_by;
    if (const auto *g = std::get_if<Gate>(&grid.at(owner.row, owner.col).element)) {
        return gate_wire(*g, r - owner.row + 1);
    }

    return std::visit(Overloaded{
                          [](const Empty &) { return WireSpec{}; },
                          [](const Stick &) { return WireSpec{}; },
                          [](const Push &) { return WireSpec{}; },
                          [](const Phantom &) { return WireSpec{}; },
                          [](const Wave &) { return WireSpec{}; },
                          [](const Ebit &) { return WireSpec{}; },
                          [](const ArrowMark &) { return WireSpec{}; },
                          [](const VerticalWire &) { return WireSpec{}; },
                          [](const ClassicalBend &) { return WireSpec{WireKind::Classical, std::nullopt, 0}; },
                          [](const auto &) { return WireSpec{WireKind::Quantum, std::nullopt, 0}; },
                      },
                      cell.element);
}

void add_link(std::vector<VerticalLink> &links, const CircuitGrid &grid, int r, int c, int offset, LinkKind kind,
              Endpoint from_end, bool glyph_at_target) {
    int to = r + offset;
    if (to < 0 || to >= grid.rows()) {
        throw Error(ErrorCode::LinkOutOfRange,
                    fmt::format("vertical link from row {} by {} leaves the {}-row circuit", r + 1, offset,
                                grid.rows()),
                    grid.at(r, c).offset, CellRef{r, c});
    }
    VerticalLink link;
    link.col = c;
    link.from_row = r;
    link.to_row = to;
    link.kind = kind;
    link.from_end = from_end;
    link.to_end = glyph_at_target ? landing_glyph(grid.at(to, c).element) : Endpoint::None;
    links.push_back(link);
}

void collect_links(const Element &e, const CircuitGrid &grid, int r, int c, std::vector<VerticalLink> &links) {
    std::visit(Overloaded{
                   [&](const CtrlLine &ctl) {
                       add_link(links, grid, r, c, ctl.offset, LinkKind::Quantum,
                                ctl.open ? Endpoint::OpenDot : Endpoint::Dot, true);
                       links.back().bundle = ctl.bundle;
                       links.back().bundle_wires = ctl.bundle_wires;
                       links.back().style = ctl.style;
                   },
                   [&](const SwapCross &s) {
                       if (!s.offset) return;
                       add_link(links, grid, r, c, *s.offset, LinkKind::Quantum, Endpoint::Cross, true);
                   },
                   [&](const VerticalWire &v) {
                       add_link(links, grid, r, c, v.offset, v.classical ? LinkKind::Classical : LinkKind::Quantum,
                                Endpoint::None, false);
                   },
                   [&](const ClassicalBend &b) {
                       add_link(links, grid, r, c, b.offset, LinkKind::Bend, Endpoint::None, false);
                   },
                   [](const auto &) {},
               },
               e);
}

std::string slice_title(const EnvOptions &env, int index) {
    std::string number = std::to_string(index);
    if (!env.slice_titles) return number;
    std::string out = *env.slice_titles;
    const std::string token = "\\col";
    for (std::size_t at = out.find(token); at != std::string::npos; at = out.find(token, at + number.size())) {
        out.replace(at, token.size(), number);
    }
    return out;
}

}  // namespace

std::string_view element_kind_name(const Element &e) {
    return std::visit(Overloaded{
                          [](const Empty &) { return "empty"; },
                          [](const Gate &) { return "gate"; },
                          [](const Stick &) { return "stick"; },
                          [](const PhaseDot &) { return "phase_dot"; },
                          [](const CtrlLine &) { return "ctrl_line"; },
                          [](const SwapCross &) { return "swap_cross"; },
                          [](const TargCircle &) { return "targ_circle"; },
                          [](const Meter &) { return "meter"; },
                          [](const Trash &) { return "trash"; },
                          [](const Push &) { return "push"; },
                          [](const Phantom &) { return "phantom"; },
                          [](const WireStub &) { return "wire_stub"; },
                          [](const VerticalWire &) { return "vertical_wire"; },
                          [](const ClassicalBend &) { return "classical_bend"; },
                          [](const Wave &) { return "wave"; },
                          [](const Ebit &) { return "ebit"; },
                          [](const ArrowMark &) { return "arrow_mark"; },
                      },
                      e);
}

ResolvedCircuit resolve(const CircuitGrid &grid) {
    ResolvedCircuit out;
    out.grid = grid;
    const int rows = grid.rows();
    const int cols = grid.cols();

    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const auto &cell = grid.at(r, c);
            collect_links(cell.element, grid, r, c, out.links);
            for (const auto &a : cell.attachments) {
                if (const auto *e = std::get_if<Element>(&a)) collect_links(*e, grid, r, c, out.links);
            }
        }
    }

    out.wire_segments.assign(rows, std::vector<WireSpec>(std::max(cols - 1, 0)));
    for (int r = 0; r < rows; ++r) {
        for (int c = 1; c < cols; ++c) out.wire_segments[r][c - 1] = incoming_wire(grid, r, c);
    }

    if (grid.env.slice_all) {
        int last = cols - 1 - grid.env.remove_end_slices;
        for (int g = 0; g < last; ++g) {
            out.slices.push_back(PlacedSlice{g, slice_title(grid.env, g + 1), grid.env.slice_style,
                                             grid.env.slice_label_style});
        }
    }
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            for (const auto &a : grid.at(r, c).attachments) {
                if (const auto *s = std::get_if<SliceMark>(&a)) {
                    std::string style = grid.env.slice_style;
                    if (!s->style.empty()) style += (style.empty() ? "" : ",") + s->style;
                    std::string label_style = grid.env.slice_label_style;
                    if (!s->label_style.empty()) label_style += (label_style.empty() ? "" : ",") + s->label_style;
                    out.slices.push_back(PlacedSlice{c, s->title, style, label_style});
                }
                if (const auto *g = std::get_if<GateGroup>(&a)) {
                    if (r + g->wires > rows || c + g->steps > cols) {
                        throw Error(ErrorCode::GroupOutOfRange,
                                    fmt::format("gategroup of {} wires x {} steps does not fit in the circuit",
                                                g->wires, g->steps),
                                    grid.at(r, c).offset, CellRef{r, c});
                    }
                    out.groups.push_back(PlacedGroup{r, c, *g});
                }
            }
        }
    }
    std::stable_sort(out.slices.begin(), out.slices.end(),
                     [](const PlacedSlice &a, const PlacedSlice &b) { return a.after_col < b.after_col; });
    return out;
}

std::vector<Lint> validate(const CircuitGrid &grid) {
    std::vector<Lint> out = grid.lints;
    if (!grid.source_row_lengths.empty()) {
        int r = grid.rows() - 1;
        int c = grid.source_row_lengths.back() - 1;
        if (c >= 0 && std::holds_alternative<ClassicalBend>(grid.at(r, c).element)) {
            out.push_back(Lint{"L5", "\\cwbend in the bottom-right cell; add an extra & after it", r, c,
                               LintSeverity::Warning});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Lint &a, const Lint &b) {
        return std::tie(a.row, a.col, a.code) < std::tie(b.row, b.col, b.code);
    });
    return out;
}

std::string lints_to_json(const std::vector<Lint> &lints) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &l : lints) {
        arr.push_back({{"code", l.code}, {"message", l.message}, {"row", l.row}, {"col", l.col}});
    }
    return arr.dump();
}

ResolvedCircuit compile(std::string_view source) { return resolve(lower(parse_document(source))); }

}  // namespace qtkz
