#pragma once

// Typed circuit model: lowering of the parsed matrix into a rectangular grid
// of elements, resolution of links, wires, slices and groups, and lints.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "qtkz/error.hpp"
#include "qtkz/length.hpp"
#include "qtkz/syntax.hpp"

namespace qtkz {

enum class WireKind { None, Quantum, Classical, Bundle };

/// What a single horizontal segment looks like. For bundles, `alternate`
/// is 0 for the slanted strike and otherwise the number of parallel lines.
struct WireSpec {
    WireKind kind = WireKind::None;
    std::optional<int> count;
    int alternate = 0;
    friend bool operator==(const WireSpec &, const WireSpec &) = default;
};

enum class StickSide { Left, Right, Mid };
enum class Brackets { None, Left, Right, Both };
enum class MeterVariant { Box, D, Tab, Rounded };
enum class PhantomKind { BoxWidener, WireLengthener, Ghost };

/// `\gateinput` / `\gateoutput`; `first_wire` counts from the gate's top row.
struct PortLabel {
    std::string label;
    int first_wire = 0;
    int wires = 1;
    std::string label_style;
    std::string brace_style;
    friend bool operator==(const PortLabel &, const PortLabel &) = default;
};

struct Gate {
    std::string label;
    int wires = 1;
    std::optional<Length> min_width;
    std::optional<Length> min_height;
    bool disable_auto_height = false;
    bool swap_variant = false;
    std::set<int> cwires;
    std::set<int> nwires;
    std::set<int> bundle;
    std::string style;
    std::string label_style;
    std::vector<PortLabel> inputs;
    std::vector<PortLabel> outputs;
    friend bool operator==(const Gate &, const Gate &) = default;
};

struct Stick {
    StickSide side = StickSide::Left;
    std::string label;
    int wires = 1;
    Brackets brackets = Brackets::Both;
    std::string label_style;
    std::string brace_style;
    friend bool operator==(const Stick &, const Stick &) = default;
};

/// `\phase`, `\ophase`, `\control`, `\ocontrol`.
struct PhaseDot {
    std::string label;
    bool open = false;
    std::string style;
    friend bool operator==(const PhaseDot &, const PhaseDot &) = default;
};

/// `\ctrl`, `\octrl`, `\ctrlbundle`.
struct CtrlLine {
    int offset = 1;
    bool open = false;
    bool bundle = false;
    std::optional<int> bundle_wires;
    std::string style;
    friend bool operator==(const CtrlLine &, const CtrlLine &) = default;
};

/// `\swap{k}` carries an offset, `\targX{}` does not.
struct SwapCross {
    std::optional<int> offset;
    std::string style;
    friend bool operator==(const SwapCross &, const SwapCross &) = default;
};

struct TargCircle {
    std::string style;
    friend bool operator==(const TargCircle &, const TargCircle &) = default;
};

struct Meter {
    MeterVariant variant = MeterVariant::Box;
    std::string basis_label;
    std::string style;
    friend bool operator==(const Meter &, const Meter &) = default;
};

struct Trash {
    std::string label;
    std::string style;
    friend bool operator==(const Trash &, const Trash &) = default;
};

/// Unboxed cell text, from `\push{}` or free text in a cell.
struct Push {
    std::string content;
    friend bool operator==(const Push &, const Push &) = default;
};

struct Phantom {
    PhantomKind kind = PhantomKind::Ghost;
    std::string content;
    friend bool operator==(const Phantom &, const Phantom &) = default;
};

/// `\qw`, `\cw`, `\qwbundle`.
struct WireStub {
    WireSpec wire;
    friend bool operator==(const WireStub &, const WireStub &) = default;
};

/// `\vqw`, `\vcw`.
struct VerticalWire {
    int offset = 1;
    bool classical = false;
    friend bool operator==(const VerticalWire &, const VerticalWire &) = default;
};

struct ClassicalBend {
    int offset = -1;
    friend bool operator==(const ClassicalBend &, const ClassicalBend &) = default;
};

struct Wave {
    std::string style;
    friend bool operator==(const Wave &, const Wave &) = default;
};

struct Ebit {
    double angle_deg = -45.0;
    std::string label;
    std::string label_style;
    friend bool operator==(const Ebit &, const Ebit &) = default;
};

/// `\arrow[r]`; each char of `dirs` is one of u, d, l, r.
struct ArrowMark {
    std::string dirs;
    std::string style;
    friend bool operator==(const ArrowMark &, const ArrowMark &) = default;
};

struct Empty {
    friend bool operator==(const Empty &, const Empty &) = default;
};

using Element = std::variant<Empty, Gate, Stick, PhaseDot, CtrlLine, SwapCross, TargCircle, Meter, Trash, Push,
                             Phantom, WireStub, VerticalWire, ClassicalBend, Wave, Ebit, ArrowMark>;

/// Stable lower-case name of the element's variant, e.g. "gate", "wire_stub".
std::string_view element_kind_name(const Element &e);

struct SliceMark {
    std::string title;
    std::string style;
    std::string label_style;
    friend bool operator==(const SliceMark &, const SliceMark &) = default;
};

struct GateGroup {
    int wires = 1;
    int steps = 1;
    std::string label;
    std::string style;
    std::string label_style;
    bool background = false;
    friend bool operator==(const GateGroup &, const GateGroup &) = default;
};

/// Secondary content of a cell. Elements here are the ones that do not
/// create a node of their own: wire stubs, vertical wires, phantoms, arrows.
using Attachment = std::variant<SliceMark, GateGroup, Element>;

struct CellModel {
    Element element;
    std::vector<Attachment> attachments;
    std::optional<CellRef> covered_by;
    std::size_t offset = 0;
    friend bool operator==(const CellModel &, const CellModel &) = default;
};

struct EnvOptions {
    std::optional<Length> row_sep;
    bool between_origins = false;
    std::optional<Length> column_sep;
    bool slice_all = false;
    int remove_end_slices = 0;
    std::optional<std::string> slice_titles;
    std::string slice_style;
    std::string slice_label_style;
    bool vertical_slice_labels = false;
    std::optional<double> align_equals_at;
    bool thin_lines = false;
    bool transparent = false;
    bool ampersand_replacement = false;
    friend bool operator==(const EnvOptions &, const EnvOptions &) = default;
};

enum class LintSeverity { Info, Warning };

/// Row and column are 0-based grid coordinates, -1 when the finding is not
/// tied to a cell (environment options).
struct Lint {
    std::string code;
    std::string message;
    int row = -1;
    int col = -1;
    LintSeverity severity = LintSeverity::Warning;
    friend bool operator==(const Lint &, const Lint &) = default;
};

/// `[{"code":..,"col":..,"message":..,"row":..}, ...]`
std::string lints_to_json(const std::vector<Lint> &lints);

struct CircuitGrid {
    std::vector<std::vector<CellModel>> cells;
    EnvOptions env;
    std::map<int, Length> col_extra_space;
    std::map<int, Length> row_extra_space;
    std::vector<int> source_row_lengths;
    /// Findings made while lowering; `validate` reports them with the rest.
    std::vector<Lint> lints;

    int rows() const { return static_cast<int>(cells.size()); }
    int cols() const { return cells.empty() ? 0 : static_cast<int>(cells.front().size()); }
    const CellModel &at(int r, int c) const { return cells[r][c]; }
    friend bool operator==(const CircuitGrid &, const CircuitGrid &) = default;
};

/// Throws Error{UnknownCommand, BadKey, NonIntegerWires, BadArgument,
/// OrphanPortLabel, GateOutOfRange, OverlappingGateSpans}.
CircuitGrid lower(const MatrixSource &matrix);

enum class LinkKind { Quantum, Classical, Bend };
enum class Endpoint { None, Dot, OpenDot, Targ, Cross };

struct VerticalLink {
    int col = 0;
    int from_row = 0;
    int to_row = 0;
    LinkKind kind = LinkKind::Quantum;
    Endpoint from_end = Endpoint::None;
    Endpoint to_end = Endpoint::None;
    bool bundle = false;
    std::optional<int> bundle_wires;
    std::string style;
    friend bool operator==(const VerticalLink &, const VerticalLink &) = default;
};

struct PlacedSlice {
    int after_col = 0;
    std::string title;
    std::string style;
    std::string label_style;
    friend bool operator==(const PlacedSlice &, const PlacedSlice &) = default;
};

struct PlacedGroup {
    int row = 0;
    int col = 0;
    GateGroup group;
    friend bool operator==(const PlacedGroup &, const PlacedGroup &) = default;
};

struct ResolvedCircuit {
    CircuitGrid grid;
    std::vector<VerticalLink> links;
    /// wire_segments[r][g] is the segment between columns g and g+1 on row r.
    std::vector<std::vector<WireSpec>> wire_segments;
    std::vector<PlacedSlice> slices;
    std::vector<PlacedGroup> groups;
    friend bool operator==(const ResolvedCircuit &, const ResolvedCircuit &) = default;
};

/// Throws Error{LinkOutOfRange, GroupOutOfRange}.
ResolvedCircuit resolve(const CircuitGrid &grid);

/// All lints, ordered by position then code.
std::vector<Lint> validate(const CircuitGrid &grid);

/// Parse, lower and resolve in one go.
ResolvedCircuit compile(std::string_view source);

}  // namespace qtkz
