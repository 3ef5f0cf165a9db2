#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "qtkz/error.hpp"
#include "qtkz/model.hpp"
#include "qtkz/strings.hpp"
#include "qtkz/style.hpp"

namespace qtkz {

namespace {

enum class Role { Node, Stub, Secondary, Slice, Group, PortIn, PortOut, Text };

// Commands that must be followed by a brace group even when it is empty.
const std::set<std::string, std::less<>> kNeedsBraces = {
    "gate",    "lstick", "rstick",  "midstick", "phase",      "ophase",  "control",  "ocontrol", "ctrl",
    "octrl",   "ctrlbundle", "targ", "targX",   "swap",       "meter",   "meterD",   "measure",  "measuretab",
    "trash",   "push",   "hphantom", "hphantomgate", "ghost", "qwbundle", "vqw",     "vcw",      "cwbend",
    "makeebit", "slice", "gategroup", "gateinput", "gateoutput",
};

// Macros that may appear as plain cell text (e.g. `\ \ldots\ \qw`).
const std::set<std::string, std::less<>> kTextMacros = {
    "ldots", "cdots", "vdots", "ddots", "dots", "quad", "qquad", "ket", "bra",
    "proj",  "braket", "text", "textrm", "mathrm", "mapsto", "equiv", "cdot", "otimes",
};

Role role_of(const std::string &name) {
    static const std::map<std::string, Role, std::less<>> table = {
        {"gate", Role::Node},       {"lstick", Role::Node},        {"rstick", Role::Node},
        {"midstick", Role::Node},   {"phase", Role::Node},         {"ophase", Role::Node},
        {"control", Role::Node},    {"ocontrol", Role::Node},      {"ctrl", Role::Node},
        {"octrl", Role::Node},      {"ctrlbundle", Role::Node},    {"targ", Role::Node},
        {"targX", Role::Node},      {"swap", Role::Node},          {"meter", Role::Node},
        {"meterD", Role::Node},     {"measure", Role::Node},       {"measuretab", Role::Node},
        {"trash", Role::Node},      {"push", Role::Node},          {"wave", Role::Node},
        {"makeebit", Role::Node},   {"cwbend", Role::Node},        {"qw", Role::Stub},
        {"cw", Role::Stub},         {"qwbundle", Role::Stub},      {"vqw", Role::Secondary},
        {"vcw", Role::Secondary},   {"hphantom", Role::Secondary}, {"hphantomgate", Role::Secondary},
        {"ghost", Role::Secondary}, {"arrow", Role::Secondary},    {"slice", Role::Slice},
        {"gategroup", Role::Group}, {"gateinput", Role::PortIn},   {"gateoutput", Role::PortOut},
    };
    auto it = table.find(name);
    if (it != table.end()) return it->second;
    if (kTextMacros.count(name)) return Role::Text;
    throw std::out_of_range(name);
}

struct PendingPort {
    int row = 0;
    int col = 0;
    bool input = true;
    PortLabel port;
    std::size_t offset = 0;
};

class Lowerer {
   public:
    explicit Lowerer(const MatrixSource &m) : m_(m) {}

    CircuitGrid run() {
        out_.col_extra_space = m_.col_extra_space;
        out_.row_extra_space = m_.row_extra_space;
        lower_env();

        for (std::size_t r = 0; r < m_.rows.size(); ++r) {
            row_ = static_cast<int>(r);
            std::vector<CellModel> cells;
            for (std::size_t c = 0; c < m_.rows[r].cells.size(); ++c) {
                col_ = static_cast<int>(c);
                cells.push_back(lower_cell(m_.rows[r].cells[c]));
            }
            out_.source_row_lengths.push_back(static_cast<int>(cells.size()));
            out_.cells.push_back(std::move(cells));
        }

        pad_rows();
        if (m_.trailing_row_separator && !out_.cells.empty()) {
            lint("L3", "last row ends with a row separator", out_.rows() - 1, out_.source_row_lengths.back() - 1);
        }
        assign_coverage();
        attach_ports();
        return std::move(out_);
    }

   private:
    const MatrixSource &m_;
    CircuitGrid out_;
    int row_ = -1;
    int col_ = -1;
    std::vector<PendingPort> ports_;

    void lint(std::string code, std::string message, int row, int col,
              LintSeverity severity = LintSeverity::Warning) {
        out_.lints.push_back(Lint{std::move(code), std::move(message), row, col, severity});
    }

    void check_style(const std::string &raw, const std::string &where) {
        for (const auto &key : parse_style_keys(raw).unknown_keys) {
            lint("L7", fmt::format("unknown style key '{}' in {} passed through", key, where), row_, col_);
        }
    }

    [[noreturn]] void bad_key(const CommandCall &call, const KeyValue &kv) const {
        throw Error(ErrorCode::BadKey, fmt::format("unknown key '{}' for \\{}", kv.key, call.name), call.span.begin);
    }

    [[noreturn]] void bad_argument(const CommandCall &call, const std::string &what) const {
        throw Error(ErrorCode::BadArgument, fmt::format("\\{}: {}", call.name, what), call.span.begin);
    }

    int wires_value(const CommandCall &call, std::string_view text) const {
        auto n = parse_int(text);
        if (!n || *n < 1) {
            throw Error(ErrorCode::NonIntegerWires,
                        fmt::format("\\{}: wires must be a positive integer, got '{}'", call.name, trim(text)),
                        call.span.begin);
        }
        return *n;
    }

    std::set<int> index_set(const CommandCall &call, const KeyValue &kv) const {
        std::set<int> out;
        for (const auto &item : parse_key_values(kv.value.value_or(""))) {
            auto n = parse_int(item.key);
            if (!n || item.value) bad_argument(call, fmt::format("bad wire index in '{}'", kv.key));
            out.insert(*n);
        }
        return out;
    }

    std::optional<std::string> braced(const CommandCall &call, std::size_t i = 0) {
        if (i < call.braced_args.size()) return call.braced_args[i];
        return std::nullopt;
    }

    std::string braced_or_lint(const CommandCall &call) {
        if (auto a = braced(call)) return *a;
        lint("L1", fmt::format("\\{} should be followed by a brace group, even an empty one {{}}", call.name), row_,
             col_);
        return {};
    }

    std::optional<int> offset_arg(const CommandCall &call) {
        auto a = braced(call);
        if (!a) {
            braced_or_lint(call);
            return std::nullopt;
        }
        auto n = parse_int(*a);
        if (!n || *n == 0) bad_argument(call, fmt::format("offset must be a nonzero integer, got '{}'", *a));
        return n;
    }

    std::string style_opt(const CommandCall &call) {
        std::string raw = call.opt_args.empty() ? std::string() : call.opt_args[0];
        check_style(raw, "\\" + call.name);
        return raw;
    }

    // ---- environment ---------------------------------------------------

    void lower_env() {
        auto &env = out_.env;
        std::size_t at = m_.env_options_offset;
        auto bad = [&](const KeyValue &kv) -> Error {
            return Error(ErrorCode::BadKey, fmt::format("bad value for environment option '{}'", kv.key), at);
        };
        for (const auto &raw : m_.env_options_raw) {
            for (const auto &kv : parse_key_values(raw)) {
                const std::string v = kv.value.value_or("");
                if (kv.key == "row sep") {
                    for (const auto &part : parse_key_values(v)) {
                        if (part.key == "between origins" && !part.value) {
                            env.between_origins = true;
                        } else if (auto len = parse_length(part.key); len && !part.value) {
                            env.row_sep = *len;
                        } else {
                            throw bad(kv);
                        }
                    }
                } else if (kv.key == "column sep" || kv.key == "col sep") {
                    auto len = parse_length(v);
                    if (!len) throw bad(kv);
                    env.column_sep = *len;
                } else if (kv.key == "slice all") {
                    env.slice_all = true;
                } else if (kv.key == "remove end slices") {
                    auto n = parse_int(v);
                    if (!n || *n < 0) throw bad(kv);
                    env.remove_end_slices = *n;
                } else if (kv.key == "slice titles") {
                    env.slice_titles = v;
                } else if (kv.key == "slice style") {
                    env.slice_style = v;
                    check_env_style(v, kv.key);
                } else if (kv.key == "slice label style") {
                    env.slice_label_style = v;
                    check_env_style(v, kv.key);
                } else if (kv.key == "vertical slice labels") {
                    env.vertical_slice_labels = true;
                } else if (kv.key == "align equals at") {
                    auto x = parse_real(v);
                    if (!x) throw bad(kv);
                    env.align_equals_at = *x;
                } else if (kv.key == "thin lines") {
                    env.thin_lines = true;
                } else if (kv.key == "transparent") {
                    env.transparent = true;
                } else if (kv.key == "ampersand replacement") {
                    env.ampersand_replacement = true;
                } else {
                    lint("L7", fmt::format("unknown environment option '{}' passed through", kv.key), -1, -1);
                }
            }
        }
    }

    void check_env_style(const std::string &raw, const std::string &where) {
        for (const auto &key : parse_style_keys(raw).unknown_keys) {
            lint("L7", fmt::format("unknown style key '{}' in {} passed through", key, where), -1, -1);
        }
    }

    // ---- cells ---------------------------------------------------------

    CellModel lower_cell(const CellSource &src) {
        CellModel cell;
        cell.offset = src.offset;
        if (src.inline_style) {
            lint("L6", fmt::format("inline node style |[{}]| is not supported; cell left empty", *src.inline_style),
                 row_, col_);
            return cell;
        }

        std::optional<Element> primary;
        bool primary_is_text = false;
        bool blocker = false;  // something other than a plain \qw or \cw came first
        std::string text;
        std::vector<Element> secondaries;
        std::vector<Element> stubs;

        auto add_text = [&](std::string_view piece) {
            if (primary && !primary_is_text) {
                if (!trim(piece).empty()) {
                    lint("L2", "text after the cell's main command is ignored", row_, col_);
                }
                return;
            }
            if (!primary && blocker && !trim(piece).empty()) {
                lint("L2", "cell text should come before other commands", row_, col_);
            }
            primary_is_text = true;
            primary = Push{};
            text += piece;
        };

        for (const auto &item : src.items) {
            if (const auto *run = std::get_if<TextRun>(&item)) {
                add_text(run->text);
                continue;
            }
            const auto &call = std::get<CommandCall>(item);
            Role role;
            try {
                role = role_of(call.name);
            } catch (const std::out_of_range &) {
                throw Error(ErrorCode::UnknownCommand, fmt::format("unknown command \\{}", call.name),
                            call.span.begin);
            }

            switch (role) {
                case Role::Text:
                    add_text(m_.source.substr(call.span.begin, call.span.end - call.span.begin));
                    break;
                case Role::Node: {
                    Element e = node(call);
                    if (primary) {
                        lint("L2", fmt::format("\\{} is not the first command in its cell and is ignored", call.name),
                             row_, col_);
                    } else {
                        if (blocker) {
                            lint("L2",
                                 fmt::format("\\{} should be the first command in its cell", call.name), row_,
                                 col_);
                        }
                        primary = std::move(e);
                    }
                    break;
                }
                case Role::Stub:
                    stubs.push_back(stub(call));
                    // \qw\rstick{} is fine, \qwbundle{3}\gate{U} is not
                    if (call.name == "qwbundle") blocker = true;
                    break;
                case Role::Secondary:
                    secondaries.push_back(secondary(call));
                    blocker = true;
                    break;
                case Role::Slice:
                    cell.attachments.emplace_back(slice(call));
                    blocker = true;
                    break;
                case Role::Group:
                    cell.attachments.emplace_back(group(call));
                    blocker = true;
                    break;
                case Role::PortIn:
                case Role::PortOut:
                    ports_.push_back(PendingPort{row_, col_, role == Role::PortIn, port(call), call.span.begin});
                    blocker = true;
                    break;
            }
        }

        if (primary_is_text) {
            std::get<Push>(*primary).content = std::string(trim(text));
        }
        if (!primary && !secondaries.empty()) {
            primary = secondaries.front();
            secondaries.erase(secondaries.begin());
        }
        if (!primary && !stubs.empty()) {
            primary = stubs.front();
            stubs.erase(stubs.begin());
        }
        cell.element = primary ? std::move(*primary) : Element{Empty{}};
        for (auto &e : secondaries) cell.attachments.emplace_back(std::move(e));
        for (auto &e : stubs) cell.attachments.emplace_back(std::move(e));
        return cell;
    }

    Element node(const CommandCall &call) {
        const std::string &n = call.name;
        if (n == "gate") return gate(call);
        if (n == "lstick" || n == "rstick" || n == "midstick") return stick(call);
        if (n == "phase" || n == "ophase") {
            PhaseDot d;
            d.open = n == "ophase";
            d.style = style_opt(call);
            d.label = braced_or_lint(call);
            return d;
        }
        if (n == "control" || n == "ocontrol") {
            PhaseDot d;
            d.open = n == "ocontrol";
            d.style = style_opt(call);
            braced_or_lint(call);
            return d;
        }
        if (n == "ctrl" || n == "octrl" || n == "ctrlbundle") {
            CtrlLine c;
            c.open = n == "octrl";
            if (n == "ctrlbundle") {
                c.bundle = true;
                if (!call.opt_args.empty() && !trim(call.opt_args[0]).empty()) {
                    auto w = parse_int(call.opt_args[0]);
                    if (!w || *w < 2) bad_argument(call, "bundle marker must be an integer of at least 2");
                    c.bundle_wires = *w;
                }
            } else {
                c.style = style_opt(call);
            }
            auto off = offset_arg(call);
            if (!off) return PhaseDot{{}, c.open, c.style};
            c.offset = *off;
            return c;
        }
        if (n == "targ") {
            TargCircle t{style_opt(call)};
            braced_or_lint(call);
            return t;
        }
        if (n == "targX") {
            SwapCross s{std::nullopt, style_opt(call)};
            braced_or_lint(call);
            return s;
        }
        if (n == "swap") {
            SwapCross s{std::nullopt, style_opt(call)};
            s.offset = offset_arg(call);
            return s;
        }
        if (n == "meter" || n == "meterD" || n == "measure" || n == "measuretab") {
            Meter m;
            m.variant = n == "meter"     ? MeterVariant::Box
                        : n == "meterD"  ? MeterVariant::D
                        : n == "measure" ? MeterVariant::Rounded
                                         : MeterVariant::Tab;
            m.style = style_opt(call);
            m.basis_label = braced_or_lint(call);
            return m;
        }
        if (n == "trash") {
            Trash t;
            t.style = style_opt(call);
            t.label = braced_or_lint(call);
            return t;
        }
        if (n == "push") return Push{braced_or_lint(call)};
        if (n == "wave") return Wave{style_opt(call)};
        if (n == "makeebit") {
            Ebit e;
            if (!call.opt_args.empty() && !trim(call.opt_args[0]).empty()) {
                auto a = parse_real(call.opt_args[0]);
                if (!a) bad_argument(call, "angle must be a number");
                e.angle_deg = *a;
            }
            if (call.opt_args.size() > 1) {
                e.label_style = call.opt_args[1];
                check_style(e.label_style, "\\makeebit");
            }
            e.label = braced_or_lint(call);
            return e;
        }
        if (n == "cwbend") {
            auto off = offset_arg(call);
            if (!off) return Empty{};
            return ClassicalBend{*off};
        }
        throw Error(ErrorCode::UnknownCommand, fmt::format("unknown command \\{}", n), call.span.begin);
    }

    Gate gate(const CommandCall &call) {
        Gate g;
        if (!call.opt_args.empty()) {
            auto kvs = parse_key_values(call.opt_args[0]);
            for (std::size_t i = 0; i < kvs.size(); ++i) {
                const auto &kv = kvs[i];
                const std::string v = kv.value.value_or("");
                if (i == 0 && !kv.value && parse_int(kv.key)) {
                    g.wires = wires_value(call, kv.key);
                } else if (kv.key == "wires") {
                    g.wires = wires_value(call, v);
                } else if (kv.key == "style") {
                    g.style = v;
                    check_style(v, "\\gate style");
                } else if (kv.key == "label style") {
                    g.label_style = v;
                    check_style(v, "\\gate label style");
                } else if (kv.key == "swap" && !kv.value) {
                    g.swap_variant = true;
                } else if (kv.key == "disable auto height" && !kv.value) {
                    g.disable_auto_height = true;
                } else if (kv.key == "cwires") {
                    g.cwires = index_set(call, kv);
                } else if (kv.key == "nwires") {
                    g.nwires = index_set(call, kv);
                } else if (kv.key == "bundle") {
                    g.bundle = index_set(call, kv);
                } else if (auto len = parse_length(kv.key); len && !kv.value && !g.min_width) {
                    g.min_width = *len;
                } else {
                    bad_key(call, kv);
                }
            }
        }
        if (call.opt_args.size() > 1) {
            auto len = parse_length(call.opt_args[1]);
            if (!len) bad_argument(call, fmt::format("minimum width '{}' is not a length", call.opt_args[1]));
            g.min_width = *len;
        }
        if (call.opt_args.size() > 2) {
            auto len = parse_length(call.opt_args[2]);
            if (!len) bad_argument(call, fmt::format("minimum height '{}' is not a length", call.opt_args[2]));
            g.min_height = *len;
        }
        if (g.swap_variant) g.wires = 2;
        for (const auto *set : {&g.cwires, &g.nwires, &g.bundle}) {
            for (int w : *set) {
                if (w < 1 || w > g.wires) bad_argument(call, fmt::format("wire index {} outside 1..{}", w, g.wires));
            }
        }
        for (int w : g.cwires) {
            if (g.nwires.count(w) || g.bundle.count(w)) bad_argument(call, fmt::format("wire {} listed twice", w));
        }
        for (int w : g.nwires) {
            if (g.bundle.count(w)) bad_argument(call, fmt::format("wire {} listed twice", w));
        }
        g.label = braced_or_lint(call);
        return g;
    }

    Stick stick(const CommandCall &call) {
        Stick s;
        s.side = call.name == "lstick" ? StickSide::Left : call.name == "rstick" ? StickSide::Right : StickSide::Mid;
        if (!call.opt_args.empty()) {
            auto kvs = parse_key_values(call.opt_args[0]);
            for (std::size_t i = 0; i < kvs.size(); ++i) {
                const auto &kv = kvs[i];
                const std::string v = kv.value.value_or("");
                if (i == 0 && !kv.value && parse_int(kv.key)) {
                    s.wires = wires_value(call, kv.key);
                } else if (kv.key == "wires") {
                    s.wires = wires_value(call, v);
                } else if (kv.key == "label style") {
                    s.label_style = v;
                    check_style(v, "\\" + call.name + " label style");
                } else if (kv.key == "braces") {
                    s.brace_style = v;
                    check_style(v, "\\" + call.name + " braces");
                } else if (kv.key == "brackets") {
                    static const std::map<std::string, Brackets, std::less<>> table = {
                        {"none", Brackets::None},
                        {"left", Brackets::Left},
                        {"right", Brackets::Right},
                        {"both", Brackets::Both},
                    };
                    auto it = table.find(trim(v));
                    if (it == table.end()) bad_argument(call, fmt::format("brackets must be none|left|right|both"));
                    s.brackets = it->second;
                } else {
                    bad_key(call, kv);
                }
            }
        }
        s.label = braced_or_lint(call);
        return s;
    }

    Element stub(const CommandCall &call) {
        WireSpec w;
        if (call.name == "qw") {
            w.kind = WireKind::Quantum;
        } else if (call.name == "cw") {
            w.kind = WireKind::Classical;
        } else {
            w.kind = WireKind::Bundle;
            if (!call.opt_args.empty()) {
                for (const auto &kv : parse_key_values(call.opt_args[0])) {
                    if (kv.key != "alternate") bad_key(call, kv);
                    w.alternate = 3;
                    if (kv.value) {
                        auto n = parse_int(*kv.value);
                        if (!n || *n < 2 || *n > 3) bad_argument(call, "alternate must be 2 or 3");
                        w.alternate = *n;
                    }
                }
            }
            std::string count = braced_or_lint(call);
            if (!trim(count).empty()) {
                auto n = parse_int(count);
                if (!n || *n < 1) bad_argument(call, fmt::format("bundle count '{}' is not a positive integer", count));
                w.count = *n;
            }
        }
        return WireStub{w};
    }

    Element secondary(const CommandCall &call) {
        const std::string &n = call.name;
        if (n == "vqw" || n == "vcw") {
            auto off = offset_arg(call);
            if (!off) return Empty{};
            return VerticalWire{*off, n == "vcw"};
        }
        if (n == "hphantom") return Phantom{PhantomKind::BoxWidener, braced_or_lint(call)};
        if (n == "hphantomgate") return Phantom{PhantomKind::WireLengthener, braced_or_lint(call)};
        if (n == "ghost") return Phantom{PhantomKind::Ghost, braced_or_lint(call)};
        // \arrow[r] or \arrow{r}
        ArrowMark a;
        std::vector<KeyValue> style_keys;
        if (!call.opt_args.empty()) {
            for (const auto &kv : parse_key_values(call.opt_args[0])) {
                if (!kv.value && !kv.key.empty() && kv.key.find_first_not_of("udlr") == std::string::npos) {
                    a.dirs += kv.key;
                } else {
                    style_keys.push_back(kv);
                }
            }
        }
        if (auto b = braced(call)) {
            auto d = std::string(trim(*b));
            if (d.find_first_not_of("udlr") != std::string::npos) bad_argument(call, "direction must use u, d, l, r");
            a.dirs += d;
        }
        if (a.dirs.empty()) bad_argument(call, "missing direction");
        a.style = serialize_key_values(style_keys);
        check_style(a.style, "\\arrow");
        return a;
    }

    SliceMark slice(const CommandCall &call) {
        SliceMark s;
        if (!call.opt_args.empty()) {
            for (const auto &kv : parse_key_values(call.opt_args[0])) {
                const std::string v = kv.value.value_or("");
                if (kv.key == "style") {
                    s.style = v;
                    check_style(v, "\\slice style");
                } else if (kv.key == "label style") {
                    s.label_style = v;
                    check_style(v, "\\slice label style");
                } else {
                    bad_key(call, kv);
                }
            }
        }
        s.title = braced_or_lint(call);
        return s;
    }

    GateGroup group(const CommandCall &call) {
        GateGroup g;
        if (!call.opt_args.empty()) {
            auto kvs = parse_key_values(call.opt_args[0]);
            for (std::size_t i = 0; i < kvs.size(); ++i) {
                const auto &kv = kvs[i];
                const std::string v = kv.value.value_or("");
                if (i == 0 && !kv.value && parse_int(kv.key)) {
                    g.wires = wires_value(call, kv.key);
                } else if (kv.key == "wires") {
                    g.wires = wires_value(call, v);
                } else if (kv.key == "steps") {
                    auto n = parse_int(v);
                    if (!n || *n < 1) bad_argument(call, "steps must be a positive integer");
                    g.steps = *n;
                } else if (kv.key == "style") {
                    g.style = v;
                    check_style(v, "\\gategroup style");
                } else if (kv.key == "label style") {
                    g.label_style = v;
                    check_style(v, "\\gategroup label style");
                } else if (kv.key == "background" && !kv.value) {
                    g.background = true;
                } else {
                    bad_key(call, kv);
                }
            }
        }
        g.label = braced_or_lint(call);
        return g;
    }

    PortLabel port(const CommandCall &call) {
        PortLabel p;
        if (!call.opt_args.empty()) {
            auto kvs = parse_key_values(call.opt_args[0]);
            for (std::size_t i = 0; i < kvs.size(); ++i) {
                const auto &kv = kvs[i];
                const std::string v = kv.value.value_or("");
                if (i == 0 && !kv.value && parse_int(kv.key)) {
                    p.wires = wires_value(call, kv.key);
                } else if (kv.key == "wires") {
                    p.wires = wires_value(call, v);
                } else if (kv.key == "label style") {
                    p.label_style = v;
                    check_style(v, "\\" + call.name + " label style");
                } else if (kv.key == "braces") {
                    p.brace_style = v;
                    check_style(v, "\\" + call.name + " braces");
                } else {
                    bad_key(call, kv);
                }
            }
        }
        p.label = braced_or_lint(call);
        return p;
    }

    // ---- whole grid ----------------------------------------------------

    void pad_rows() {
        std::size_t width = 0;
        for (const auto &row : out_.cells) width = std::max(width, row.size());
        for (std::size_t r = 0; r < out_.cells.size(); ++r) {
            auto &row = out_.cells[r];
            if (row.size() < width) {
                lint("L4", fmt::format("row has {} cells, padded to {}", row.size(), width), static_cast<int>(r),
                     static_cast<int>(row.size()), LintSeverity::Info);
                std::size_t offset = m_.rows[r].cells.back().offset;
                row.resize(width, CellModel{Empty{}, {}, std::nullopt, offset});
            }
        }
    }

    void assign_coverage() {
        const int rows = out_.rows();
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < out_.cols(); ++c) {
                auto &cell = out_.cells[r][c];
                int wires = 1;
                bool is_gate = false;
                if (const auto *g = std::get_if<Gate>(&cell.element)) {
                    wires = g->wires;
                    is_gate = true;
                } else if (const auto *s = std::get_if<Stick>(&cell.element)) {
                    wires = s->wires;
                }
                if (r + wires > rows) {
                    throw Error(ErrorCode::GateOutOfRange,
                                fmt::format("element spans {} wires but only {} rows remain", wires, rows - r),
                                cell.offset, CellRef{r, c});
                }
                if (!is_gate) continue;
                for (int k = 1; k < wires; ++k) {
                    auto &below = out_.cells[r + k][c];
                    if (std::holds_alternative<Gate>(below.element) || below.covered_by) {
                        throw Error(ErrorCode::OverlappingGateSpans,
                                    fmt::format("gate at row {} overlaps the gate spanning from row {}", r + k + 1,
                                                r + 1),
                                    below.offset, CellRef{r + k, c});
                    }
                    below.covered_by = CellRef{r, c};
                }
            }
        }
    }

    void attach_ports() {
        for (auto &p : ports_) {
            const auto &cell = out_.cells[p.row][p.col];
            CellRef owner{p.row, p.col};
            if (!std::holds_alternative<Gate>(cell.element)) {
                if (!cell.covered_by) {
                    throw Error(ErrorCode::OrphanPortLabel,
                                fmt::format("\\{} is not inside a gate", p.input ? "gateinput" : "gateoutput"),
                                p.offset, CellRef{p.row, p.col});
                }
                owner = *cell.covered_by;
            }
            auto &gate = std::get<Gate>(out_.cells[owner.row][owner.col].element);
            p.port.first_wire = p.row - owner.row;
            if (p.port.first_wire + p.port.wires > gate.wires) {
                throw Error(ErrorCode::BadArgument, "port label extends past the bottom of its gate", p.offset,
                            CellRef{p.row, p.col});
            }
            (p.input ? gate.inputs : gate.outputs).push_back(p.port);
        }
    }
};

}  // namespace

CircuitGrid lower(const MatrixSource &matrix) { return Lowerer(matrix).run(); }

}  // namespace qtkz
