#include "qtkz/convert.hpp"

#include <optional>
#include <set>

#include <fmt/format.h>

#include "qtkz/error.hpp"
#include "qtkz/strings.hpp"

namespace qtkz {

namespace {

// Commands with the same meaning in both languages.
const std::set<std::string, std::less<>> &kept_commands() {
    static const std::set<std::string, std::less<>> names = {
        "gate",  "qw",     "cw",   "ctrl",  "lstick", "rstick", "push",  "meterB", "measure", "measuretab",
        "ket",   "bra",    "text", "ldots", "cdots",  "vdots",  "ddots", "qquad",  "quad",    "hphantom",
        "mathrm", "textrm", "dots", "rangle", "langle", "cds",
    };
    return names;
}

std::size_t skip_spaces(std::string_view s, std::size_t i) {
    while (i < s.size() && is_space(s[i])) ++i;
    return i;
}

// Index one past the brace group opening at `open`, or npos.
std::size_t group_end(std::string_view s, std::size_t open) {
    int depth = 0;
    for (std::size_t i = open; i < s.size(); ++i) {
        char c = s[i];
        if (c == '\\') {
            ++i;
        } else if (c == '%') {
            while (i < s.size() && s[i] != '\n') ++i;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return i + 1;
        }
    }
    return std::string_view::npos;
}

// The braced argument starting at or after `i` (spaces skipped). Returns the
// inner text and advances `i` past the closing brace.
std::optional<std::string> braced_arg(std::string_view s, std::size_t &i) {
    std::size_t at = skip_spaces(s, i);
    if (at >= s.size() || s[at] != '{') return std::nullopt;
    std::size_t end = group_end(s, at);
    if (end == std::string_view::npos) return std::nullopt;
    i = end;
    return std::string(s.substr(at + 1, end - at - 2));
}

std::string rtrim_copy(const std::string &s) {
    std::size_t n = s.size();
    while (n > 0 && is_space(s[n - 1])) --n;
    return s.substr(0, n);
}

struct Body {
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> row_seps;  // between rows, verbatim

    std::string join() const {
        std::string out;
        for (std::size_t r = 0; r < cells.size(); ++r) {
            for (std::size_t c = 0; c < cells[r].size(); ++c) {
                if (c) out += '&';
                out += cells[r][c];
            }
            if (r < row_seps.size()) out += row_seps[r];
        }
        return out;
    }
};

Body split_body(std::string_view s) {
    Body b;
    b.cells.emplace_back();
    std::string cell;
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '%') {
            while (i < s.size() && s[i] != '\n') cell += s[i++];
            if (i < s.size()) cell += s[i];
            continue;
        }
        if (c == '\\' && i + 1 < s.size()) {
            if (s[i + 1] == '\\' && depth == 0) {
                b.cells.back().push_back(cell);
                cell.clear();
                b.row_seps.emplace_back("\\\\");
                b.cells.emplace_back();
                ++i;
                continue;
            }
            cell += c;
            cell += s[++i];
            continue;
        }
        if (c == '{') ++depth;
        if (c == '}') --depth;
        if (c == '&' && depth == 0) {
            b.cells.back().push_back(cell);
            cell.clear();
            continue;
        }
        cell += c;
    }
    b.cells.back().push_back(cell);
    return b;
}

struct GroupMove {
    int row = 0;
    int col = 0;
    std::string command;
};

class Converter {
   public:
    std::vector<std::string> notes;

    // Pulls every top-level \gategroup out of its cell.
    std::vector<GroupMove> extract_groups(Body &body) {
        std::vector<GroupMove> moves;
        for (std::size_t r = 0; r < body.cells.size(); ++r) {
            for (std::size_t c = 0; c < body.cells[r].size(); ++c) {
                std::string &text = body.cells[r][c];
                const std::string name = "\\gategroup";
                for (std::size_t at = text.find(name); at != std::string::npos; at = text.find(name, at)) {
                    std::size_t i = at + name.size();
                    if (i < text.size() && is_letter(text[i])) {
                        at = i;
                        continue;
                    }
                    std::vector<std::string> args;
                    for (int k = 0; k < 5; ++k) {
                        auto a = braced_arg(text, i);
                        if (!a) throw Error(ErrorCode::BadArgument, "\\gategroup needs five braced arguments");
                        args.push_back(*a);
                    }
                    std::size_t before_style = i;
                    std::string extra;
                    if (auto style = braced_arg(text, i)) {
                        static const std::set<std::string> bracket_styles = {"--", ".", "_", "^", "\\{", "\\}",
                                                                             ")", "(", "-", ""};
                        if (bracket_styles.count(std::string(trim(*style)))) {
                            if (trim(*style) == "--") extra = ",style={dashed}";
                        } else {
                            i = before_style;
                        }
                    }
                    auto num = [&](int k) {
                        auto v = parse_int(trim(args[k]));
                        if (!v) throw Error(ErrorCode::BadArgument, "\\gategroup index '" + args[k] + "' is not an integer");
                        return *v;
                    };
                    int gi = num(0), gj = num(1), gk = num(2), gl = num(3);
                    if (gi < 1 || gj < 1 || gk < gi || gl < gj) {
                        throw Error(ErrorCode::BadArgument,
                                    fmt::format("\\gategroup{{{}}}{{{}}}{{{}}}{{{}}} does not describe a block", gi, gj,
                                                gk, gl));
                    }
                    moves.push_back(GroupMove{
                        gi - 1, gj - 1, fmt::format("\\gategroup[wires={},steps={}{}]{{}}", gk + 1 - gi, gl + 1 - gj, extra)});
                    while (at > 0 && (text[at - 1] == ' ' || text[at - 1] == '\t')) {
                        --at;
                    }
                    text.erase(at, i - at);
                }
            }
        }
        return moves;
    }

    void place_groups(Body &body, const std::vector<GroupMove> &moves) {
        for (const auto &m : moves) {
            while (static_cast<int>(body.cells.size()) <= m.row) {
                body.row_seps.emplace_back("\\\\");
                body.cells.emplace_back(std::vector<std::string>{" "});
            }
            auto &row = body.cells[m.row];
            while (static_cast<int>(row.size()) <= m.col) row.emplace_back(" ");
            std::string &cell = row[m.col];
            std::string trimmed = rtrim_copy(cell);
            std::string tail = cell.substr(trimmed.size());
            if (tail.empty()) tail = " ";
            cell = trimmed + " " + m.command + tail;
        }
    }

    std::string rewrite_cell(std::string_view s, int row, int col) {
        std::string out;
        int depth = 0;
        std::size_t i = 0;
        auto note = [&](const std::string &what) {
            notes.push_back(fmt::format("row {}, column {}: {}", row + 1, col + 1, what));
        };
        // Appends `{}` unless an argument already follows.
        auto ensure_arg = [&](std::size_t after) {
            std::size_t at = skip_spaces(s, after);
            if (at >= s.size() || s[at] != '{') out += "{}";
        };
        while (i < s.size()) {
            char c = s[i];
            if (c == '%') {
                while (i < s.size() && s[i] != '\n') out += s[i++];
                continue;
            }
            if (c == '{') ++depth;
            if (c == '}') --depth;
            if (c != '\\' || i + 1 >= s.size() || !is_letter(s[i + 1])) {
                out += c;
                if (c == '\\' && i + 1 < s.size()) out += s[++i];
                ++i;
                continue;
            }
            std::size_t start = i++;
            while (i < s.size() && is_letter(s[i])) ++i;
            std::string name(s.substr(start + 1, i - start - 1));
            if (depth > 0) {
                out += s.substr(start, i - start);
                continue;
            }
            if (name == "multigate") {
                std::size_t j = i;
                auto n = braced_arg(s, j);
                auto v = n ? parse_int(trim(*n)) : std::nullopt;
                if (!v) throw Error(ErrorCode::BadArgument, "\\multigate needs an integer argument");
                out += fmt::format("\\gate[{}]", *v + 1);
                i = j;
            } else if (name == "targ" || name == "control" || name == "meter") {
                out += "\\" + name;
                ensure_arg(i);
            } else if (name == "measureD") {
                out += "\\meterD";
                ensure_arg(i);
            } else if (name == "ghost" || name == "nghost" || name == "cghost") {
                std::size_t j = i;
                auto arg = braced_arg(s, j);
                i = j;
                std::string label = arg ? *arg : "";
                if (name == "ghost") {
                    note(fmt::format("removed \\ghost{{{}}}; the spanning \\gate covers this wire", label));
                } else {
                    note(fmt::format("removed \\{}{{{}}}; use {} on the spanning \\gate instead", name, label,
                                     name == "nghost" ? "nwires" : "cwires"));
                }
            } else if (name == "qwx" || name == "cwx") {
                out += name == "qwx" ? "\\vqw" : "\\vcw";
                std::size_t at = skip_spaces(s, i);
                if (at < s.size() && s[at] == '[') {
                    std::size_t close = s.find(']', at);
                    if (close != std::string_view::npos) {
                        out += "{" + std::string(s.substr(at + 1, close - at - 1)) + "}";
                        i = close + 1;
                    }
                } else {
                    out += "{-1}";
                }
            } else if (name == "ctrlo") {
                out += "\\octrl";
            } else if (name == "controlo") {
                out += "\\ocontrol";
                ensure_arg(i);
            } else if (kept_commands().count(name)) {
                out += s.substr(start, i - start);
            } else {
                out += s.substr(start, i - start);
                note(fmt::format("unrecognized QCircuit command \\{} passed through unchanged", name));
            }
        }
        return out;
    }
};

}  // namespace

ConvertResult convert_qcircuit(std::string_view source) {
    std::size_t at = std::string_view::npos;
    std::size_t name_len = 0;
    for (std::string_view name : {"\\Qcircuit", "\\QCircuit"}) {
        std::size_t p = source.find(name);
        while (p != std::string_view::npos && p + name.size() < source.size() && is_letter(source[p + name.size()])) {
            p = source.find(name, p + 1);
        }
        if (p < at) {
            at = p;
            name_len = name.size();
        }
    }
    if (at == std::string_view::npos) throw Error(ErrorCode::BadArgument, "no \\Qcircuit found in the input", 0);

    Converter conv;
    std::optional<std::string> row_sep, col_sep;
    std::size_t i = at + name_len;
    for (;;) {
        i = skip_spaces(source, i);
        if (i >= source.size() || source[i] != '@') break;
        std::size_t start = ++i;
        while (i < source.size() && !is_space(source[i]) && source[i] != '@' && source[i] != '{') ++i;
        std::string spec(source.substr(start, i - start));
        if (!spec.empty() && (spec[0] == 'C' || spec[0] == 'R')) {
            std::string value = spec.substr(1);
            if (!value.empty() && value[0] == '=') value.erase(0, 1);
            (spec[0] == 'C' ? col_sep : row_sep) = value;
        } else {
            conv.notes.push_back(fmt::format("dropped spacing option @{}", spec));
        }
    }
    if (i >= source.size() || source[i] != '{') {
        throw Error(ErrorCode::BadArgument, "\\Qcircuit must be followed by a braced body", i);
    }
    std::size_t end = group_end(source, i);
    if (end == std::string_view::npos) throw Error(ErrorCode::BadArgument, "unbalanced \\Qcircuit body", i);
    std::string_view inner = source.substr(i + 1, end - i - 2);

    Body body = split_body(inner);
    auto moves = conv.extract_groups(body);
    for (std::size_t r = 0; r < body.cells.size(); ++r) {
        for (std::size_t c = 0; c < body.cells[r].size(); ++c) {
            body.cells[r][c] = conv.rewrite_cell(body.cells[r][c], static_cast<int>(r), static_cast<int>(c));
        }
    }
    conv.place_groups(body, moves);

    std::vector<std::string> opts;
    if (row_sep) opts.push_back("row sep=" + *row_sep);
    if (col_sep) opts.push_back("col sep=" + *col_sep);
    std::string begin = "\\begin{quantikz}";
    if (!opts.empty()) {
        begin += "[" + opts[0];
        for (std::size_t k = 1; k < opts.size(); ++k) begin += "," + opts[k];
        begin += "]";
    }

    ConvertResult result;
    result.notes = conv.notes;
    std::string prefix(source.substr(0, at));
    std::string comments;
    for (const auto &n : conv.notes) comments += "% qtkz: " + n + "\n";
    if (!comments.empty() && !prefix.empty() && prefix.back() != '\n') prefix += "\n";
    result.output = prefix + comments + begin + body.join() + "\\end{quantikz}" + std::string(source.substr(end));
    return result;
}

}  // namespace qtkz
