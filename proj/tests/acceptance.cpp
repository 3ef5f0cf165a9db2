// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fail.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <expat.h>
#include <fmt/core.h>
#include <json.hpp>

#include "qtkz/cli.hpp"
#include "qtkz/convert.hpp"
#include "qtkz/error.hpp"
#include "qtkz/layout.hpp"
#include "qtkz/model.hpp"
#include "qtkz/scene.hpp"
#include "qtkz/style.hpp"

namespace fs = std::filesystem;
using namespace qtkz;

namespace {

// Tolerances.
constexpr double kCorpusSeconds = 1.0;
constexpr double kColorTol = 1e-9;
constexpr int kMonotonicTrials = 200;
constexpr unsigned kSeed = 12345;

const fs::path kCorpus = QTKZ_CORPUS_DIR;
const fs::path kFixtures = QTKZ_FIXTURES_DIR;
const fs::path kGolden = QTKZ_GOLDEN_DIR;

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<fs::path> corpus_files() {
    std::vector<fs::path> out;
    for (const auto &e : fs::directory_iterator(kCorpus)) {
        if (e.path().extension() == ".qtz") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct CliRun {
    int status;
    std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
    args.insert(args.begin(), "qtkz");
    std::vector<const char *> argv;
    for (const auto &a : args) argv.push_back(a.c_str());
    std::istringstream in;
    std::ostringstream out, err;
    int status = run_cli(static_cast<int>(argv.size()), argv.data(), in, out, err);
    return {status, out.str(), err.str()};
}

bool well_formed_xml(const std::string &text) {
    XML_Parser p = XML_ParserCreate("UTF-8");
    bool ok = XML_Parse(p, text.data(), static_cast<int>(text.size()), 1) == XML_STATUS_OK;
    XML_ParserFree(p);
    return ok;
}

Scene scene_of(const std::string &source, LayoutResult *geometry = nullptr) {
    auto rc = compile(source);
    StyleSheet sheet;
    auto g = layout(rc, sheet);
    if (geometry) *geometry = g;
    return build_scene(rc, g, sheet);
}

std::string replace_once(std::string s, const std::string &from, const std::string &to) {
    auto at = s.find(from);
    if (at != std::string::npos) s.replace(at, from.size(), to);
    return s;
}

std::set<std::string> codes(const std::vector<Lint> &lints, bool warnings_only) {
    std::set<std::string> out;
    for (const auto &l : lints) {
        if (!warnings_only || l.severity == LintSeverity::Warning) out.insert(l.code);
    }
    return out;
}

std::string join(const std::set<std::string> &s) {
    std::string out;
    for (const auto &x : s) out += (out.empty() ? "" : ",") + x;
    return out.empty() ? "none" : out;
}

struct Outcome {
    bool ok = true;
    std::string detail;
    void fail(const std::string &why) {
        if (ok) detail = why;
        ok = false;
    }
};

// 1. corpus parse
Outcome corpus_parse() {
    Outcome o;
    auto files = corpus_files();
    std::vector<std::string> sources;
    for (const auto &f : files) sources.push_back(slurp(f));
    auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < files.size(); ++i) {
        try {
            (void)compile(sources[i]);
        } catch (const Error &e) {
            o.fail(e.describe(files[i].filename().string(), sources[i]));
        }
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= kCorpusSeconds) o.fail(fmt::format("took {:.3f}s", secs));
    if (o.ok) o.detail = fmt::format("{} listings in {:.3f}s", files.size(), secs);
    return o;
}

// 2. golden scenes, determinism, well-formed SVG
Outcome golden_scenes() {
    Outcome o;
    int n = 0;
    for (const auto &f : corpus_files()) {
        auto name = f.filename().string();
        auto a = cli({"render", "--format", "json", f.string()});
        auto b = cli({"render", "--format", "json", f.string()});
        fs::path golden = kGolden / (f.stem().string() + ".json");
        if (a.status != 0) o.fail(name + " did not render");
        if (a.out != b.out) o.fail(name + " not deterministic");
        if (!fs::exists(golden)) {
            o.fail(name + " has no golden scene");
        } else if (slurp(golden) != a.out) {
            o.fail(name + " differs from golden scene");
        }
        auto svg = cli({"render", f.string()});
        if (!well_formed_xml(svg.out)) o.fail(name + " SVG is not well-formed");
        ++n;
    }
    if (o.ok) o.detail = fmt::format("{} scenes byte-identical, {} SVGs well-formed", n, n);
    return o;
}

// 3a. links of the three-wire multiple qubits listing
Outcome multiple_qubit_links() {
    Outcome o;
    auto rc = compile(slurp(kCorpus / "09_multiple_qubits.qtz"));
    using P = std::pair<Endpoint, Endpoint>;
    std::multiset<P> control, swap;
    for (const auto &l : rc.links) (l.from_end == Endpoint::Cross ? swap : control).insert({l.from_end, l.to_end});
    // enumerated by hand from the listing, left to right
    std::multiset<P> want = {
        {Endpoint::Dot, Endpoint::Targ},    // ctrl{1} over targ
        {Endpoint::OpenDot, Endpoint::None},  // octrl{-1} under gate U
        {Endpoint::Dot, Endpoint::Dot},       // ctrl{1} over control
        {Endpoint::Dot, Endpoint::OpenDot},   // ctrl{1} over octrl
        {Endpoint::OpenDot, Endpoint::None},  // octrl{1} over gate U
    };
    if (control.size() != 5) o.fail(fmt::format("{} control links", control.size()));
    if (control != want) o.fail("control link endpoints differ from the enumeration");
    if (swap != std::multiset<P>{{Endpoint::Cross, Endpoint::Cross}}) o.fail("expected one swap link");
    if (o.ok) o.detail = "5 control links, 1 swap link";
    return o;
}

// 3b. wire kinds into the five-wire gate
Outcome different_connections() {
    Outcome o;
    auto rc = compile(slurp(kCorpus / "19_different_connections.qtz"));
    std::vector<WireKind> got;
    for (int r = 0; r < 5; ++r) got.push_back(rc.wire_segments.at(r).at(0).kind);
    std::vector<WireKind> want = {WireKind::Quantum, WireKind::Classical, WireKind::None, WireKind::Classical,
                                  WireKind::Bundle};
    if (got != want) o.fail("wire kinds differ");
    auto scene = scene_of(slurp(kCorpus / "19_different_connections.qtz"));
    std::map<std::string, int> roles;
    for (const auto &p : scene.primitives) ++roles[p.role];
    if (roles["double-line"] < 1 || roles["strike"] + roles["alternate"] < 1) o.fail("scene lacks classical or bundle wires");
    if (o.ok) o.detail = "[quantum, classical, none, classical, bundle]";
    return o;
}

// 3c. slice all
Outcome slice_all() {
    Outcome o;
    auto all_src = slurp(kCorpus / "21_slice_all.qtz");
    auto all = compile(all_src);
    auto titled = compile(slurp(kCorpus / "22_slice_titles.qtz"));
    if (all.grid.cols() != 6) o.fail(fmt::format("padded to {} columns", all.grid.cols()));
    if (all.slices.size() != 5) o.fail(fmt::format("slice all gave {}", all.slices.size()));
    if (titled.slices.size() != 4) o.fail(fmt::format("remove end slices=1 gave {}", titled.slices.size()));
    for (std::size_t i = 0; i < titled.slices.size(); ++i) {
        if (titled.slices[i].title != fmt::format("slice {}", i + 1)) o.fail("title " + titled.slices[i].title);
    }
    int drawn = 0;
    for (const auto &p : scene_of(all_src).primitives) drawn += p.role == "slice";
    if (drawn != 5) o.fail(fmt::format("{} slice lines drawn", drawn));
    if (o.ok) o.detail = "5 slices, 4 after removal, titled slice 1..slice 4";
    return o;
}

// 4. layout properties
Outcome layout_properties() {
    Outcome o;
    StyleSheet sheet;

    // equal pitch between origins
    {
        auto rc = compile(slurp(kCorpus / "29_row_sep_between_origins.qtz"));
        auto g = layout(rc, sheet);
        double pitch = g.row_y[1] - g.row_y[0];
        for (std::size_t i = 1; i + 1 < g.row_y.size(); ++i) {
            if (g.row_y[i + 1] - g.row_y[i] != pitch) o.fail("unequal pitch between origins");
        }
        if (pitch < Length::cm(0.6).to_units()) o.fail("pitch below 0.6cm");
    }

    // a ghost copies the height of the gate it shadows
    {
        const std::string tall = "\\begin{quantikz}\n& \\gate{A\\\\B\\\\C} & \\qw \\\\\n& %s\\qw & \\qw\n\\end{quantikz}";
        auto with = layout(compile(replace_once(tall, "%s", "\\ghost{A\\\\B\\\\C}")), sheet);
        auto without = layout(compile(replace_once(tall, "%s", "")), sheet);
        if (with.row_h[1] != with.row_h[0]) o.fail("ghost row height differs from its gate");
        if (!(with.row_h[1] > without.row_h[1])) o.fail("ghost does not inflate its row");
    }

    // widening one element never moves any column left
    {
        std::mt19937 rng(kSeed);
        std::uniform_int_distribution<int> len(1, 8), pick(0, 3 * 5 - 1);
        auto source = [](const std::vector<int> &w) {
            std::string s = "\\begin{quantikz}\n";
            for (int r = 0; r < 3; ++r) {
                for (int c = 0; c < 5; ++c) s += "& \\gate{" + std::string(static_cast<std::size_t>(w[r * 5 + c]), 'M') + "} ";
                s += "& \\qw" + std::string(r < 2 ? " \\\\\n" : "\n");
            }
            return s + "\\end{quantikz}";
        };
        for (int t = 0; t < kMonotonicTrials && o.ok; ++t) {
            std::vector<int> w(15);
            for (auto &x : w) x = len(rng);
            auto before = layout(compile(source(w)), sheet).col_x;
            w[static_cast<std::size_t>(pick(rng))] += len(rng);
            auto after = layout(compile(source(w)), sheet).col_x;
            for (std::size_t c = 0; c < before.size(); ++c) {
                if (after[c] < before[c]) o.fail(fmt::format("trial {}: column {} moved left", t, c));
                if (c > 0 && !(after[c] > after[c - 1])) o.fail(fmt::format("trial {}: columns out of order", t));
            }
        }
    }

    // baseline interpolation at a fractional row
    {
        auto g = layout(compile(slurp(kCorpus / "39_align_equals_at_lhs.qtz")), sheet);
        if (g.baseline_y != g.row_y[0] + 0.5 * (g.row_y[1] - g.row_y[0])) o.fail("baseline at 1.5");
        auto three = layout(
            compile("\\begin{quantikz}[align equals at=2.25]\n& \\gate{A\\\\B} \\\\\n& \\qw \\\\\n& \\gate{C}\n\\end{quantikz}"),
            sheet);
        if (three.baseline_y != three.row_y[1] + 0.25 * (three.row_y[2] - three.row_y[1])) o.fail("baseline at 2.25");
    }
    if (o.ok) o.detail = fmt::format("equal pitch, ghost height, {} monotonic trials, fractional baseline", kMonotonicTrials);
    return o;
}

// 5. styles
Outcome style_system() {
    Outcome o;
    auto c = parse_color("blue!20");
    if (std::abs(c.r - 0.8) > kColorTol || std::abs(c.g - 0.8) > kColorTol || std::abs(c.b - 1.0) > kColorTol) {
        o.fail(fmt::format("blue!20 = ({}, {}, {})", c.r, c.g, c.b));
    }

    auto thin_src = slurp(kCorpus / "44_thin_lines.qtz");
    auto thin = scene_of(thin_src);
    auto plain = scene_of(replace_once(thin_src, "[thin lines]", ""));
    if (thin.primitives.size() != plain.primitives.size()) {
        o.fail("thin lines changed the primitive count");
    } else {
        for (std::size_t i = 0; i < thin.primitives.size(); ++i) {
            const auto &a = thin.primitives[i], &b = plain.primitives[i];
            if (a.shape != b.shape || a.role != b.role || a.style.stroke != b.style.stroke ||
                a.style.fill != b.style.fill || a.style.dashed != b.style.dashed) {
                o.fail("thin lines changed something besides line width");
            }
            if (a.style.line_width != b.style.line_width / 2) o.fail("line width not halved");
        }
    }

    auto transparent = scene_of(slurp(kCorpus / "45_transparent.qtz"));
    auto grouped = scene_of(
        "\\begin{quantikz}[transparent]\n& \\gategroup[wires=1,steps=2,background,style={fill=blue!20}]{g}\\gate{U} & "
        "\\meter{}\n\\end{quantikz}");
    for (const auto *s : {&transparent, &grouped}) {
        for (const auto &p : s->primitives) {
            if (!p.style.fill || p.role == "group") continue;
            bool rect = std::holds_alternative<RectPrim>(p.shape);
            bool box = p.role == "gate" || p.role.rfind("meter", 0) == 0;
            if ((rect || box) && !std::holds_alternative<TextPrim>(p.shape)) o.fail("opaque fill on " + p.role);
        }
    }
    int group_fills = 0;
    for (const auto &p : grouped.primitives) group_fills += p.role == "group" && p.style.fill.has_value();
    if (group_fills != 1) o.fail("explicit group fill lost under transparent");
    if (o.ok) o.detail = "blue!20, thin lines, transparent";
    return o;
}

// 6. converter
Outcome converter() {
    Outcome o;
    std::istringstream table(slurp(kFixtures / "convert" / "table.tsv"));
    std::string line;
    int rows = 0;
    const std::string q = "\\Qcircuit @C=1em @R=1em {", k = "\\begin{quantikz}[row sep=1em,col sep=1em]";
    while (std::getline(table, line)) {
        auto tab = line.find('\t');
        std::string from = line.substr(0, tab), to = line.substr(tab + 1);
        bool whole = from.rfind("\\QCircuit", 0) == 0;
        std::string in = whole ? from : q + from + "}";
        std::string want = whole ? to : k + to + "\\end{quantikz}";
        if (convert_qcircuit(in).output != want) o.fail("table row " + from);
        ++rows;
    }
    if (rows != 6) o.fail(fmt::format("{} table rows", rows));
    if (convert_qcircuit(slurp(kFixtures / "convert" / "teleport.tex")).output !=
        slurp(kFixtures / "convert" / "teleport.expected.qtz")) {
        o.fail("teleport.tex differs from expected");
    }

    fs::path tmp = fs::temp_directory_path() / fmt::format("qtkz_accept_{}.qtz", ::getpid());
    for (auto name : {"teleport.tex", "table_circuit.tex"}) {
        auto r = cli({"convert", (kFixtures / "convert" / name).string(), "-o", tmp.string()});
        if (r.status != kExitOk) o.fail(fmt::format("convert {} exit {}", name, r.status));
        auto l = cli({"lint", tmp.string()});
        if (l.status != kExitOk) o.fail(fmt::format("lint of converted {} exit {}", name, l.status));
        auto v = cli({"render", tmp.string()});
        if (v.status != kExitOk) o.fail(fmt::format("render of converted {} exit {}", name, v.status));
    }
    fs::remove(tmp);
    if (o.ok) o.detail = "6 table rows exact, round trip clean, exit 0";
    return o;
}

// 7. lints
Outcome lints() {
    Outcome o;
    int fixtures = 0;
    for (const auto &e : fs::directory_iterator(kFixtures / "lint")) {
        auto name = e.path().filename().string();
        std::string want = name.substr(0, 2);
        auto got = codes(validate(lower(parse_document(slurp(e.path())))), false);
        if (got != std::set<std::string>{want}) o.fail(name + " gave " + join(got));
        ++fixtures;
    }
    if (fixtures != 5) o.fail(fmt::format("{} lint fixtures", fixtures));

    auto expected = nlohmann::json::parse(slurp(kCorpus / "expected_lints.json"));
    for (const auto &f : corpus_files()) {
        auto name = f.filename().string();
        std::set<std::string> want;
        if (expected.contains(name)) {
            for (const auto &c : expected[name]) want.insert(c.get<std::string>());
        }
        auto got = codes(validate(lower(parse_document(slurp(f)))), true);
        if (got != want) o.fail(name + " gave " + join(got));
    }
    if (o.ok) o.detail = "L1..L5 fixtures exact, corpus clean";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 corpus parse", corpus_parse},
        {"2 golden scenes", golden_scenes},
        {"3a multiple qubits links", multiple_qubit_links},
        {"3b different connections", different_connections},
        {"3c slice all", slice_all},
        {"4 layout properties", layout_properties},
        {"5 style system", style_system},
        {"6 converter", converter},
        {"7 lints", lints},
    };
    int failed = 0;
    for (const auto &[name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception &e) {
            o.fail(std::string("exception: ") + e.what());
        }
        fmt::print("{} {}: {}\n", o.ok ? "PASS" : "FAIL", name, o.detail);
        failed += !o.ok;
    }
    return failed == 0 ? 0 : 1;
}
