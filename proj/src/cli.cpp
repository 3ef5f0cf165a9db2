#include "qtkz/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "qtkz/convert.hpp"
#include "qtkz/error.hpp"
#include "qtkz/layout.hpp"
#include "qtkz/model.hpp"
#include "qtkz/scene.hpp"

namespace qtkz {

namespace fs = std::filesystem;

namespace {

constexpr const char *kConfigName = ".qtkzrc.json";
constexpr const char *kStylesEnv = "QTKZ_STYLES";

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_text(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw IoError(fmt::format("cannot read {}", p.string()));
    std::ostringstream ss;
    ss << f.rdbuf();
    if (f.bad()) throw IoError(fmt::format("cannot read {}", p.string()));
    return ss.str();
}

bool is_stdin(const fs::path &p) { return p.empty() || p == "-"; }

std::string display_name(const fs::path &p) { return is_stdin(p) ? "<stdin>" : p.string(); }

// Later statuses win in this order: I/O, error, lint.
int worst(int a, int b) {
    auto rank = [](int s) {
        switch (s) {
            case kExitIo: return 3;
            case kExitError: return 2;
            case kExitLint: return 1;
            default: return 0;
        }
    };
    return rank(a) >= rank(b) ? a : b;
}

std::string lint_line(const std::string &file, const Lint &l) {
    return fmt::format("{}:{}:{} {} {}", file, l.row + 1, l.col + 1, l.code, l.message);
}

// Every .qtz file directly inside `dir`, sorted.
std::vector<fs::path> qtz_files(const fs::path &dir) {
    std::vector<fs::path> out;
    for (const auto &e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".qtz") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Runs `task(i)` for i in [0, n) on up to `jobs` threads.
template <class Task>
void parallel_for(std::size_t n, unsigned jobs, Task task) {
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) task(i);
        });
    }
    for (auto &th : pool) th.join();
}

class Runner {
   public:
    Runner(RunConfig config, std::istream &in, std::ostream &out, std::ostream &err)
        : config_(std::move(config)), in_(in), out_(out), err_(err) {}

    int render() {
        StyleSheet base;
        if (int s = load_base_styles(base)) return s;
        fs::path input = config_.inputs.empty() ? fs::path("-") : config_.inputs.front();
        if (!is_stdin(input) && fs::is_directory(input)) return render_dir(input, base);

        std::string source;
        try {
            source = is_stdin(input) ? slurp_stdin() : read_text(input);
        } catch (const IoError &e) {
            err_ << "error: " << e.what() << "\n";
            return kExitIo;
        }
        std::ostringstream log;
        std::string doc;
        int status = render_source(display_name(input), input, source, base, doc, log);
        err_ << log.str();
        if (status == kExitError) return status;
        if (config_.output) {
            if (!write_atomic(*config_.output, doc)) {
                err_ << fmt::format("error: cannot write {}\n", config_.output->string());
                return kExitIo;
            }
        } else {
            out_ << doc;
        }
        return status;
    }

    int lint() {
        std::vector<fs::path> files;
        if (config_.inputs.empty()) config_.inputs.push_back("-");
        for (const auto &p : config_.inputs) {
            if (!is_stdin(p) && fs::is_directory(p)) {
                auto more = qtz_files(p);
                files.insert(files.end(), more.begin(), more.end());
            } else {
                files.push_back(p);
            }
        }
        int status = kExitOk;
        for (const auto &f : files) {
            std::string source;
            try {
                source = is_stdin(f) ? slurp_stdin() : read_text(f);
            } catch (const IoError &e) {
                err_ << "error: " << e.what() << "\n";
                status = worst(status, kExitIo);
                continue;
            }
            try {
                auto lints = validate(lower(parse_document(source)));
                for (const auto &l : lints) {
                    out_ << lint_line(display_name(f), l) << "\n";
                    if (l.severity == LintSeverity::Warning) status = worst(status, kExitLint);
                }
            } catch (const Error &e) {
                err_ << e.describe(display_name(f), source) << "\n";
                status = worst(status, kExitError);
            }
        }
        return status;
    }

    int convert() {
        fs::path input = config_.inputs.empty() ? fs::path("-") : config_.inputs.front();
        std::string source;
        try {
            source = is_stdin(input) ? slurp_stdin() : read_text(input);
        } catch (const IoError &e) {
            err_ << "error: " << e.what() << "\n";
            return kExitIo;
        }
        ConvertResult result;
        try {
            result = convert_qcircuit(source);
        } catch (const Error &e) {
            err_ << e.describe(display_name(input), source) << "\n";
            return kExitError;
        }
        for (const auto &n : result.notes) err_ << display_name(input) << ": warning: " << n << "\n";
        if (config_.output) {
            if (!write_atomic(*config_.output, result.output)) {
                err_ << fmt::format("error: cannot write {}\n", config_.output->string());
                return kExitIo;
            }
        } else {
            out_ << result.output;
        }
        return kExitOk;
    }

   private:
    RunConfig config_;
    std::istream &in_;
    std::ostream &out_;
    std::ostream &err_;

    std::string slurp_stdin() {
        std::ostringstream ss;
        ss << in_.rdbuf();
        return ss.str();
    }

    int load_base_styles(StyleSheet &sheet) {
        std::optional<fs::path> path = config_.styles;
        if (!path) {
            if (const char *env = std::getenv(kStylesEnv); env && *env) path = fs::path(env);
        }
        if (!path) return kExitOk;
        try {
            auto unknown = load_stylesheet_json(read_text(*path), sheet);
            for (const auto &k : unknown) err_ << fmt::format("{}: warning: unknown style key '{}'\n", path->string(), k);
        } catch (const IoError &e) {
            err_ << "error: " << e.what() << "\n";
            return kExitIo;
        } catch (const Error &e) {
            err_ << fmt::format("{}: error: {}\n", path->string(), e.what());
            return kExitError;
        }
        return kExitOk;
    }

    // Parses and draws one document. A `<stem>.styles.json` beside the input
    // is layered over the base stylesheet.
    int render_source(const std::string &name, const fs::path &input, const std::string &source,
                      const StyleSheet &base, std::string &doc, std::ostream &log) const {
        StyleSheet sheet = base;
        try {
            if (!is_stdin(input)) {
                fs::path sibling = input;
                sibling.replace_extension(".styles.json");
                if (fs::exists(sibling)) {
                    for (const auto &k : load_stylesheet_json(read_text(sibling), sheet)) {
                        log << fmt::format("{}: warning: unknown style key '{}'\n", sibling.string(), k);
                    }
                }
            }
            auto grid = lower(parse_document(source));
            auto lints = validate(grid);
            auto circuit = resolve(grid);
            auto geometry = layout(circuit, sheet);
            lints.insert(lints.end(), geometry.warnings.begin(), geometry.warnings.end());
            bool warned = false;
            for (const auto &l : lints) {
                log << lint_line(name, l) << "\n";
                warned = warned || l.severity == LintSeverity::Warning;
            }
            auto scene = build_scene(circuit, geometry, sheet);
            doc = config_.format == OutputFormat::Json ? emit_json(scene) + "\n" : emit_svg(scene, config_.scale);
            return config_.lint_as_errors && warned ? kExitLint : kExitOk;
        } catch (const Error &e) {
            log << e.describe(name, source) << "\n";
            return kExitError;
        } catch (const IoError &e) {
            log << "error: " << e.what() << "\n";
            return kExitIo;
        }
    }

    int render_dir(const fs::path &dir, const StyleSheet &base) {
        auto files = qtz_files(dir);
        const char *ext = config_.format == OutputFormat::Json ? ".json" : ".svg";
        if (config_.output) {
            std::error_code ec;
            fs::create_directories(*config_.output, ec);
            if (ec) {
                err_ << fmt::format("error: cannot create {}\n", config_.output->string());
                return kExitIo;
            }
        }
        std::vector<std::string> logs(files.size());
        std::vector<int> statuses(files.size(), kExitOk);
        parallel_for(files.size(), config_.jobs, [&](std::size_t i) {
            std::ostringstream log;
            fs::path target = files[i];
            target.replace_extension(ext);
            if (config_.output) target = *config_.output / target.filename();
            std::string source, doc;
            try {
                source = read_text(files[i]);
            } catch (const IoError &e) {
                logs[i] = fmt::format("error: {}\n", e.what());
                statuses[i] = kExitIo;
                return;
            }
            int status = render_source(files[i].string(), files[i], source, base, doc, log);
            if (status != kExitError && status != kExitIo && !write_atomic(target, doc)) {
                log << fmt::format("error: cannot write {}\n", target.string());
                status = kExitIo;
            }
            logs[i] = log.str();
            statuses[i] = status;
        });
        int status = kExitOk;
        for (std::size_t i = 0; i < files.size(); ++i) {
            err_ << logs[i];
            status = worst(status, statuses[i]);
        }
        return status;
    }
};

}  // namespace

std::vector<std::string> apply_config_json(const std::string &json_text, RunConfig &config) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception &e) {
        throw std::runtime_error(std::string("malformed configuration: ") + e.what());
    }
    if (!j.is_object()) throw std::runtime_error("configuration must be a JSON object");
    std::vector<std::string> unknown;
    try {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const auto &k = it.key();
            const auto &v = it.value();
            if (k == "format") {
                auto f = v.get<std::string>();
                if (f == "svg") {
                    config.format = OutputFormat::Svg;
                } else if (f == "json") {
                    config.format = OutputFormat::Json;
                } else {
                    throw std::runtime_error("format must be svg or json");
                }
            } else if (k == "scale") {
                double s = v.get<double>();
                if (!(s > 0)) throw std::runtime_error("scale must be positive");
                config.scale = s;
            } else if (k == "styles") {
                config.styles = fs::path(v.get<std::string>());
            } else if (k == "output") {
                config.output = fs::path(v.get<std::string>());
            } else if (k == "strict" || k == "lint_as_errors") {
                config.lint_as_errors = v.get<bool>();
            } else if (k == "jobs") {
                config.jobs = v.get<unsigned>();
            } else {
                unknown.push_back(k);
            }
        }
    } catch (const nlohmann::json::exception &e) {
        throw std::runtime_error(std::string("bad configuration value: ") + e.what());
    }
    return unknown;
}

bool write_atomic(const fs::path &path, const std::string &data) {
    static std::atomic<unsigned> counter{0};
    fs::path tmp = path;
    tmp += fmt::format(".tmp{}-{}", std::hash<std::thread::id>{}(std::this_thread::get_id()) % 100000, counter++);
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) return false;
        f << data;
        f.close();
        if (!f) {
            std::error_code ec;
            fs::remove(tmp, ec);
            return false;
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        return false;
    }
    return true;
}

int run_cli(int argc, const char *const *argv, std::istream &in, std::ostream &out, std::ostream &err) {
    CLI::App app{"quantikz circuit compiler"};
    app.require_subcommand(1);

    RunConfig flags;
    std::vector<std::string> inputs;
    std::string output, styles, format, config_path;
    double scale = 1.0;
    bool strict = false;
    unsigned jobs = 0;

    auto *render = app.add_subcommand("render", "draw a circuit as SVG or JSON");
    auto *lint = app.add_subcommand("lint", "report suspicious constructs");
    auto *convert = app.add_subcommand("convert", "translate QCircuit source to quantikz");

    std::vector<CLI::Option *> o_output, o_styles, o_format, o_scale, o_strict, o_jobs;
    for (auto *sub : {render, lint, convert}) {
        sub->add_option("input", inputs, "input file or directory (default: stdin)");
        sub->add_option("--config", config_path, "configuration file (default: ./.qtkzrc.json)");
    }
    for (auto *sub : {render, convert}) o_output.push_back(sub->add_option("-o,--output", output, "output path"));
    o_format.push_back(
        render->add_option("--format", format, "svg or json")->check(CLI::IsMember({"svg", "json"})));
    o_scale.push_back(render->add_option("--scale", scale, "1 unit = 0.35*scale px")->check(CLI::PositiveNumber));
    o_jobs.push_back(render->add_option("-j,--jobs", jobs, "worker threads for directory input"));
    for (auto *sub : {render, lint}) {
        o_styles.push_back(sub->add_option("--styles", styles, "stylesheet JSON"));
        o_strict.push_back(sub->add_flag("--strict", strict, "treat lint warnings as failure"));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }

    RunConfig config;
    fs::path cfg = config_path.empty() ? fs::path(kConfigName) : fs::path(config_path);
    if (!config_path.empty() || fs::exists(cfg)) {
        try {
            for (const auto &k : apply_config_json(read_text(cfg), config)) {
                err << fmt::format("{}: warning: unknown key '{}'\n", cfg.string(), k);
            }
        } catch (const IoError &e) {
            err << "error: " << e.what() << "\n";
            return kExitIo;
        } catch (const std::runtime_error &e) {
            err << fmt::format("{}: error: {}\n", cfg.string(), e.what());
            return kExitError;
        }
    }

    auto given = [](const std::vector<CLI::Option *> &opts) {
        return std::any_of(opts.begin(), opts.end(), [](CLI::Option *o) { return o->count() > 0; });
    };
    for (const auto &i : inputs) config.inputs.emplace_back(i);
    if (given(o_output)) config.output = fs::path(output);
    if (given(o_styles)) config.styles = fs::path(styles);
    if (given(o_format)) config.format = format == "json" ? OutputFormat::Json : OutputFormat::Svg;
    if (given(o_scale)) config.scale = scale;
    if (given(o_strict)) config.lint_as_errors = strict;
    if (given(o_jobs)) config.jobs = jobs;

    Runner runner(config, in, out, err);
    if (*render) return runner.render();
    if (*lint) return runner.lint();
    return runner.convert();
}

}  // namespace qtkz
