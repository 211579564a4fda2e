#pragma once

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "orbispec/io.hpp"
#include "orbispec/parallel.hpp"

namespace orbispec {

enum class Command {
    Validate,
    Spectrum,
    Compare,
    Strata,
    Heat,
    TraceCheck,
    Krawtchouk,
    Catalog,
};

enum class OutputFormat { Json, Csv };

struct RunConfig {
    Command command = Command::Validate;
    std::string group_a;
    std::string group_b;
    int p = 0;
    Rational max_norm2 = Rational(4);
    std::vector<double> t_list;
    OutputFormat format = OutputFormat::Json;
    std::size_t enum_cap = 10'000'000;
    unsigned threads = 0; // 0 = hardware default
    // krawtchouk
    int kraw_d = 0;
    int kraw_p = 0;
    std::optional<int> kraw_k;
    bool kraw_zeros = false;
    // catalog
    bool catalog_list = false;
    std::string catalog_emit;
    // raw option storage; parsed in the subcommand callbacks
    std::string max_norm2_str = "4";
    std::string format_str = "json";
    std::string kraw_k_str;
};

// Builds the CLI11 application around a RunConfig. Kept separate from main()
// so tests can drive parsing and execution directly.
inline std::unique_ptr<CLI::App> make_cli(RunConfig& cfg) {
    auto app = std::make_unique<CLI::App>(
        "orbispec: exact Hodge-Laplacian spectra of flat crystallographic orbifolds");
    app->require_subcommand(1);
    app->add_option("--threads", cfg.threads, "worker thread count (default: hardware)");
    app->add_option("--cap", cfg.enum_cap, "lattice enumeration vector cap");

    auto add_norm = [&cfg](CLI::App* sub) {
        sub->add_option("--max-norm2", cfg.max_norm2_str, "squared-norm bound (rational)");
    };

    CLI::App* validate = app->add_subcommand("validate", "validate a group file");
    validate->add_option("file", cfg.group_a, "group JSON file")->required();
    validate->callback([&cfg]() { cfg.command = Command::Validate; });

    CLI::App* spectrum = app->add_subcommand("spectrum", "exact p-spectrum table");
    spectrum->add_option("--group", cfg.group_a, "group JSON file")->required();
    spectrum->add_option("--p", cfg.p, "form degree")->required();
    add_norm(spectrum);
    spectrum->add_option("--format", cfg.format_str, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    spectrum->callback([&cfg]() {
        cfg.command = Command::Spectrum;
        cfg.format = cfg.format_str == "csv" ? OutputFormat::Csv : OutputFormat::Json;
        cfg.max_norm2 = parse_rational(cfg.max_norm2_str);
    });

    CLI::App* compare = app->add_subcommand("compare", "exact isospectrality comparison");
    compare->add_option("--a", cfg.group_a, "first group JSON file")->required();
    compare->add_option("--b", cfg.group_b, "second group JSON file")->required();
    compare->add_option("--p", cfg.p, "form degree")->required();
    add_norm(compare);
    compare->callback([&cfg]() {
        cfg.command = Command::Compare;
        cfg.max_norm2 = parse_rational(cfg.max_norm2_str);
    });

    CLI::App* strata_cmd = app->add_subcommand("strata", "singular strata of the quotient");
    strata_cmd->add_option("--group", cfg.group_a, "group JSON file")->required();
    strata_cmd->callback([&cfg]() { cfg.command = Command::Strata; });

    CLI::App* heat = app->add_subcommand("heat", "heat-trace expansion and parity invariants");
    heat->add_option("--group", cfg.group_a, "group JSON file")->required();
    heat->add_option("--p", cfg.p, "form degree")->required();
    heat->callback([&cfg]() { cfg.command = Command::Heat; });

    CLI::App* trace = app->add_subcommand("trace-check", "truncated trace vs expansion");
    trace->add_option("--group", cfg.group_a, "group JSON file")->required();
    trace->add_option("--p", cfg.p, "form degree")->required();
    trace->add_option("--t", cfg.t_list, "time values (repeatable)");
    add_norm(trace);
    trace->callback([&cfg]() {
        cfg.command = Command::TraceCheck;
        cfg.max_norm2 = parse_rational(cfg.max_norm2_str);
        if (cfg.t_list.empty()) cfg.t_list = {0.05};
    });

    CLI::App* kraw = app->add_subcommand("krawtchouk", "exact Krawtchouk values and zeros");
    kraw->add_option("--d", cfg.kraw_d, "dimension")->required();
    kraw->add_option("--p", cfg.kraw_p, "degree")->required();
    kraw->add_option("--k", cfg.kraw_k_str, "integer argument");
    kraw->add_flag("--zeros", cfg.kraw_zeros, "list all integer zeros in [0, d]");
    kraw->callback([&cfg]() {
        cfg.command = Command::Krawtchouk;
        if (!cfg.kraw_k_str.empty()) cfg.kraw_k = std::stoi(cfg.kraw_k_str);
    });

    CLI::App* cat = app->add_subcommand("catalog", "built-in example constructions");
    cat->add_flag("--list", cfg.catalog_list, "list catalog entries");
    cat->add_option("--emit", cfg.catalog_emit, "emit the named entry as group JSON");
    cat->callback([&cfg]() { cfg.command = Command::Catalog; });

    return app;
}

namespace detail {

inline int run_impl(const RunConfig& cfg, std::ostream& out) {
    unsigned threads = cfg.threads == 0 ? default_thread_count() : cfg.threads;
    switch (cfg.command) {
    case Command::Validate: {
        CrystalGroup g = load_group_file(cfg.group_a);
        json j;
        j["valid"] = true;
        j["dimension"] = g.dim();
        j["holonomy_order"] = g.order();
        out << j.dump(2) << '\n';
        return 0;
    }
    case Command::Spectrum: {
        CrystalGroup g = load_group_file(cfg.group_a);
        SpectrumTable t = spectrum_table(g, cfg.p, cfg.max_norm2, {cfg.enum_cap, threads});
        if (cfg.format == OutputFormat::Csv)
            out << spectrum_to_csv(t);
        else
            out << spectrum_to_json(t).dump(2) << '\n';
        return 0;
    }
    case Command::Compare: {
        CrystalGroup a = load_group_file(cfg.group_a);
        CrystalGroup b = load_group_file(cfg.group_b);
        SpectrumTable ta = spectrum_table(a, cfg.p, cfg.max_norm2, {cfg.enum_cap, threads});
        SpectrumTable tb = spectrum_table(b, cfg.p, cfg.max_norm2, {cfg.enum_cap, threads});
        CompareResult r = isospectral_compare(ta, tb);
        out << compare_to_json(r, cfg.p, cfg.max_norm2).dump(2) << '\n';
        return 0;
    }
    case Command::Strata: {
        CrystalGroup g = load_group_file(cfg.group_a);
        out << strata_to_json(strata(g)).dump(2) << '\n';
        return 0;
    }
    case Command::Heat: {
        CrystalGroup g = load_group_file(cfg.group_a);
        out << heat_to_json(g, cfg.p).dump(2) << '\n';
        return 0;
    }
    case Command::TraceCheck: {
        CrystalGroup g = load_group_file(cfg.group_a);
        std::vector<Stratum> st = strata(g);
        AsymptoticExpansion exp = assemble_expansion(g, st, cfg.p);
        TraceOptions topts;
        topts.cap = cfg.enum_cap;
        topts.threads = threads;
        json results = json::array();
        for (double t : cfg.t_list) {
            TraceSample s = truncated_trace(g, cfg.p, t, cfg.max_norm2, topts);
            results.push_back(trace_check_to_json(s, exp.evaluate(t)));
        }
        if (results.size() == 1)
            out << results[0].dump(2) << '\n';
        else
            out << results.dump(2) << '\n';
        return 0;
    }
    case Command::Krawtchouk: {
        json j;
        j["d"] = cfg.kraw_d;
        j["p"] = cfg.kraw_p;
        if (cfg.kraw_zeros) {
            json zs = json::array();
            for (int z : integer_zeros(cfg.kraw_d, cfg.kraw_p)) zs.push_back(z);
            j["zeros"] = zs;
        } else if (cfg.kraw_k) {
            j["k"] = *cfg.kraw_k;
            j["value"] = to_string(krawtchouk(cfg.kraw_d, cfg.kraw_p, *cfg.kraw_k));
        } else {
            throw SchemaError("krawtchouk needs --k or --zeros");
        }
        out << j.dump(2) << '\n';
        return 0;
    }
    case Command::Catalog: {
        if (!cfg.catalog_emit.empty()) {
            auto e = catalog_by_name(cfg.catalog_emit);
            if (!e) throw SchemaError("unknown catalog entry '" + cfg.catalog_emit + "'");
            out << group_to_json(e->group).dump(2) << '\n';
            return 0;
        }
        json arr = json::array();
        for (const auto& e : standard_catalog()) {
            json j;
            j["name"] = e.name;
            j["description"] = e.description;
            arr.push_back(j);
        }
        out << arr.dump(2) << '\n';
        return 0;
    }
    }
    return 1;
}

} // namespace detail

// Exit codes: 0 success, 2 input-validation failure (structured report),
// 1 internal error.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        return detail::run_impl(cfg, out);
    } catch (const InputError& e) {
        json j;
        json detail;
        detail["type"] = error_tag(e);
        detail["message"] = e.what();
        if (!cfg.group_a.empty()) detail["file"] = cfg.group_a;
        j["error"] = detail;
        out << j.dump(2) << '\n';
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        json j;
        json detail;
        detail["type"] = "Internal";
        detail["message"] = e.what();
        j["error"] = detail;
        out << j.dump(2) << '\n';
        err << "internal error: " << e.what() << '\n';
        return 1;
    }
}

// argv-level entry used by the binary and by the determinism tests.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    auto app = make_cli(cfg);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app->parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app->help();
            return 0;
        }
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return run(cfg, out, err);
}

} // namespace orbispec
