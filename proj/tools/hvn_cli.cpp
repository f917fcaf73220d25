// Command-line front end; talks to the library exclusively through the C
// API in hvn.h.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "hvn.h"

namespace {

struct ConfigDeleter {
    void operator()(hvn_config* c) const { hvn_config_destroy(c); }
};
using ConfigPtr = std::unique_ptr<hvn_config, ConfigDeleter>;

int status_to_exit(hvn_status status) {
    switch (status) {
        case HVN_OK:
            return 0;
        case HVN_VERIFY_FAILED:
            return 1;
        case HVN_IO_ERROR:
            return 2;
        case HVN_CONFIG_ERROR:
        case HVN_INVALID_ARGUMENT:
            return 3;
        default:
            return 2;
    }
}

int fail(hvn_status status) {
    std::fprintf(stderr, "error: %s\n", hvn_last_error());
    return status_to_exit(status);
}

struct CommonFlags {
    std::string config_path;
    std::string seed;
    std::string out_dir;
    std::string repeats;
    bool timings = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file with defaults");
    cmd->add_option("--seed", flags.seed, "base seed (u64)");
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--repeats", flags.repeats, "average each row over this many seeds");
    cmd->add_flag("--timings", flags.timings,
                  "record real wall times in the CSV (breaks byte reproducibility)");
}

int apply_common(hvn_config* config, const CommonFlags& flags) {
    if (!flags.config_path.empty()) {
        hvn_status s = hvn_config_load_file(config, flags.config_path.c_str());
        if (s != HVN_OK) return fail(s);
    }
    struct {
        const char* key;
        const std::string& value;
    } overrides[] = {
        {"seed", flags.seed},
        {"out_dir", flags.out_dir},
        {"repeats", flags.repeats},
    };
    for (const auto& item : overrides) {
        if (item.value.empty()) continue;
        hvn_status s = hvn_config_set(config, item.key, item.value.c_str());
        if (s != HVN_OK) return fail(s);
    }
    if (flags.timings) {
        hvn_status s = hvn_config_set(config, "timings", "true");
        if (s != HVN_OK) return fail(s);
    }
    return -1;  // no error
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Covariance filters and networks on discretized signals"};
    app.set_version_flag("--version", hvn_version());
    app.require_subcommand(1);

    CommonFlags verify_flags, n_flags, snr_flags, ecg_flags;
    std::string ecg_train, ecg_test;
    std::string plot_csv, plot_out = ".";

    CLI::App* verify = app.add_subcommand("verify", "run the exact-identity suites");
    add_common(verify, verify_flags);

    CLI::App* nsweep = app.add_subcommand(
        "synth-n-sweep", "synthetic task: test accuracy against the bag size");
    add_common(nsweep, n_flags);

    CLI::App* snrsweep = app.add_subcommand(
        "synth-snr-sweep", "synthetic task: test accuracy against the noise level");
    add_common(snrsweep, snr_flags);

    CLI::App* ecg = app.add_subcommand(
        "ecg", "ECG5000 task: test accuracy against the discretization size");
    add_common(ecg, ecg_flags);
    ecg->add_option("--train", ecg_train, "UCR-format training split")->required();
    ecg->add_option("--test", ecg_test, "UCR-format test split")->required();

    CLI::App* plot = app.add_subcommand("plot", "render SVGs from a metrics CSV");
    plot->add_option("csv", plot_csv, "metrics.csv produced by a sweep")->required();
    plot->add_option("--out", plot_out, "directory for the SVG files");

    CLI11_PARSE(app, argc, argv);

    ConfigPtr config(hvn_config_create());
    if (!config) {
        std::fprintf(stderr, "error: out of memory\n");
        return 2;
    }

    if (verify->parsed()) {
        int rc = apply_common(config.get(), verify_flags);
        if (rc >= 0) return rc;
        char* report = nullptr;
        hvn_status s = hvn_run_verify(config.get(), &report);
        if (report != nullptr) {
            std::fputs(report, stdout);
            hvn_string_free(report);
        }
        if (s != HVN_OK && s != HVN_VERIFY_FAILED) return fail(s);
        return status_to_exit(s);
    }

    if (nsweep->parsed() || snrsweep->parsed()) {
        const CommonFlags& flags = nsweep->parsed() ? n_flags : snr_flags;
        int rc = apply_common(config.get(), flags);
        if (rc >= 0) return rc;
        hvn_status s = hvn_run_synth_sweep(config.get(),
                                           nsweep->parsed() ? "n" : "snr_db");
        if (s != HVN_OK) return fail(s);
        return 0;
    }

    if (ecg->parsed()) {
        int rc = apply_common(config.get(), ecg_flags);
        if (rc >= 0) return rc;
        hvn_status s = hvn_config_set(config.get(), "ecg_train_path", ecg_train.c_str());
        if (s != HVN_OK) return fail(s);
        s = hvn_config_set(config.get(), "ecg_test_path", ecg_test.c_str());
        if (s != HVN_OK) return fail(s);
        s = hvn_run_ecg(config.get());
        if (s != HVN_OK) return fail(s);
        return 0;
    }

    // plot
    hvn_status s = hvn_emit_plots(plot_csv.c_str(), plot_out.c_str());
    if (s != HVN_OK) return fail(s);
    return 0;
}
