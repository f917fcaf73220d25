#include "hvn.h"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

#include "hvn/errors.hpp"
#include "hvn/experiments.hpp"
#include "hvn/plot.hpp"

struct hvn_config {
    hvn::ExperimentConfig inner;
};

namespace {

thread_local std::string g_last_error;

hvn_status to_status(const std::exception& e) {
    g_last_error = e.what();
    if (dynamic_cast<const hvn::ConfigError*>(&e)) return HVN_CONFIG_ERROR;
    if (dynamic_cast<const hvn::IoError*>(&e)) return HVN_IO_ERROR;
    if (dynamic_cast<const hvn::ParseError*>(&e)) return HVN_IO_ERROR;
    if (dynamic_cast<const hvn::Error*>(&e)) return HVN_INVALID_ARGUMENT;
    return HVN_INTERNAL_ERROR;
}

template <typename Fn>
hvn_status guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const std::exception& e) {
        return to_status(e);
    } catch (...) {
        g_last_error = "unknown error";
        return HVN_INTERNAL_ERROR;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* hvn_version(void) { return "1.0.0"; }

hvn_config* hvn_config_create(void) {
    try {
        return new hvn_config{};
    } catch (...) {
        return nullptr;
    }
}

void hvn_config_destroy(hvn_config* config) { delete config; }

hvn_status hvn_config_load_file(hvn_config* config, const char* path) {
    if (config == nullptr || path == nullptr) {
        g_last_error = "null argument";
        return HVN_INVALID_ARGUMENT;
    }
    return guarded([&]() {
        config->inner.load_json_file(path);
        return HVN_OK;
    });
}

hvn_status hvn_config_set(hvn_config* config, const char* key, const char* value) {
    if (config == nullptr || key == nullptr || value == nullptr) {
        g_last_error = "null argument";
        return HVN_INVALID_ARGUMENT;
    }
    return guarded([&]() {
        config->inner.set_key(key, value);
        return HVN_OK;
    });
}

const char* hvn_last_error(void) { return g_last_error.c_str(); }

hvn_status hvn_run_verify(const hvn_config* config, char** report_out) {
    if (report_out != nullptr) *report_out = nullptr;
    return guarded([&]() {
        std::uint64_t seed = config != nullptr ? config->inner.seed : 0;
        hvn::VerifyReport report = hvn::run_verify(seed);
        if (report_out != nullptr) *report_out = dup_string(report.text());
        if (!report.pass) {
            g_last_error = "verification failed";
            return HVN_VERIFY_FAILED;
        }
        return HVN_OK;
    });
}

hvn_status hvn_run_synth_sweep(const hvn_config* config, const char* sweep) {
    if (config == nullptr || sweep == nullptr) {
        g_last_error = "null argument";
        return HVN_INVALID_ARGUMENT;
    }
    return guarded([&]() {
        hvn::run_synth_sweep(config->inner, sweep, &std::cerr);
        return HVN_OK;
    });
}

hvn_status hvn_run_ecg(const hvn_config* config) {
    if (config == nullptr) {
        g_last_error = "null argument";
        return HVN_INVALID_ARGUMENT;
    }
    return guarded([&]() {
        hvn::run_ecg(config->inner, &std::cerr);
        return HVN_OK;
    });
}

hvn_status hvn_emit_plots(const char* csv_path, const char* out_dir) {
    if (csv_path == nullptr || out_dir == nullptr) {
        g_last_error = "null argument";
        return HVN_INVALID_ARGUMENT;
    }
    return guarded([&]() {
        hvn::emit_task_plots(csv_path, out_dir);
        return HVN_OK;
    });
}

void hvn_string_free(char* s) { std::free(s); }

}  // extern "C"
