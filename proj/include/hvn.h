/* C interface to the covariance-network library: opaque configuration
 * handles, status codes, and the experiment entry points the CLI is built
 * on. All functions are thread-safe; error messages are per-thread. */

#ifndef HVN_H
#define HVN_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hvn_status {
    HVN_OK = 0,
    HVN_VERIFY_FAILED = 1,
    HVN_IO_ERROR = 2,
    HVN_CONFIG_ERROR = 3,
    HVN_INVALID_ARGUMENT = 4,
    HVN_INTERNAL_ERROR = 5
} hvn_status;

/* Opaque experiment configuration; starts from the documented defaults. */
typedef struct hvn_config hvn_config;

const char* hvn_version(void);

hvn_config* hvn_config_create(void);
void hvn_config_destroy(hvn_config* config);

/* Merge a JSON config file into the handle. */
hvn_status hvn_config_load_file(hvn_config* config, const char* path);

/* Override one key, e.g. ("seed", "42") or ("n_sweep", "8,16,24"). */
hvn_status hvn_config_set(hvn_config* config, const char* key, const char* value);

/* Message of the calling thread's last failure; empty when none. */
const char* hvn_last_error(void);

/* Exact-identity verification. *report_out (optional) receives a malloc'd
 * report; free it with hvn_string_free. Returns HVN_VERIFY_FAILED when an
 * identity family misses its tolerance. */
hvn_status hvn_run_verify(const hvn_config* config, char** report_out);

/* Synthetic classification sweeps; sweep is "n" or "snr_db". Writes
 * metrics.csv and a plot under the configured output directory. */
hvn_status hvn_run_synth_sweep(const hvn_config* config, const char* sweep);

/* ECG benchmark over the configured discretization sweep; requires the
 * ecg_train_path / ecg_test_path keys. */
hvn_status hvn_run_ecg(const hvn_config* config);

/* Render one SVG per task found in a metrics CSV into out_dir. */
hvn_status hvn_emit_plots(const char* csv_path, const char* out_dir);

void hvn_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* HVN_H */
