#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hvn/experiments.hpp"
#include "hvn/network.hpp"
#include "hvn/plot.hpp"
#include "hvn/rng.hpp"

using hvn::ExperimentConfig;
using hvn::MetricRow;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

ExperimentConfig tiny_synth_config(const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.channels = 2;
    cfg.bins = 4;
    cfg.grid_size = 32;
    cfg.train_bags = 8;
    cfg.test_bags = 4;
    cfg.samples_per_bag = 4;
    cfg.epochs = 3;
    cfg.width = 4;
    cfg.head_hidden = 8;
    cfg.fpca_scores = 3;
    cfg.n_sweep = {4, 6};
    cfg.snr_sweep = {0, 30};
    cfg.seed = 31;
    cfg.out_dir = out_dir;
    return cfg;
}

// UCR-style fixture with three classes and sinusoid-vs-noise structure.
void write_ecg_fixture(const std::string& train_path, const std::string& test_path) {
    hvn::Rng rng(88);
    auto make_rows = [&](int count) {
        std::ostringstream out;
        for (int i = 0; i < count; ++i) {
            int label = 1 + (i % 3);
            out << label;
            for (int t = 0; t < 30; ++t) {
                double base = label == 1   ? std::sin(0.5 * t)
                              : label == 2 ? std::cos(0.4 * t)
                                           : 0.2 * t / 30.0;
                out << '\t' << base + 0.05 * rng.normal();
            }
            out << '\n';
        }
        return out.str();
    };
    write_file(train_path, make_rows(30));
    write_file(test_path, make_rows(15));
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("config defaults match the documented protocol") {
    ExperimentConfig cfg;
    CHECK(cfg.channels == 4);
    CHECK(cfg.bins == 32);
    CHECK(cfg.samples_per_bag == 24);
    CHECK(cfg.snr_db == 30.0);
    CHECK(cfg.taps == 2);
    CHECK(cfg.layers == 2);
    CHECK(cfg.width == 32);
    CHECK(cfg.epochs == 200);
    // the sweeps bracket the paper's fixed points
    CHECK(std::count(cfg.n_sweep.begin(), cfg.n_sweep.end(), 24.0) == 1);
    CHECK(std::count(cfg.snr_sweep.begin(), cfg.snr_sweep.end(), 30.0) == 1);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config json and key overrides") {
    ExperimentConfig cfg;
    cfg.load_json_text(R"({"epochs": 17, "phi": 0.5, "models": ["hvn"],
                           "n_sweep": [4, 8], "timings": true, "seed": 99})");
    CHECK(cfg.epochs == 17);
    CHECK(cfg.phi == 0.5);
    CHECK(cfg.models.size() == 1);
    CHECK(cfg.n_sweep == std::vector<double>{4, 8});
    CHECK(cfg.timings);
    CHECK(cfg.seed == 99);

    cfg.set_key("width", "16");
    CHECK(cfg.width == 16);
    cfg.set_key("snr_sweep", "1,2,3");
    CHECK(cfg.snr_sweep == std::vector<double>{1, 2, 3});
    cfg.set_key("out_dir", "/tmp/somewhere");
    CHECK(cfg.out_dir == "/tmp/somewhere");

    CHECK_THROWS_AS(cfg.load_json_text(R"({"no_such_key": 1})"), hvn::ConfigError);
    CHECK_THROWS_AS(cfg.load_json_text("not json"), hvn::ConfigError);
    CHECK_THROWS_AS(cfg.set_key("epochs", "abc"), hvn::ConfigError);

    ExperimentConfig bad;
    bad.models = {"transformer"};
    CHECK_THROWS_AS(bad.validate(), hvn::ConfigError);
}

TEST_CASE("metrics csv round-trip and byte determinism") {
    std::vector<MetricRow> rows;
    MetricRow a;
    a.task = "synth-n-sweep";
    a.model = "hvn";
    a.sweep_name = "n";
    a.sweep_value = 24;
    a.seed = 7;
    a.train_acc = 0.9875;
    a.test_acc = 0.8525;
    a.final_loss = 0.31459;
    a.wall_ms = 0;
    rows.push_back(a);
    MetricRow b = a;
    b.model = "mlp";
    b.test_acc = 0.625;
    rows.push_back(b);

    std::string path = "/tmp/hvn_metrics_test.csv";
    hvn::write_metrics_csv(path, rows);
    std::string bytes1 = read_file(path);
    hvn::write_metrics_csv(path, rows);
    CHECK(read_file(path) == bytes1);
    CHECK(bytes1.rfind("task,model,sweep_name,sweep_value,seed,train_acc,test_acc,"
                       "final_loss,wall_ms\n", 0) == 0);

    auto parsed = hvn::read_metrics_csv(path);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].model == "hvn");
    CHECK(parsed[0].sweep_value == 24.0);
    CHECK(parsed[0].test_acc == doctest::Approx(0.8525).epsilon(1e-9));
    CHECK(parsed[1].model == "mlp");
    CHECK(!parsed[0].test_acc_std.has_value());
    std::remove(path.c_str());
}

TEST_CASE("verification suite passes and covers three identity families") {
    hvn::VerifyReport report = hvn::run_verify(0);
    REQUIRE(report.families.size() == 3);
    CHECK(report.families[0].name == "eigenspace-recovery");
    CHECK(report.families[0].instances >= 101);  // includes the degenerate case
    CHECK(report.families[1].name == "covariance-compression");
    CHECK(report.families[1].instances >= 100);
    CHECK(report.families[2].name == "pointwise-filtering");
    CHECK(report.families[2].instances >= 100);
    for (const auto& family : report.families) {
        CHECK(family.pass);
        CHECK(family.worst_residual <= family.tolerance);
    }
    CHECK(report.pass);
    CHECK(report.text().find("PASSED") != std::string::npos);
}

TEST_CASE("synthetic sweep produces deterministic outputs") {
    std::string out_dir = "/tmp/hvn_synth_test";
    std::filesystem::remove_all(out_dir);
    ExperimentConfig cfg = tiny_synth_config(out_dir);

    auto rows = hvn::run_synth_sweep(cfg, "n", nullptr);
    REQUIRE(rows.size() == 6);  // 2 sweep values x 3 models
    for (const auto& row : rows) {
        CHECK(row.task == "synth-n-sweep");
        CHECK(row.sweep_name == "n");
        CHECK(row.train_acc >= 0.0);
        CHECK(row.train_acc <= 1.0);
        CHECK(row.test_acc >= 0.0);
        CHECK(row.test_acc <= 1.0);
        CHECK(row.wall_ms == 0);  // timings off by default
    }
    std::string csv = read_file(out_dir + "/metrics.csv");
    CHECK(std::filesystem::exists(out_dir + "/synth-n-sweep.svg"));

    auto rows2 = hvn::run_synth_sweep(cfg, "n", nullptr);
    CHECK(read_file(out_dir + "/metrics.csv") == csv);

    // distinct seeds change the data
    cfg.seed = 32;
    hvn::run_synth_sweep(cfg, "n", nullptr);
    CHECK(read_file(out_dir + "/metrics.csv") != csv);
    std::filesystem::remove_all(out_dir);
}

TEST_CASE("snr sweep variant runs") {
    std::string out_dir = "/tmp/hvn_snr_test";
    std::filesystem::remove_all(out_dir);
    ExperimentConfig cfg = tiny_synth_config(out_dir);
    cfg.models = {"hvn"};
    cfg.snr_sweep = {10};
    auto rows = hvn::run_synth_sweep(cfg, "snr_db", nullptr);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].task == "synth-snr-sweep");
    CHECK(rows[0].sweep_name == "snr_db");
    CHECK(rows[0].sweep_value == 10.0);
    CHECK(std::filesystem::exists(out_dir + "/synth-snr-sweep.svg"));
    std::filesystem::remove_all(out_dir);
}

TEST_CASE("repeats add a std column") {
    std::string out_dir = "/tmp/hvn_repeat_test";
    std::filesystem::remove_all(out_dir);
    ExperimentConfig cfg = tiny_synth_config(out_dir);
    cfg.models = {"fpca"};
    cfg.n_sweep = {4};
    cfg.repeats = 2;
    auto rows = hvn::run_synth_sweep(cfg, "n", nullptr);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].test_acc_std.has_value());
    std::string csv = read_file(out_dir + "/metrics.csv");
    CHECK(csv.find("test_acc_std") != std::string::npos);
    auto parsed = hvn::read_metrics_csv(out_dir + "/metrics.csv");
    CHECK(parsed[0].test_acc_std.has_value());
    std::filesystem::remove_all(out_dir);
}

TEST_CASE("baseline parameter parity holds across the default grid") {
    ExperimentConfig cfg;
    for (double n : cfg.n_sweep) {
        hvn::HVNConfig reference;
        reference.layers = cfg.layers;
        reference.taps = cfg.taps;
        reference.widths = {static_cast<Eigen::Index>(n), cfg.width, cfg.width};
        reference.head_hidden = {cfg.head_hidden};
        reference.classes = 2;
        Eigen::Index width = hvn::matched_mlp_width(reference);
        double ratio =
            static_cast<double>(hvn::parameter_count(hvn::mlp_config(reference, width))) /
            static_cast<double>(hvn::parameter_count(reference));
        CHECK(std::abs(ratio - 1.0) <= 0.05);
    }
}

TEST_CASE("ecg runner works end to end on a fixture") {
    std::string train_path = "/tmp/hvn_ecg_fixture_train.tsv";
    std::string test_path = "/tmp/hvn_ecg_fixture_test.tsv";
    write_ecg_fixture(train_path, test_path);

    std::string out_dir = "/tmp/hvn_ecg_test";
    std::filesystem::remove_all(out_dir);
    ExperimentConfig cfg;
    cfg.ecg_train_path = train_path;
    cfg.ecg_test_path = test_path;
    cfg.ecg_m_sweep = {6, 15};
    cfg.epochs = 40;
    cfg.width = 8;
    cfg.head_hidden = 16;
    cfg.fpca_scores = 4;
    cfg.batch_size = 8;
    cfg.out_dir = out_dir;
    cfg.seed = 3;

    auto rows = hvn::run_ecg(cfg, nullptr);
    REQUIRE(rows.size() == 6);
    for (const auto& row : rows) {
        CHECK(row.task == "ecg");
        CHECK(row.sweep_name == "m");
        CHECK(row.test_acc >= 0.0);
        CHECK(row.test_acc <= 1.0);
    }
    CHECK(std::filesystem::exists(out_dir + "/metrics.csv"));
    CHECK(std::filesystem::exists(out_dir + "/ecg.svg"));

    // the fixture's classes are separable; the covariance-aware model should
    // learn something beyond chance on the train split at the largest m
    double hvn_train = 0.0;
    for (const auto& row : rows) {
        if (row.model == "hvn" && row.sweep_value == 15) hvn_train = row.train_acc;
    }
    CHECK(hvn_train > 0.5);

    std::filesystem::remove_all(out_dir);
    std::remove(train_path.c_str());
    std::remove(test_path.c_str());
}

TEST_CASE("ecg runner demands dataset paths") {
    ExperimentConfig cfg;
    try {
        hvn::run_ecg(cfg, nullptr);
        FAIL("expected an io error");
    } catch (const hvn::IoError& e) {
        CHECK(std::string(e.what()).find("--train") != std::string::npos);
    }

    cfg.ecg_train_path = "/tmp/absent_ecg_train.tsv";
    cfg.ecg_test_path = "/tmp/absent_ecg_test.tsv";
    try {
        hvn::run_ecg(cfg, nullptr);
        FAIL("expected an io error");
    } catch (const hvn::IoError& e) {
        CHECK(std::string(e.what()).find("/tmp/absent_ecg_train.tsv") != std::string::npos);
    }
}

TEST_CASE("plots render one polyline per model and round-trip coordinates") {
    std::vector<MetricRow> rows;
    for (const std::string& model : {"hvn", "mlp", "fpca"}) {
        for (double n : {8.0, 16.0, 24.0}) {
            MetricRow row;
            row.task = "synth-n-sweep";
            row.model = model;
            row.sweep_name = "n";
            row.sweep_value = n;
            row.test_acc = model == "hvn" ? 0.9 - 1.0 / n : (model == "mlp" ? 0.6 : 0.5);
            rows.push_back(row);
        }
    }
    std::string svg = hvn::render_accuracy_svg(rows);

    std::size_t polylines = 0, from = 0;
    while ((from = svg.find("<polyline", from)) != std::string::npos) {
        ++polylines;
        from += 1;
    }
    CHECK(polylines == 3);

    // extract the hvn polyline and invert the coordinate mapping
    std::size_t hvn_pos = svg.find("data-model=\"hvn\"");
    REQUIRE(hvn_pos != std::string::npos);
    std::size_t points_pos = svg.find("points=\"", hvn_pos);
    REQUIRE(points_pos != std::string::npos);
    points_pos += 8;
    std::size_t end = svg.find('"', points_pos);
    std::stringstream points(svg.substr(points_pos, end - points_pos));
    std::string pair;
    std::size_t idx = 0;
    while (std::getline(points, pair, ' ')) {
        auto comma = pair.find(',');
        double px = std::stod(pair.substr(0, comma));
        double py = std::stod(pair.substr(comma + 1));
        double x = hvn::plot_x_inverse(px, 8.0, 24.0);
        double y = hvn::plot_y_inverse(py);
        double want_x = rows[idx].sweep_value;
        double want_y = rows[idx].test_acc;
        CHECK(std::abs(x - want_x) <= 0.01 * (24.0 - 8.0));
        CHECK(std::abs(y - want_y) <= 0.01);
        ++idx;
    }
    CHECK(idx == 3);
}

TEST_CASE("plot edge cases") {
    // single row: one marker, no crash
    std::vector<MetricRow> one;
    MetricRow row;
    row.task = "ecg";
    row.model = "hvn";
    row.sweep_name = "m";
    row.sweep_value = 140;
    row.test_acc = 0.91;
    one.push_back(row);
    std::string svg = hvn::render_accuracy_svg(one);
    CHECK(svg.find("<circle") != std::string::npos);

    // header-only csv is an error
    std::string path = "/tmp/hvn_empty_metrics.csv";
    write_file(path,
               "task,model,sweep_name,sweep_value,seed,train_acc,test_acc,final_loss,"
               "wall_ms\n");
    CHECK_THROWS_AS(hvn::emit_plot(path, "/tmp/hvn_empty_plot.svg"),
                    hvn::InvalidInputError);
    std::remove(path.c_str());

    // emit_plot writes a file for a valid csv
    std::vector<MetricRow> rows{row};
    hvn::write_metrics_csv(path, rows);
    std::string out = "/tmp/hvn_single_plot.svg";
    hvn::emit_plot(path, out);
    CHECK(std::filesystem::exists(out));
    std::remove(path.c_str());
    std::remove(out.c_str());
}

}  // TEST_SUITE
