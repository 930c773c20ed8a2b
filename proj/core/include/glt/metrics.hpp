#pragma once

#include <cstdint>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "glt/csr.hpp"

namespace glt {

constexpr int kCsvSchemaVersion = 1;

// One experiment outcome. status is "ok" or "error:<what>"; failed runs keep
// their grid coordinates so a sweep CSV always has the full cross product.
struct MetricsRow {
    std::string dataset;
    std::string scorer;
    idx k = -1;  // simulation index, -1 when the run was given p_g directly
    double p_g = 0.0;
    double p_theta = 0.0;
    std::uint64_t seed = 0;
    double val_acc = 0.0;
    double test_acc = 0.0;
    double mean_pruned_edge_degree = 0.0;
    std::uint64_t inference_macs = 0;
    std::string status = "ok";
};

std::string csv_header();
std::string csv_line(const MetricsRow& row, const std::string& timestamp);
std::string utc_timestamp();

// Appends to path, writing the header first when the file is new. Rejects an
// existing file whose header disagrees with the current schema.
void append_metrics_row(const std::string& path, const MetricsRow& row);

// Collects rows indexed by grid position and flushes the contiguous prefix,
// so the CSV bytes do not depend on completion order or worker count.
class OrderedCsvWriter {
public:
    OrderedCsvWriter(const std::string& path, std::size_t total_rows);
    void put(std::size_t index, const MetricsRow& row);
    void close();  // throws if rows are missing
    ~OrderedCsvWriter();

private:
    void flush_ready();

    std::ofstream out_;
    std::string path_;
    std::mutex mu_;
    std::vector<std::optional<std::string>> pending_;
    std::size_t next_ = 0;
    bool closed_ = false;
};

}  // namespace glt
