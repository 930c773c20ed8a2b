#include "glt/metrics.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <stdexcept>

namespace glt {

std::string csv_header() {
    return "schema_version,timestamp,dataset,scorer,k,p_g,p_theta,seed,val_acc,test_acc,"
           "mean_pruned_edge_degree,inference_macs,status";
}

std::string csv_line(const MetricsRow& row, const std::string& timestamp) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "%d,%s,%s,%s,%lld,%.6f,%.6f,%llu,%.6f,%.6f,%.6f,%llu,%s", kCsvSchemaVersion,
                  timestamp.c_str(), row.dataset.c_str(), row.scorer.c_str(),
                  static_cast<long long>(row.k), row.p_g, row.p_theta,
                  static_cast<unsigned long long>(row.seed), row.val_acc, row.test_acc,
                  row.mean_pruned_edge_degree, static_cast<unsigned long long>(row.inference_macs),
                  row.status.c_str());
    return buf;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void append_metrics_row(const std::string& path, const MetricsRow& row) {
    bool need_header = true;
    {
        std::ifstream in(path);
        if (in) {
            std::string first;
            std::getline(in, first);
            if (!first.empty()) {
                if (first != csv_header())
                    throw std::runtime_error(path + ": existing header does not match schema v" +
                                             std::to_string(kCsvSchemaVersion));
                need_header = false;
            }
        }
    }
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open " + path);
    if (need_header) out << csv_header() << '\n';
    out << csv_line(row, utc_timestamp()) << '\n';
}

OrderedCsvWriter::OrderedCsvWriter(const std::string& path, std::size_t total_rows)
    : out_(path), path_(path), pending_(total_rows) {
    if (!out_) throw std::runtime_error("cannot open " + path);
    out_ << csv_header() << '\n';
    out_.flush();
}

void OrderedCsvWriter::put(std::size_t index, const MetricsRow& row) {
    std::lock_guard<std::mutex> lock(mu_);
    if (index >= pending_.size()) throw std::runtime_error("row index out of range");
    if (pending_[index].has_value() || index < next_)
        throw std::runtime_error("duplicate row index");
    pending_[index] = csv_line(row, utc_timestamp());
    flush_ready();
}

void OrderedCsvWriter::flush_ready() {
    while (next_ < pending_.size() && pending_[next_].has_value()) {
        out_ << *pending_[next_] << '\n';
        pending_[next_].reset();
        ++next_;
    }
    out_.flush();
}

void OrderedCsvWriter::close() {
    std::lock_guard<std::mutex> lock(mu_);
    if (closed_) return;
    closed_ = true;
    if (next_ != pending_.size())
        throw std::runtime_error(path_ + ": sweep ended with missing rows");
    out_.close();
}

OrderedCsvWriter::~OrderedCsvWriter() {
    try {
        close();
    } catch (...) {
        // destructor must not throw; close() reports when called explicitly
    }
}

}  // namespace glt
