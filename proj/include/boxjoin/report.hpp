#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace boxjoin {

// One benchmark run.
struct BenchRecord {
    std::string instance;
    std::string algorithm;
    double wall_ms = 0;
    std::size_t n = 0;  // input tuples
    std::size_t cover_size = 0;
    std::size_t certificate_size = 0;
    std::size_t witnesses = 0;
    std::size_t output_size = 0;
};

// Tab-separated report with a fixed header line.
std::string emit_report(const std::vector<BenchRecord>& records);
std::string report_header();

struct BenchOptions {
    std::uint64_t seed = 1;
    std::size_t seeds = 3;
    // adora-scaling: largest total input size; sizes halve down from it.
    std::size_t max_n = 1'000'000;
    std::size_t steps = 5;
    int d = 20;
};

// Suites: adora-scaling, join, checkerboard.
std::vector<BenchRecord> run_bench(const std::string& suite, const BenchOptions& options);
std::vector<std::string> bench_suites();

}  // namespace boxjoin
