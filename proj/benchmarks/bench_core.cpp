// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "taskforge/gateway.hpp"
#include "taskforge/metrics.hpp"
#include "taskforge/text.hpp"

namespace {

std::string sample_document(std::size_t repeats) {
    std::string out;
    for (std::size_t i = 0; i < repeats; ++i) {
        out += "Quarterly Report " + std::to_string(i) +
               " | Revenue grew by 3.4% while churn fell to 1.2%. ";
    }
    return out;
}

void bench_fnv1a64(benchmark::State& state) {
    std::string data = sample_document(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(taskforge::text::fnv1a64(data));
    }
    state.SetBytesProcessed(static_cast<long>(state.iterations()) *
                            static_cast<long>(data.size()));
}
BENCHMARK(bench_fnv1a64)->Arg(8)->Arg(256)->Arg(4096);

void bench_normalize(benchmark::State& state) {
    std::string data = sample_document(64);
    for (auto _ : state) {
        benchmark::DoNotOptimize(taskforge::text::normalize(data));
    }
}
BENCHMARK(bench_normalize);

void bench_contains_answer(benchmark::State& state) {
    std::string question = sample_document(16) + " What was the exact growth figure?";
    for (auto _ : state) {
        benchmark::DoNotOptimize(taskforge::text::contains_answer(question, "34.5B USD"));
    }
}
BENCHMARK(bench_contains_answer);

void bench_parse_record(benchmark::State& state) {
    std::string reply =
        "candidate: 3.4% | evidence: Revenue grew by 3.4% while churn fell | "
        "relation: the quarterly revenue growth rate";
    for (auto _ : state) {
        benchmark::DoNotOptimize(taskforge::text::parse_record(reply));
    }
}
BENCHMARK(bench_parse_record);

void bench_render_template(benchmark::State& state) {
    taskforge::PromptTemplate tmpl;
    tmpl.slot_name = "bench";
    tmpl.body = "Extract facts from {chunk} and relate them to {index}.";
    for (int i = 0; i < 8; ++i) tmpl.exemplars.push_back(sample_document(2));
    std::map<std::string, std::string> bindings = {{"chunk", sample_document(8)},
                                                   {"index", "Quarterly Report"}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(taskforge::render(tmpl, bindings));
    }
}
BENCHMARK(bench_render_template);

void bench_dedup(benchmark::State& state) {
    std::vector<taskforge::DatasetRecord> records;
    for (int i = 0; i < 512; ++i) {
        taskforge::DatasetRecord rec;
        rec.id = "task_" + std::to_string(i);
        rec.question = "What does report " + std::to_string(i % 128) + " say?";
        rec.answer = "value";
        rec.kind = "depth";
        rec.no_trajectory = true;
        records.push_back(std::move(rec));
    }
    for (auto _ : state) {
        auto copy = records;
        benchmark::DoNotOptimize(taskforge::dedup(std::move(copy)));
    }
}
BENCHMARK(bench_dedup);

}  // namespace

BENCHMARK_MAIN();
