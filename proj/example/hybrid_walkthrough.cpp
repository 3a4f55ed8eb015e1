// Sizes one project, trains the hybrid model on a synthetic dataset, estimates
// the project, then compares all four models by leave-one-out.

#include "ucpe/benchmark.hpp"
#include "ucpe/reports.hpp"
#include "ucpe/synth.hpp"

#include <iostream>

int main() {
    using namespace ucpe;

    // 4 actors, 12 use cases, middling technical factors, experienced team.
    FactorRatings ratings;
    ratings.technical.fill(3);
    ratings.environmental = {4, 3, 4, 4, 3, 4, 1, 2};
    const auto size = compute_ucp({1, 2, 1}, {5, 5, 2}, ratings, WeightTable::defaults());
    std::cout << "size\n";
    write_breakdown(std::cout, size, ReportFormat::table);

    const auto data = synth_generate("dataset2", 65, 20571);
    const auto model = train_hybrid(data);
    std::cout << "\ntrained on " << data.size() << " projects\n";
    write_training_summary(std::cout, model, ReportFormat::table);

    const auto p = predict_effort(model, ratings.environmental, size.ucp);
    std::cout << "\nestimate\n";
    write_prediction(std::cout, p, size.ucp, ReportFormat::table);
    std::cout << "karner " << karner_estimate(size.ucp) << ", sw " << sw_estimate(size.ucp, ratings.environmental) << "\n\n";

    const auto r = run_benchmark(data, BenchmarkOptions{}, "dataset2");
    write_metrics_report(std::cout, r, ReportFormat::table);
    std::cout << '\n';
    write_scott_knott(std::cout, r, ReportFormat::table);
}
