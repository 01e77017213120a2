#include "ptme/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <tuple>

#include "ptme/error.hpp"
#include "ptme/rng.hpp"

namespace ptme {

std::vector<std::uint64_t> logspace_schedule(std::uint64_t lo, std::uint64_t hi, std::size_t count) {
    if (lo == 0 || hi < lo) throw InvalidArgument("schedule: need 1 <= lo <= hi");
    if (count == 0) throw InvalidArgument("schedule: count must be positive");
    std::vector<std::uint64_t> out;
    const double a = std::log10(static_cast<double>(lo));
    const double b = std::log10(static_cast<double>(hi));
    for (std::size_t i = 0; i < count; ++i) {
        const double t = count == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        auto v = static_cast<std::uint64_t>(std::llround(std::pow(10.0, a + t * (b - a))));
        v = std::clamp(v, lo, hi);
        if (out.empty() || out.back() != v) out.push_back(v);
    }
    return out;
}

std::vector<std::uint64_t> default_schedule(std::uint64_t budget) {
    return logspace_schedule(1, std::max<std::uint64_t>(1, std::min<std::uint64_t>(100000, budget)), 50);
}

namespace {

std::uint64_t parse_count(std::string_view s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw InvalidArgument("schedule: '" + std::string(s) + "' is not a non-negative integer");
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    while (true) {
        const auto pos = s.find(sep);
        parts.push_back(s.substr(0, pos));
        if (pos == std::string_view::npos) return parts;
        s.remove_prefix(pos + 1);
    }
}

}  // namespace

std::vector<std::uint64_t> parse_schedule(std::string_view text) {
    constexpr std::string_view kLog = "logspace:";
    if (text.substr(0, kLog.size()) == kLog) {
        const auto parts = split(text.substr(kLog.size()), ':');
        if (parts.size() != 3) throw InvalidArgument("schedule: expected logspace:LO:HI:COUNT");
        return logspace_schedule(parse_count(parts[0]), parse_count(parts[1]), parse_count(parts[2]));
    }
    std::vector<std::uint64_t> out;
    for (auto part : split(text, ',')) {
        const auto v = parse_count(part);
        if (v == 0) throw InvalidArgument("schedule: resolutions must be positive");
        out.push_back(v);
    }
    return out;
}

std::uint64_t rearchive_seed(std::uint64_t cells, std::uint64_t master_seed) {
    return derive_seed(derive_seed(master_seed, 0x5EA5C11Eu), cells);
}

std::shared_ptr<const Tessellation> cached_tessellation(std::size_t cells, std::size_t dim, std::uint64_t seed) {
    struct Entry {
        std::once_flag once;
        std::shared_ptr<const Tessellation> tess;
    };
    static std::mutex mutex;
    static std::map<std::tuple<std::size_t, std::size_t, std::uint64_t>, std::shared_ptr<Entry>> cache;

    std::shared_ptr<Entry> entry;
    {
        std::lock_guard lock(mutex);
        auto& slot = cache[{cells, dim, seed}];
        if (!slot) slot = std::make_shared<Entry>();
        entry = slot;
    }
    std::call_once(entry->once, [&] {
        entry->tess = std::make_shared<const Tessellation>(Tessellation::build(cells, dim, seed, false));
    });
    return entry->tess;
}

Archive rearchive(const EvaluationLog& log, std::shared_ptr<const Tessellation> tessellation) {
    if (tessellation->dim() != log.task_dim())
        throw InvalidArgument("rearchive: tessellation and log task dimensions differ");
    Archive archive(std::move(tessellation), log.solution_dim());
    const Tessellation& tess = archive.tessellation();
    for (std::size_t i = 0; i < log.size(); ++i) {
        const double f = log.fitness(i);
        if (f < 0.0) throw InvalidArgument("rearchive: logged fitness must be non-negative");
        archive.try_insert(tess.nearest_cell(log.theta(i)), log.theta(i), log.solution(i), f);
    }
    return archive;
}

Archive rearchive(const EvaluationLog& log, std::size_t cells, std::uint64_t master_seed) {
    return rearchive(log, cached_tessellation(cells, log.task_dim(), rearchive_seed(cells, master_seed)));
}

double qd_score(const Archive& archive) {
    double total = 0.0;
    for (std::size_t c = 0; c < archive.size(); ++c)
        if (archive.filled(c)) total += archive.fitness(c);
    return total;
}

std::vector<double> qd_scores(const EvaluationLog& log, std::span<const std::uint64_t> schedule,
                              std::uint64_t master_seed) {
    std::vector<double> scores;
    scores.reserve(schedule.size());
    for (std::uint64_t n : schedule) scores.push_back(qd_score(rearchive(log, n, master_seed)));
    return scores;
}

double mr_qd_score(const EvaluationLog& log, std::span<const std::uint64_t> schedule, std::uint64_t master_seed) {
    if (schedule.empty()) throw InvalidArgument("mr_qd_score: schedule is empty");
    const auto scores = qd_scores(log, schedule, master_seed);
    return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

double inference_score(const PolicyFn& policy, const Problem& problem, std::size_t probes,
                       std::uint64_t probe_seed) {
    if (probes == 0) throw InvalidArgument("inference_score: probe count must be positive");
    const auto tess = cached_tessellation(probes, problem.task_dim(), probe_seed);
    double total = 0.0;
    for (std::size_t i = 0; i < tess->size(); ++i) {
        const auto theta = tess->centroid(i);
        total += problem.evaluate(policy(theta), theta);
    }
    return total / static_cast<double>(tess->size());
}

namespace {

// Twice the midranks of the pooled sample, so ties stay integral.
std::vector<long> doubled_midranks(const std::vector<double>& pooled) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
    std::vector<long> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const auto doubled = static_cast<long>(i + j + 2);  // (i+1) + (j+1)
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = doubled;
        i = j + 1;
    }
    return ranks;
}

// P(sum of a uniformly chosen k-subset of `values` >= threshold), exact.
double subset_sum_tail(const std::vector<long>& values, std::size_t k, long threshold) {
    const long max_sum = std::accumulate(values.begin(), values.end(), 0L);
    // ways[j][s]: number of j-subsets of the items seen so far with sum s
    std::vector<std::vector<double>> ways(k + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    ways[0][0] = 1.0;
    for (long v : values)
        for (std::size_t j = k; j >= 1; --j)
            for (long s = max_sum; s >= v; --s)
                ways[j][static_cast<std::size_t>(s)] += ways[j - 1][static_cast<std::size_t>(s - v)];
    double tail = 0.0, total = 0.0;
    for (long s = 0; s <= max_sum; ++s) {
        total += ways[k][static_cast<std::size_t>(s)];
        if (s >= threshold) tail += ways[k][static_cast<std::size_t>(s)];
    }
    return tail / total;
}

}  // namespace

double rank_sum_test(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InvalidArgument("rank_sum_test: both samples must be non-empty");
    const std::size_t na = a.size(), nb = b.size(), n = na + nb;
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    for (double v : pooled)
        if (std::isnan(v)) throw InvalidArgument("rank_sum_test: samples contain NaN");
    const auto ranks = doubled_midranks(pooled);
    const long ra2 = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(na), 0L);

    if (std::min(na, nb) <= 8) {
        if (na <= nb) return subset_sum_tail(ranks, na, ra2);
        // R_a >= r  <=>  R_b <= total - r  <=>  -R_b >= r - total
        const long total = std::accumulate(ranks.begin(), ranks.end(), 0L);
        std::vector<long> complement(ranks.begin(), ranks.end());
        const long shift = *std::max_element(complement.begin(), complement.end());
        for (long& r : complement) r = shift - r;  // reflect to keep values non-negative
        const long rb2 = total - ra2;
        return subset_sum_tail(complement, nb, static_cast<long>(nb) * shift - rb2);
    }

    const double u = static_cast<double>(ra2) / 2.0 - static_cast<double>(na * (na + 1)) / 2.0;
    const double mean = static_cast<double>(na * nb) / 2.0;
    double tie_term = 0.0;
    {
        std::vector<double> sorted = pooled;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j < n && sorted[j] == sorted[i]) ++j;
            const auto t = static_cast<double>(j - i);
            tie_term += t * t * t - t;
            i = j;
        }
    }
    const double nd = static_cast<double>(n);
    const double var = static_cast<double>(na * nb) / 12.0 * ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
    if (!(var > 0.0)) return 1.0;  // every value tied: no evidence either way
    const double z = (u - mean) / std::sqrt(var);
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

}  // namespace ptme
