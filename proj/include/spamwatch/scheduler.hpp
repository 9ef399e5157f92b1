#pragma once

#include <string>
#include <vector>

#include "spamwatch/core.hpp"
#include "spamwatch/trend.hpp"

namespace spamwatch {

enum class JobOrigin { Configured, TrendTrigger };

struct Job {
    std::string keyword;
    std::int64_t interval_seconds = 24 * 3600;
    Timestamp next_due = 0;
    std::size_t tweets_per_run = 30000;
    JobOrigin origin = JobOrigin::Configured;
};

struct DuplicateKeyword : std::runtime_error {
    explicit DuplicateKeyword(const std::string& kw)
        : std::runtime_error("keyword already scheduled: " + kw) {}
};

// Fixed-rate job schedule. Configured jobs first come due one interval after
// creation; trigger-added jobs run immediately.
class Schedule {
public:
    // Adds a configured job; next_due = created_at + interval.
    void add_configured(const std::string& keyword, std::int64_t interval_seconds,
                        std::size_t tweets_per_run, Timestamp created_at);

    // Adds a keyword discovered by the trend monitor; first run immediate
    // (next_due = trigger.fired_at). Throws DuplicateKeyword if already
    // scheduled; callers treat that as a reported no-op.
    Job& add_keyword(const Trigger& trigger, std::int64_t interval_seconds,
                     std::size_t tweets_per_run);

    // Jobs with next_due <= now. Each returned job's next_due advances on
    // its own fixed-rate grid to the first point after `now` (a job late by
    // several intervals is returned once, not once per missed interval).
    std::vector<Job> due_jobs(Timestamp now);

    bool has_keyword(const std::string& keyword) const;
    const std::vector<Job>& jobs() const { return jobs_; }

private:
    std::vector<Job> jobs_;
};

}  // namespace spamwatch
