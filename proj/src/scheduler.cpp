#include "spamwatch/scheduler.hpp"

#include <algorithm>

namespace spamwatch {

bool Schedule::has_keyword(const std::string& keyword) const {
    return std::any_of(jobs_.begin(), jobs_.end(),
                       [&](const Job& j) { return j.keyword == keyword; });
}

void Schedule::add_configured(const std::string& keyword, std::int64_t interval_seconds,
                              std::size_t tweets_per_run, Timestamp created_at) {
    if (has_keyword(keyword)) throw DuplicateKeyword(keyword);
    Job j;
    j.keyword = keyword;
    j.interval_seconds = interval_seconds > 0 ? interval_seconds : 1;
    j.tweets_per_run = tweets_per_run > 0 ? tweets_per_run : 1;
    j.next_due = created_at + j.interval_seconds;
    j.origin = JobOrigin::Configured;
    jobs_.push_back(std::move(j));
}

Job& Schedule::add_keyword(const Trigger& trigger, std::int64_t interval_seconds,
                           std::size_t tweets_per_run) {
    if (has_keyword(trigger.netloc)) throw DuplicateKeyword(trigger.netloc);
    Job j;
    j.keyword = trigger.netloc;
    j.interval_seconds = interval_seconds > 0 ? interval_seconds : 1;
    j.tweets_per_run = tweets_per_run > 0 ? tweets_per_run : 1;
    j.next_due = trigger.fired_at;
    j.origin = JobOrigin::TrendTrigger;
    jobs_.push_back(std::move(j));
    return jobs_.back();
}

std::vector<Job> Schedule::due_jobs(Timestamp now) {
    std::vector<Job> due;
    for (Job& j : jobs_) {
        if (j.next_due > now) continue;
        due.push_back(j);
        while (j.next_due <= now) j.next_due += j.interval_seconds;
    }
    return due;
}

}  // namespace spamwatch
