#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

#include "smartlid/core/time.hpp"

namespace smartlid::control {

// Daily aeration trigger. Times are seconds since the Unix epoch (UTC);
// the trigger is a local wall-clock time, local = UTC + utc_offset_minutes.
struct DailySchedule {
  TimeOfDay time{11, 0};
  int utc_offset_minutes{0};

  // Local calendar day number containing `now`.
  std::int64_t local_day(double now) const {
    const double local = now + utc_offset_minutes * 60.0;
    return static_cast<std::int64_t>(std::floor(local / static_cast<double>(kSecondsPerDay)));
  }

  // The trigger instant on the local day containing `now`.
  double trigger_on_day_of(double now) const {
    return static_cast<double>(local_day(now) * kSecondsPerDay + time.seconds()) - utc_offset_minutes * 60.0;
  }
};

// True iff today's trigger instant has passed and the last aeration happened
// before it. A skipped instant (clock jump, power loss) is caught up once on
// the same day; an instant on a day the clock never visits after the trigger
// is not replayed.
inline bool schedule_due(const DailySchedule& schedule, std::optional<double> last_aeration, double now) {
  const double trigger = schedule.trigger_on_day_of(now);
  if (now < trigger) return false;
  return !last_aeration || *last_aeration < trigger;
}

}  // namespace smartlid::control
