#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace webkg {

struct CivilDate {
    int year = 0;
    int month = 1;
    int day = 1;

    auto operator<=>(const CivilDate&) const = default;
    std::string iso() const;
};

// Accepts "YYYY-MM-DD..." and the dataset's "MM/DD/YYYY, HH:MM:SS PT" form.
// Trailing time or zone text is ignored.
std::optional<CivilDate> parse_civil_date(std::string_view text);

CivilDate previous_day(CivilDate d);

}  // namespace webkg
