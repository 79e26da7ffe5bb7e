#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace reveal {

// A non-empty set of state indices in canonical (sorted, deduplicated) order.
// One node of the belief-support abstraction.
class Support {
public:
    Support() = default;

    static Support of(std::vector<int> states);
    static Support singleton(int state);

    bool contains(int state) const;
    bool subsetOf(Support const& other) const;
    int size() const { return static_cast<int>(members_.size()); }
    bool isSingleton() const { return members_.size() == 1; }
    bool empty() const { return members_.empty(); }
    std::vector<int> const& members() const { return members_; }

    bool operator==(Support const&) const = default;
    auto operator<=>(Support const&) const = default;

private:
    std::vector<int> members_;
};

struct SupportHash {
    std::size_t operator()(Support const& s) const;
};

// Renders a support as "{name,name}" using the given state names.
std::string toString(Support const& s, std::vector<std::string> const& names);

} // namespace reveal
