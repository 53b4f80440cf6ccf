#include "cldforge/corpus.hpp"

namespace cldforge {

namespace {

Link pos(const char* src, const char* dst) { return {VariableName(src), VariableName(dst), Polarity::Positive}; }
Link neg(const char* src, const char* dst) { return {VariableName(src), VariableName(dst), Polarity::Negative}; }

constexpr const char* kMeadows = "Meadows, D. H. (2009). Thinking in Systems: A Primer. Earthscan.";

const char* const kRabbitHypothesis =
    "The larger the population, the greater the number of births. increases, the faster the "
    "population increases. The more the birth rate increases, the faster the population "
    "increases.";

const char* const kCigaretteHypothesis =
    "The more my uncle smokes, the more addicted he becomes to the nicotine in his "
    "cigarettes. After smoking a few cigarettes a long time ago, my uncle began to develop a "
    "need for cigarettes. The need caused him to smoke even more, which produced an even "
    "stronger need to smoke. The reinforcing behavior in the addiction process is "
    "characteristic of positive feedback.";

const char* const kCarInventoryHypothesis =
    "Car production builds the inventory of cars at the dealer. A higher inventory leads to a "
    "lower market price, and lower market prices cause less car production in the future. If "
    "the price were to increase, the retail sale of cars would tend to fall. Retail sales "
    "drain the inventory of cars held in stock at the dealership. And a decline in the "
    "inventory will cause the dealers to raise their prices in the future.";

const char* const kBacklogHypothesis =
    "The Assignment Backlog is increased by the Assignment Rate and decreased by the "
    "Completion Rate. Completion Rate is Workweek (hours per week) times Productivity (tasks "
    "completed per hour of effort) times the Effort Devoted to Assignments. Effort Devoted to "
    "Assignments is the effort put in by the student compared to the effort required to "
    "complete the assignment with high quality. If work pressure is high, the student may "
    "choose to cut corners, skim some reading, skip classes, or give less complete answers to "
    "the questions in assignments. For example, if a student works 50 hours per week and can "
    "do one task per hour with high quality but only does half the work each assignment "
    "requires for a good job, then the completion rate would be (50)(1)(.5) = 25 task "
    "equivalents per week. Work Pressure determines the workweek and effort devoted to "
    "assignments. Work pressure depends on the assignment backlog and the Time Remaining to "
    "complete the work: The bigger the backlog or the less time remaining, the higher the "
    "workweek needs to be to complete the work on time. Time remaining is of course simply "
    "the difference between the Due Date and the current Calendar Time. The two most basic "
    "options available to a student faced with high work pressure are to first, work longer "
    "hours, thus increasing the completion rate and reducing the backlog, or second, work "
    "faster by spending less time on each task, speeding the completion rate and reducing the "
    "backlog. Both are negative feedbacks whose goal is to reduce work pressure to a "
    "tolerable level.";

} // namespace

namespace {

Corpus build_goldens() {
    std::vector<CorpusItem> items;

    items.push_back({
        "rabbit-population",
        kRabbitHypothesis,
        build_diagram({
            pos("births", "rabbit population"),
            pos("rabbit population", "births"),
            pos("birth fraction", "births"),
        }),
        kMeadows,
        std::vector<ExpectedLoop>{{2, LoopKind::Reinforcing}},
        {},
    });

    // The hypothesis never states how addiction time acts on the need, so
    // that link's polarity is flagged.
    items.push_back({
        "cigarette-addiction",
        kCigaretteHypothesis,
        build_diagram({
            pos("smoking", "need for cigarettes"),
            pos("need for cigarettes", "smoking"),
            pos("addiction time", "need for cigarettes"),
        }),
        kMeadows,
        std::vector<ExpectedLoop>{{2, LoopKind::Reinforcing}},
        {{"addiction time", "need for cigarettes"}},
    });

    // One link per causal sentence: "builds" is positive, "drain" negative,
    // "higher X leads to lower Y" negative.
    items.push_back({
        "new-car-inventory",
        kCarInventoryHypothesis,
        build_diagram({
            pos("car production", "inventory"),
            neg("inventory", "market price"),
            pos("market price", "car production"),
            neg("market price", "retail sales"),
            neg("retail sales", "inventory"),
        }),
        "Ford, F. A. (1999). Modeling the environment: An introduction to system dynamics models of "
        "environmental systems. Island Press.",
        std::vector<ExpectedLoop>{{3, LoopKind::Balancing}, {3, LoopKind::Balancing}},
        {},
    });

    items.push_back({
        "assignment-backlog",
        kBacklogHypothesis,
        build_diagram({
            pos("assignment rate", "assignment backlog"),
            neg("completion rate", "assignment backlog"),
            pos("workweek", "completion rate"),
            pos("productivity", "completion rate"),
            pos("effort devoted to assignments", "completion rate"),
            pos("work pressure", "workweek"),
            pos("work pressure", "effort devoted to assignments"),
            pos("assignment backlog", "work pressure"),
            neg("time remaining", "work pressure"),
            pos("due date", "time remaining"),
            neg("calendar time", "time remaining"),
        }),
        "Sterman, J. (2000). Business Dynamics: Systems Thinking and Modeling for a Complex World, p. 164. "
        "McGraw-Hill Education.",
        std::vector<ExpectedLoop>{{4, LoopKind::Balancing}, {4, LoopKind::Balancing}},
        {},
    });

    return Corpus(std::move(items));
}

} // namespace

const Corpus& bundled_goldens() {
    static const Corpus goldens = build_goldens();
    return goldens;
}

} // namespace cldforge
