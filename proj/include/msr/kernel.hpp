#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace msr {

using Time = std::int64_t;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Adds two timestamps, throwing on overflow or on a negative result.
Time checked_add(Time a, Time b);

enum class PredRole { System, Goal, Critical, Time };

inline constexpr std::string_view kTimePredicate = "Time";

std::string_view to_string(PredRole role);

struct FunctionType {
    std::vector<std::string> args;
    std::string result;
};

struct PredicateType {
    std::vector<std::string> args;
    PredRole role = PredRole::System;
};

class Signature {
public:
    Signature();

    void add_type(const std::string& name);
    void add_constant(const std::string& name, const std::string& type);
    void add_function(const std::string& name, FunctionType type);
    void add_predicate(const std::string& name, PredicateType type);

    bool has_type(const std::string& name) const { return types_.count(name) != 0; }
    bool is_constant(const std::string& name) const { return constants_.count(name) != 0; }
    bool is_function(const std::string& name) const { return functions_.count(name) != 0; }
    bool is_predicate(const std::string& name) const { return predicates_.count(name) != 0; }

    const std::string& constant_type(const std::string& name) const;
    const FunctionType& function(const std::string& name) const;
    const PredicateType& predicate(const std::string& name) const;
    PredRole role(const std::string& predicate) const { return this->predicate(predicate).role; }

    const std::set<std::string>& types() const { return types_; }
    const std::map<std::string, std::string>& constants() const { return constants_; }
    const std::map<std::string, FunctionType>& functions() const { return functions_; }
    const std::map<std::string, PredicateType>& predicates() const { return predicates_; }

    // Throws if a referenced type is undeclared or the time predicate is malformed.
    void check() const;

    friend bool operator==(const Signature&, const Signature&) = default;

private:
    void claim_symbol(const std::string& name) const;

    std::set<std::string> types_;
    std::map<std::string, std::string> constants_;
    std::map<std::string, FunctionType> functions_;
    std::map<std::string, PredicateType> predicates_;
};

inline bool operator==(const FunctionType& a, const FunctionType& b) {
    return a.args == b.args && a.result == b.result;
}
inline bool operator==(const PredicateType& a, const PredicateType& b) {
    return a.args == b.args && a.role == b.role;
}

struct Term {
    enum class Kind : std::uint8_t { Const, Fresh, Var, App };

    Kind kind = Kind::Const;
    // Constant, variable or function name; the base type for fresh constants.
    std::string name;
    // Fresh constants: generation index. Unused otherwise.
    std::int64_t index = 0;
    // Variables: declared base type.
    std::string type;
    std::vector<Term> args;

    static Term constant(std::string name);
    static Term fresh(std::string type, std::int64_t index);
    static Term var(std::string name, std::string type);
    static Term app(std::string function, std::vector<Term> args);

    bool ground() const;

    friend bool operator==(const Term&, const Term&) = default;
};

// Total order used for canonical configuration order.
int compare(const Term& a, const Term& b);

struct Fact {
    std::string pred;
    std::vector<Term> args;

    bool ground() const;
    bool is_time() const { return pred == kTimePredicate; }

    friend bool operator==(const Fact&, const Fact&) = default;
};

int compare(const Fact& a, const Fact& b);

struct TimedFact {
    Fact fact;
    Time ts = 0;

    friend bool operator==(const TimedFact&, const TimedFact&) = default;
};

// Canonical order: timestamp, then Time first, then predicate name and arguments.
bool canonical_less(const TimedFact& a, const TimedFact& b);

std::string render(const Term& t);
std::string render(const Fact& f);
std::string render(const TimedFact& f);

std::size_t term_size(const Term& t);
std::size_t fact_size(const Fact& f);
inline std::size_t fact_size(const TimedFact& f) { return fact_size(f.fact); }

// Base type of a ground or variable term; throws on ill-typed terms.
std::string term_type(const Signature& sig, const Term& t);
void check_fact(const Signature& sig, const Fact& f);

class Configuration {
public:
    Configuration();
    explicit Configuration(std::vector<TimedFact> facts);

    const std::vector<TimedFact>& facts() const { return facts_; }
    std::size_t size() const { return facts_.size(); }
    Time time() const { return facts_[time_pos_].ts; }
    std::size_t time_position() const { return time_pos_; }
    std::size_t count(const TimedFact& f) const;

    // Every fresh constant index in use, per base type.
    std::map<std::string, std::set<std::int64_t>> fresh_values() const;

    Configuration with_time(Time t) const;

    friend bool operator==(const Configuration&, const Configuration&) = default;

private:
    std::vector<TimedFact> facts_;
    std::size_t time_pos_ = 0;
};

std::vector<TimedFact> canonical_order(const Configuration& s);
std::vector<TimedFact> canonical_order(std::vector<TimedFact> facts);

std::string render(const Configuration& s);

void check_configuration(const Signature& sig, const Configuration& s);

struct ClockTime {
    Time days = 0;
    Time hours = 0;
    Time minutes = 0;

    friend bool operator==(const ClockTime&, const ClockTime&) = default;
};

Time clock_convert(Time days, Time hours, Time minutes);
ClockTime clock_split(Time t);
// "3d14:42"
std::string clock_format(Time t);

}  // namespace msr
