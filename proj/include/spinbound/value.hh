#pragma once

#include <gmpxx.h>

#include <compare>
#include <limits>
#include <string>
#include <string_view>
#include <variant>

namespace spinbound
{
    using Integer = mpz_class;
    using Rational = mpq_class;

    enum class Backend
    {
        exact,
        log
    };

    auto to_string(Backend b) -> std::string;

    /// Natural logarithm of a non-negative integer or rational; -inf for zero.
    auto log_of(const Integer & z) -> double;
    auto log_of(const Rational & q) -> double;

    /// Non-negative real held as its natural log. Zero is log = -inf, which
    /// orders below every finite value.
    class LogValue
    {
        public:
            constexpr LogValue() = default;

            static constexpr auto zero() -> LogValue { return LogValue{}; }
            static constexpr auto one() -> LogValue { return from_log(0.0); }
            static constexpr auto from_log(double l) -> LogValue
            {
                LogValue v;
                v._log = l;
                return v;
            }
            static auto from_linear(double x) -> LogValue;

            constexpr auto log() const -> double { return _log; }
            constexpr auto is_zero() const -> bool { return _log == -std::numeric_limits<double>::infinity(); }

            friend auto operator* (LogValue x, LogValue y) -> LogValue
            {
                if (x.is_zero() || y.is_zero())
                    return zero();
                return from_log(x._log + y._log);
            }

            friend auto operator+ (LogValue x, LogValue y) -> LogValue;

            friend auto operator<=> (LogValue x, LogValue y) -> std::partial_ordering { return x._log <=> y._log; }
            friend auto operator== (LogValue x, LogValue y) -> bool { return x._log == y._log; }

        private:
            double _log = -std::numeric_limits<double>::infinity();
    };

    /// Streaming log-sum-exp with a running maximum.
    class LogSumAccumulator
    {
        public:
            void add(double log_term);
            void add(LogValue v) { add(v.log()); }
            void merge(const LogSumAccumulator & other);
            auto result() const -> LogValue;

        private:
            double _max = -std::numeric_limits<double>::infinity();
            double _scaled_sum = 0.0;
    };

    /// A non-negative quantity carried either exactly (canonical rational)
    /// or in the log domain. Mixed arithmetic falls back to the log domain.
    class NonNegValue
    {
        public:
            NonNegValue() : _value(Rational(0)) { }
            NonNegValue(Rational q);
            NonNegValue(LogValue l) : _value(l) { }
            NonNegValue(long n) : NonNegValue(Rational(n)) { }

            auto backend() const -> Backend { return std::holds_alternative<Rational>(_value) ? Backend::exact : Backend::log; }
            auto is_exact() const -> bool { return backend() == Backend::exact; }
            auto is_zero() const -> bool;

            /// Throws PreconditionError for a log-domain value.
            auto rational() const -> const Rational &;
            auto to_log() const -> LogValue;
            auto log() const -> double { return to_log().log(); }

            friend auto operator* (const NonNegValue & x, const NonNegValue & y) -> NonNegValue;
            friend auto operator+ (const NonNegValue & x, const NonNegValue & y) -> NonNegValue;
            friend auto operator<=> (const NonNegValue & x, const NonNegValue & y) -> std::partial_ordering;
            friend auto operator== (const NonNegValue & x, const NonNegValue & y) -> bool;

            auto to_string() const -> std::string;

        private:
            std::variant<Rational, LogValue> _value;
    };

    /// Parses `p/q` or `p`; throws std::invalid_argument on anything else.
    auto parse_rational(std::string_view text) -> Rational;

    auto pow(const Rational & q, unsigned long k) -> Rational;
}
