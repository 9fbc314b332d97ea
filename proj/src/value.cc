#include <spinbound/errors.hh>
#include <spinbound/value.hh>

#include <cmath>
#include <stdexcept>

namespace spinbound
{
    auto to_string(Backend b) -> std::string
    {
        return b == Backend::exact ? "exact" : "log";
    }

    auto log_of(const Integer & z) -> double
    {
        if (sgn(z) == 0)
            return -std::numeric_limits<double>::infinity();
        long exponent = 0;
        double mantissa = mpz_get_d_2exp(&exponent, z.get_mpz_t());
        return std::log(std::fabs(mantissa)) + double(exponent) * std::log(2.0);
    }

    auto log_of(const Rational & q) -> double
    {
        if (sgn(q) == 0)
            return -std::numeric_limits<double>::infinity();
        return log_of(Integer(q.get_num())) - log_of(Integer(q.get_den()));
    }

    auto LogValue::from_linear(double x) -> LogValue
    {
        if (! (x >= 0.0))
            throw PreconditionError("negative or NaN value in log domain");
        return x == 0.0 ? zero() : from_log(std::log(x));
    }

    auto operator+ (LogValue x, LogValue y) -> LogValue
    {
        if (x.is_zero())
            return y;
        if (y.is_zero())
            return x;
        auto hi = std::max(x._log, y._log), lo = std::min(x._log, y._log);
        return LogValue::from_log(hi + std::log1p(std::exp(lo - hi)));
    }

    void LogSumAccumulator::add(double log_term)
    {
        if (log_term == -std::numeric_limits<double>::infinity())
            return;
        if (log_term > _max) {
            _scaled_sum = _scaled_sum * std::exp(_max - log_term) + 1.0;
            _max = log_term;
        }
        else
            _scaled_sum += std::exp(log_term - _max);
    }

    void LogSumAccumulator::merge(const LogSumAccumulator & other)
    {
        if (other._scaled_sum == 0.0)
            return;
        if (_scaled_sum == 0.0) {
            *this = other;
            return;
        }
        if (other._max > _max) {
            _scaled_sum = _scaled_sum * std::exp(_max - other._max) + other._scaled_sum;
            _max = other._max;
        }
        else
            _scaled_sum += other._scaled_sum * std::exp(other._max - _max);
    }

    auto LogSumAccumulator::result() const -> LogValue
    {
        if (_scaled_sum == 0.0)
            return LogValue::zero();
        return LogValue::from_log(_max + std::log(_scaled_sum));
    }

    NonNegValue::NonNegValue(Rational q) :
        _value(std::move(q))
    {
        auto & r = std::get<Rational>(_value);
        r.canonicalize();
        if (sgn(r) < 0)
            throw PreconditionError("negative weight " + r.get_str());
    }

    auto NonNegValue::is_zero() const -> bool
    {
        if (auto q = std::get_if<Rational>(&_value))
            return sgn(*q) == 0;
        return std::get<LogValue>(_value).is_zero();
    }

    auto NonNegValue::rational() const -> const Rational &
    {
        if (auto q = std::get_if<Rational>(&_value))
            return *q;
        throw PreconditionError("value is held in the log domain, not exactly");
    }

    auto NonNegValue::to_log() const -> LogValue
    {
        if (auto q = std::get_if<Rational>(&_value))
            return LogValue::from_log(log_of(*q));
        return std::get<LogValue>(_value);
    }

    auto operator* (const NonNegValue & x, const NonNegValue & y) -> NonNegValue
    {
        if (x.is_exact() && y.is_exact())
            return NonNegValue(Rational(x.rational() * y.rational()));
        return NonNegValue(x.to_log() * y.to_log());
    }

    auto operator+ (const NonNegValue & x, const NonNegValue & y) -> NonNegValue
    {
        if (x.is_exact() && y.is_exact())
            return NonNegValue(Rational(x.rational() + y.rational()));
        return NonNegValue(x.to_log() + y.to_log());
    }

    auto operator<=> (const NonNegValue & x, const NonNegValue & y) -> std::partial_ordering
    {
        if (x.is_exact() && y.is_exact()) {
            int c = cmp(x.rational(), y.rational());
            return c < 0 ? std::partial_ordering::less : c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent;
        }
        return x.to_log() <=> y.to_log();
    }

    auto operator== (const NonNegValue & x, const NonNegValue & y) -> bool
    {
        return (x <=> y) == std::partial_ordering::equivalent;
    }

    auto NonNegValue::to_string() const -> std::string
    {
        if (auto q = std::get_if<Rational>(&_value))
            return q->get_str();
        return "exp(" + std::to_string(std::get<LogValue>(_value).log()) + ")";
    }

    auto parse_rational(std::string_view text) -> Rational
    {
        auto digits = [](std::string_view s) {
            if (s.empty())
                return false;
            for (char c : s)
                if (c < '0' || c > '9')
                    return false;
            return true;
        };

        auto slash = text.find('/');
        auto num = text.substr(0, slash);
        auto den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
        if (! digits(num) || ! digits(den))
            throw std::invalid_argument("expected a non-negative rational p/q, got '" + std::string(text) + "'");
        Integer n{ std::string(num) }, d{ std::string(den) };
        if (sgn(d) == 0)
            throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        Rational q(n, d);
        q.canonicalize();
        return q;
    }

    auto pow(const Rational & q, unsigned long k) -> Rational
    {
        Rational result;
        mpz_pow_ui(result.get_num_mpz_t(), q.get_num_mpz_t(), k);
        mpz_pow_ui(result.get_den_mpz_t(), q.get_den_mpz_t(), k);
        return result;
    }
}
