#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spinbound
{
    /// Base class for every error raised by the library.
    class Error : public std::runtime_error
    {
        public:
            using std::runtime_error::runtime_error;
    };

    enum class ParseErrorKind
    {
        malformed,
        duplicate_edge,
        loop,
        out_of_range
    };

    /// A line-precise problem in one of the text input formats.
    class ParseError : public Error
    {
        public:
            ParseError(ParseErrorKind kind, std::size_t line, const std::string & what) :
                Error("line " + std::to_string(line) + ": " + what),
                _kind(kind),
                _line(line)
            {
            }

            auto kind() const -> ParseErrorKind { return _kind; }
            auto line() const -> std::size_t { return _line; }

        private:
            ParseErrorKind _kind;
            std::size_t _line;
    };

    class NotBipartite : public Error
    {
        public:
            explicit NotBipartite(std::vector<unsigned> walk);

            /// Closed walk of odd length; first and last entries coincide.
            auto odd_walk() const -> const std::vector<unsigned> & { return _walk; }

        private:
            std::vector<unsigned> _walk;
    };

    class NotBiregular : public Error
    {
        public:
            NotBiregular(const std::string & reason, unsigned first, unsigned second) :
                Error("not biregular: " + reason),
                _witnesses(first, second)
            {
            }

            auto witnesses() const -> std::pair<unsigned, unsigned> { return _witnesses; }

        private:
            std::pair<unsigned, unsigned> _witnesses;
    };

    /// An enumeration would exceed the configured budget.
    class BudgetExceeded : public Error
    {
        public:
            using Error::Error;
    };

    /// Inputs violate an operation's documented precondition.
    class PreconditionError : public Error
    {
        public:
            using Error::Error;
    };

    inline NotBipartite::NotBipartite(std::vector<unsigned> walk) :
        Error([&] {
            std::string s = "not bipartite: odd closed walk";
            for (auto v : walk)
                s += " " + std::to_string(v);
            return s;
        }()),
        _walk(std::move(walk))
    {
    }
}
