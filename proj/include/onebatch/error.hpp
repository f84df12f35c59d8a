#ifndef ONEBATCH_ERROR_HPP
#define ONEBATCH_ERROR_HPP

#include <stdexcept>
#include <string>

namespace onebatch {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error { public: using Error::Error; };
class EmptyDataset : public Error { public: using Error::Error; };
class InvalidSpec : public Error { public: using Error::Error; };
class DimensionMismatch : public Error { public: using Error::Error; };
class ZeroVector : public Error { public: using Error::Error; };
class IndexOutOfRange : public Error { public: using Error::Error; };
class InvalidBatchSize : public Error { public: using Error::Error; };
class InvalidBound : public Error { public: using Error::Error; };
class NonFinite : public Error { public: using Error::Error; };
class CandidateIsMedoid : public Error { public: using Error::Error; };
class InvalidK : public Error { public: using Error::Error; };
class DebiasRequiresKAtLeast2 : public Error { public: using Error::Error; };
class InvalidConfig : public Error { public: using Error::Error; };
class ZeroBestObjective : public Error { public: using Error::Error; };
class ZeroReferenceTime : public Error { public: using Error::Error; };

// Malformed CSV content. Row and column are 1-based positions in the file
// (row counts the header line when present); column is 0 when the whole row
// is at fault.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t column)
        : Error(what + " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")"),
          row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

}  // namespace onebatch

#endif  // ONEBATCH_ERROR_HPP
