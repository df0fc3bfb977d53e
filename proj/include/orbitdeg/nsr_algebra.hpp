#pragma once

// Pullback matrices on the Neron-Severi space and bounds for the dynamical
// degree of a finite family of maps (the generalized spectral radius of the
// semigroup generated by their pullback matrices).

#include <gmpxx.h>

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string>
#include <vector>

namespace orbitdeg {

using Rational = mpq_class;
using BigInt = mpz_class;

/// Parses "p/q", "p" or a decimal such as "-1.25" into a canonical rational.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);

/// Nearest double to an exact rational (round-to-nearest-even).
double to_double_nearest(const Rational& q);

/// Square matrix of exact rationals. Row-major storage.
class NsMatrix {
public:
    NsMatrix() = default;
    NsMatrix(std::size_t dim, std::vector<Rational> entries);
    NsMatrix(std::initializer_list<std::initializer_list<long>> rows);

    static NsMatrix identity(std::size_t dim);
    static NsMatrix from_rows(const std::vector<std::vector<Rational>>& rows);

    std::size_t dim() const noexcept { return dim_; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }
    Rational& operator()(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }

    /// Entries rounded to nearest double.
    Eigen::MatrixXd to_double() const;

    NsMatrix operator*(const NsMatrix& rhs) const;
    NsMatrix operator+(const NsMatrix& rhs) const;
    bool operator==(const NsMatrix& rhs) const;

    std::string str() const;

private:
    std::size_t dim_ = 0;
    std::vector<Rational> entries_;
};

/// The pullback matrices A(f_1), ..., A(f_k), all of one dimension.
class GeneratorSet {
public:
    GeneratorSet() = default;
    explicit GeneratorSet(std::vector<NsMatrix> matrices, std::vector<std::string> labels = {});

    std::size_t size() const noexcept { return matrices_.size(); }
    std::size_t dim() const noexcept { return matrices_.front().dim(); }
    const NsMatrix& operator[](std::size_t i) const { return matrices_[i]; }
    const std::vector<NsMatrix>& matrices() const noexcept { return matrices_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

private:
    std::vector<NsMatrix> matrices_;
    std::vector<std::string> labels_;
};

/// A composition word (i_1, ..., i_n) standing for f_{i_1} o ... o f_{i_n}.
/// Indices are 1-based; the empty word is the identity.
struct Word {
    std::vector<std::size_t> indices;

    std::size_t length() const noexcept { return indices.size(); }
    bool operator==(const Word&) const = default;
    std::string str() const;
};

Word concat(const Word& first, const Word& second);
void validate_word(const Word& w, std::size_t k);

/// max |lambda| over the complex eigenvalues of the double view of m.
double spectral_radius(const NsMatrix& m);
double spectral_radius(const Eigen::MatrixXd& m);

/// Largest singular value (the operator 2-norm).
double operator_norm(const Eigen::MatrixXd& m);

/// A(f_{i_n}) * ... * A(f_{i_1}), so that word (1,2) gives (f_1 o f_2)^*.
NsMatrix word_matrix(const GeneratorSet& gens, const Word& w);

inline constexpr std::uint64_t kDefaultWordBudget = 2'000'000;

/// Per-length extremes over all k^n words of one length.
struct LengthStats {
    std::size_t length = 0;
    double max_rho = 0.0;      // max spectral radius
    Word rho_witness;          // first word (lexicographic) attaining it
    double max_norm = 0.0;     // max operator 2-norm
};

struct WordScan {
    std::vector<LengthStats> lengths;    // completed lengths only
    bool truncated = false;              // budget ran out before max_len
    std::uint64_t multiplications = 0;
};

/// Enumerates every word of length 1..max_len in lexicographic order,
/// stopping cleanly once `budget` matrix multiplications have been spent.
WordScan scan_words(const GeneratorSet& gens, std::size_t max_len,
                    std::uint64_t budget = kDefaultWordBudget);

struct LowerBound {
    double value = 0.0;
    Word witness;
    std::size_t lengths_used = 0;
    bool truncated = false;
};

/// max over nonempty words w with |w| <= max_len of rho(A(w))^{1/|w|}.
/// A later word replaces the witness only if it beats it by a relative 1e-12.
LowerBound delta_lower(const GeneratorSet& gens, std::size_t max_len,
                       std::uint64_t budget = kDefaultWordBudget);
LowerBound delta_lower(const WordScan& scan);

struct UpperBound {
    double value = std::numeric_limits<double>::infinity();
    std::size_t best_length = 0;
    std::size_t lengths_used = 0;
    bool truncated = false;
};

/// min over n <= max_len of (max over length-n words of ||A(w)||_2)^{1/n}.
UpperBound delta_upper(const GeneratorSet& gens, std::size_t max_len,
                       std::uint64_t budget = kDefaultWordBudget);
UpperBound delta_upper(const WordScan& scan);

struct DeltaBracket {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    Word lower_witness;
    std::size_t lengths_used = 0;
    bool converged = false;
    bool truncated = false;
};

DeltaBracket delta_estimate(const GeneratorSet& gens, std::size_t max_len, double tol,
                            std::uint64_t budget = kDefaultWordBudget);

/// Exact entrywise sum of the generator matrices.
NsMatrix sum_pullback(const GeneratorSet& gens);

struct Eigendivisor {
    double beta = 0.0;
    std::vector<double> coeffs;   // largest-magnitude entry is +1
    double delta_lower = 0.0;     // value used for the condition
    bool condition_ok = false;    // beta > k * sqrt(delta_lower)
};

/// Perron-type eigendivisor of the summed pullback.
/// Throws ComputationError if the dominant eigenvalue is not real or is defective.
Eigendivisor find_eigendivisor(const GeneratorSet& gens, std::size_t delta_len = 8,
                               std::uint64_t budget = kDefaultWordBudget);

} // namespace orbitdeg
