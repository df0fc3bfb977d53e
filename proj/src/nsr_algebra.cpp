#include "orbitdeg/nsr_algebra.hpp"

#include "orbitdeg/errors.hpp"

#include <mpfr.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <sstream>

namespace orbitdeg {

namespace {

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

} // namespace

Rational parse_rational(const std::string& text) {
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) throw InputError("empty rational literal");

    std::string sign;
    std::string body = s;
    if (body[0] == '-' || body[0] == '+') {
        if (body[0] == '-') sign = "-";
        body = body.substr(1);
    }

    Rational q;
    if (auto slash = body.find('/'); slash != std::string::npos) {
        const std::string num = body.substr(0, slash);
        const std::string den = body.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) throw InputError("malformed rational '" + text + "'");
        BigInt d(den);
        if (d == 0) throw InputError("zero denominator in '" + text + "'");
        q = Rational(BigInt(sign + num), d);
    } else if (auto dot = body.find('.'); dot != std::string::npos) {
        const std::string ip = body.substr(0, dot);
        const std::string fp = body.substr(dot + 1);
        if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)) || (ip.empty() && fp.empty()))
            throw InputError("malformed decimal '" + text + "'");
        BigInt scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, fp.size());
        q = Rational(BigInt(sign + (ip.empty() ? "0" : ip) + fp), scale);
    } else {
        if (!all_digits(body)) throw InputError("malformed integer '" + text + "'");
        q = Rational(BigInt(sign + body));
    }
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

double to_double_nearest(const Rational& q) {
    mpfr_t tmp;
    mpfr_init2(tmp, 53);
    mpfr_set_q(tmp, q.get_mpq_t(), MPFR_RNDN);
    const double d = mpfr_get_d(tmp, MPFR_RNDN);
    mpfr_clear(tmp);
    return d;
}

// ---------------------------------------------------------------------------
// NsMatrix

NsMatrix::NsMatrix(std::size_t dim, std::vector<Rational> entries)
    : dim_(dim), entries_(std::move(entries)) {
    if (dim_ == 0) throw InputError("matrix dimension must be positive");
    if (entries_.size() != dim_ * dim_) throw InputError("matrix is not square");
}

NsMatrix::NsMatrix(std::initializer_list<std::initializer_list<long>> rows) {
    dim_ = rows.size();
    if (dim_ == 0) throw InputError("matrix dimension must be positive");
    for (const auto& row : rows) {
        if (row.size() != dim_) throw InputError("matrix is not square");
        for (long v : row) entries_.emplace_back(v);
    }
}

NsMatrix NsMatrix::identity(std::size_t dim) {
    std::vector<Rational> e(dim * dim, Rational(0));
    for (std::size_t i = 0; i < dim; ++i) e[i * dim + i] = 1;
    return NsMatrix(dim, std::move(e));
}

NsMatrix NsMatrix::from_rows(const std::vector<std::vector<Rational>>& rows) {
    const std::size_t n = rows.size();
    std::vector<Rational> e;
    e.reserve(n * n);
    for (const auto& row : rows) {
        if (row.size() != n) throw InputError("matrix is not square");
        e.insert(e.end(), row.begin(), row.end());
    }
    return NsMatrix(n, std::move(e));
}

Eigen::MatrixXd NsMatrix::to_double() const {
    Eigen::MatrixXd m(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) m(i, j) = to_double_nearest((*this)(i, j));
    return m;
}

NsMatrix NsMatrix::operator*(const NsMatrix& rhs) const {
    if (dim_ != rhs.dim_) throw InputError("matrix dimension mismatch in product");
    std::vector<Rational> out(dim_ * dim_, Rational(0));
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t l = 0; l < dim_; ++l) {
            const Rational& a = (*this)(i, l);
            if (sgn(a) == 0) continue;
            for (std::size_t j = 0; j < dim_; ++j) out[i * dim_ + j] += a * rhs(l, j);
        }
    return NsMatrix(dim_, std::move(out));
}

NsMatrix NsMatrix::operator+(const NsMatrix& rhs) const {
    if (dim_ != rhs.dim_) throw InputError("matrix dimension mismatch in sum");
    std::vector<Rational> out(entries_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += rhs.entries_[i];
    return NsMatrix(dim_, std::move(out));
}

bool NsMatrix::operator==(const NsMatrix& rhs) const {
    return dim_ == rhs.dim_ && entries_ == rhs.entries_;
}

std::string NsMatrix::str() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < dim_; ++i) {
        os << (i ? ",[" : "[");
        for (std::size_t j = 0; j < dim_; ++j) os << (j ? "," : "") << (*this)(i, j).get_str();
        os << ']';
    }
    os << ']';
    return os.str();
}

// ---------------------------------------------------------------------------
// GeneratorSet / Word

GeneratorSet::GeneratorSet(std::vector<NsMatrix> matrices, std::vector<std::string> labels)
    : matrices_(std::move(matrices)), labels_(std::move(labels)) {
    if (matrices_.empty()) throw InputError("generator set needs at least one matrix");
    for (std::size_t i = 0; i < matrices_.size(); ++i)
        if (matrices_[i].dim() != matrices_.front().dim())
            throw InputError("generators[" + std::to_string(i) + "]: dimension differs from generators[0]");
    if (labels_.empty())
        for (std::size_t i = 0; i < matrices_.size(); ++i) labels_.push_back("f" + std::to_string(i + 1));
    if (labels_.size() != matrices_.size()) throw InputError("label count differs from generator count");
}

std::string Word::str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(indices[i]);
    }
    return s + ")";
}

Word concat(const Word& first, const Word& second) {
    Word w = first;
    w.indices.insert(w.indices.end(), second.indices.begin(), second.indices.end());
    return w;
}

void validate_word(const Word& w, std::size_t k) {
    for (std::size_t i : w.indices)
        if (i < 1 || i > k)
            throw InputError("word index " + std::to_string(i) + " out of range 1.." + std::to_string(k));
}

// ---------------------------------------------------------------------------
// Spectral quantities

double spectral_radius(const Eigen::MatrixXd& m) {
    if (m.rows() == 1) return std::abs(m(0, 0));
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        std::ostringstream os;
        os << m.format(Eigen::IOFormat(Eigen::FullPrecision, Eigen::DontAlignCols, ",", ";", "", "", "[", "]"));
        throw EigenSolverError("eigenvalue solver did not converge", os.str());
    }
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

using Poly = std::vector<Rational>; // coefficients, constant term first

void trim(Poly& p) {
    while (p.size() > 1 && sgn(p.back()) == 0) p.pop_back();
}

// Faddeev-LeVerrier over Q: det(xI - A).
Poly charpoly(const NsMatrix& a) {
    const std::size_t n = a.dim();
    Poly c(n + 1);
    c[n] = 1;
    NsMatrix m(n, std::vector<Rational>(n * n)); // M_0 = 0
    for (std::size_t k = 1; k <= n; ++k) {
        NsMatrix next = a * m;
        for (std::size_t i = 0; i < n; ++i) next(i, i) += c[n - k + 1];
        m = std::move(next);
        const NsMatrix am = a * m;
        Rational tr = 0;
        for (std::size_t i = 0; i < n; ++i) tr += am(i, i);
        c[n - k] = -tr / static_cast<long>(k);
    }
    return c;
}

// Remainder of a / b (b nonzero); quotient written to q when given.
Poly poly_divmod(Poly a, const Poly& b, Poly* q = nullptr) {
    trim(a);
    const std::size_t db = b.size() - 1;
    Poly quot(a.size() >= b.size() ? a.size() - db : 1);
    while (a.size() >= b.size() && !(a.size() == 1 && sgn(a[0]) == 0)) {
        const std::size_t shift = a.size() - b.size();
        const Rational f = a.back() / b.back();
        quot[shift] = f;
        for (std::size_t i = 0; i <= db; ++i) a[shift + i] -= f * b[i];
        a.pop_back();
        if (a.empty()) a.push_back(0);
        trim(a);
    }
    if (q) *q = quot;
    return a;
}

bool is_zero(const Poly& p) { return p.size() == 1 && sgn(p[0]) == 0; }

Poly poly_gcd(Poly a, Poly b) {
    trim(a);
    trim(b);
    while (!is_zero(b)) {
        Poly r = poly_divmod(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

// Largest root modulus of a squarefree polynomial: companion eigenvalues,
// then a few Newton steps each.
double max_root_modulus(const Poly& p) {
    const std::size_t d = p.size() - 1;
    if (d == 0) return 0.0;
    std::vector<double> c(d + 1);
    for (std::size_t i = 0; i <= d; ++i) c[i] = to_double_nearest(p[i] / p[d]);
    if (d == 1) return std::abs(c[0]);
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 1; i < d; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    for (std::size_t i = 0; i < d; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d - 1)) = -c[i];
    Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, false);
    if (solver.info() != Eigen::Success) throw EigenSolverError("companion eigenvalue solver did not converge", "");
    double best = 0.0;
    for (Eigen::Index r = 0; r < solver.eigenvalues().size(); ++r) {
        std::complex<long double> z(solver.eigenvalues()(r).real(), solver.eigenvalues()(r).imag());
        for (int it = 0; it < 4; ++it) {
            std::complex<long double> f = 1.0L, df = 0.0L;
            for (std::size_t i = d; i-- > 0;) {
                df = df * z + f;
                f = f * z + static_cast<long double>(c[i]);
            }
            if (std::abs(df) == 0.0L) break;
            z -= f / df;
        }
        best = std::max(best, static_cast<double>(std::abs(z)));
    }
    return best;
}

} // namespace

// Exact characteristic polynomial reduced to its squarefree part, so that
// repeated (possibly defective) eigenvalues do not lose half the digits.
double spectral_radius(const NsMatrix& m) {
    if (m.dim() == 1) return std::abs(to_double_nearest(m(0, 0)));
    const Poly p = charpoly(m);
    Poly dp(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) dp[i - 1] = p[i] * static_cast<long>(i);
    const Poly g = poly_gcd(p, dp);
    Poly sqfree;
    poly_divmod(p, g, &sqfree);
    trim(sqfree);
    return max_root_modulus(sqfree);
}

double operator_norm(const Eigen::MatrixXd& m) {
    if (m.rows() == 1) return std::abs(m(0, 0));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

NsMatrix word_matrix(const GeneratorSet& gens, const Word& w) {
    validate_word(w, gens.size());
    NsMatrix m = NsMatrix::identity(gens.dim());
    for (std::size_t i : w.indices) m = gens[i - 1] * m;
    return m;
}

WordScan scan_words(const GeneratorSet& gens, std::size_t max_len, std::uint64_t budget) {
    if (max_len < 1) throw InputError("max_len must be at least 1");
    const std::size_t k = gens.size();
    WordScan scan;

    for (std::size_t n = 1; n <= max_len; ++n) {
        LengthStats stats;
        stats.length = n;
        // prefix[d] is the matrix of the first d letters of the current word.
        std::vector<NsMatrix> prefix(n + 1);
        prefix[0] = NsMatrix::identity(gens.dim());
        std::vector<std::size_t> letters(n, 0);
        std::size_t depth = 0; // number of letters whose prefix product is valid
        bool complete = true;

        while (true) {
            while (depth < n) {
                if (scan.multiplications >= budget) {
                    complete = false;
                    break;
                }
                prefix[depth + 1] = gens[letters[depth]] * prefix[depth];
                ++scan.multiplications;
                ++depth;
            }
            if (!complete) break;

            const double rho = spectral_radius(prefix[n]);
            const double norm = operator_norm(prefix[n].to_double());
            if (stats.rho_witness.indices.empty() || rho > stats.max_rho * (1.0 + 1e-12)) {
                stats.max_rho = rho;
                stats.rho_witness.indices.assign(letters.begin(), letters.end());
                for (auto& i : stats.rho_witness.indices) ++i;
            }
            stats.max_norm = std::max(stats.max_norm, norm);

            // advance to the lexicographic successor of the same length
            std::size_t pos = n;
            while (pos > 0 && letters[pos - 1] + 1 == k) --pos;
            if (pos == 0) break;
            ++letters[pos - 1];
            std::fill(letters.begin() + static_cast<std::ptrdiff_t>(pos), letters.end(), 0);
            depth = pos - 1;
        }

        if (!complete) {
            scan.truncated = true;
            break;
        }
        scan.lengths.push_back(std::move(stats));
    }
    return scan;
}

LowerBound delta_lower(const WordScan& scan) {
    LowerBound out;
    out.truncated = scan.truncated;
    out.lengths_used = scan.lengths.size();
    bool have = false;
    for (const auto& s : scan.lengths) {
        const double v = std::pow(s.max_rho, 1.0 / static_cast<double>(s.length));
        if (!have || v > out.value * (1.0 + 1e-12)) {
            out.value = v;
            out.witness = s.rho_witness;
            have = true;
        }
    }
    return out;
}

LowerBound delta_lower(const GeneratorSet& gens, std::size_t max_len, std::uint64_t budget) {
    return delta_lower(scan_words(gens, max_len, budget));
}

UpperBound delta_upper(const WordScan& scan) {
    UpperBound out;
    out.truncated = scan.truncated;
    out.lengths_used = scan.lengths.size();
    for (const auto& s : scan.lengths) {
        const double v = std::pow(s.max_norm, 1.0 / static_cast<double>(s.length));
        if (v < out.value) {
            out.value = v;
            out.best_length = s.length;
        }
    }
    return out;
}

UpperBound delta_upper(const GeneratorSet& gens, std::size_t max_len, std::uint64_t budget) {
    return delta_upper(scan_words(gens, max_len, budget));
}

DeltaBracket delta_estimate(const GeneratorSet& gens, std::size_t max_len, double tol,
                            std::uint64_t budget) {
    if (!(tol > 0)) throw InputError("tolerance must be positive");
    const WordScan scan = scan_words(gens, max_len, budget);
    const LowerBound lo = delta_lower(scan);
    const UpperBound up = delta_upper(scan);
    DeltaBracket b;
    b.lower = lo.value;
    b.upper = up.value;
    b.lower_witness = lo.witness;
    b.lengths_used = scan.lengths.size();
    b.truncated = scan.truncated;
    b.converged = (b.upper - b.lower) <= tol;
    return b;
}

NsMatrix sum_pullback(const GeneratorSet& gens) {
    NsMatrix s = gens[0];
    for (std::size_t i = 1; i < gens.size(); ++i) s = s + gens[i];
    return s;
}

Eigendivisor find_eigendivisor(const GeneratorSet& gens, std::size_t delta_len, std::uint64_t budget) {
    const NsMatrix sum = sum_pullback(gens);
    const Eigen::MatrixXd s = sum.to_double();
    const std::size_t r = gens.dim();

    Eigendivisor out;
    if (r == 1) {
        out.beta = std::abs(s(0, 0));
        if (s(0, 0) < 0)
            throw ComputationError("dominant eigenvalue of the summed pullback is negative; supply (beta, D) manually");
        out.coeffs = {1.0};
    } else {
        Eigen::EigenSolver<Eigen::MatrixXd> solver(s, true);
        if (solver.info() != Eigen::Success)
            throw EigenSolverError("eigenvalue solver did not converge", sum.str());
        const auto& ev = solver.eigenvalues();
        const double rho = ev.cwiseAbs().maxCoeff();
        const double tol = 1e-9 * std::max(1.0, rho);

        Eigen::Index chosen = -1;
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (std::abs(ev[i]) < rho - tol) continue;
            if (std::abs(ev[i].imag()) <= tol && ev[i].real() >= 0) {
                chosen = i;
                break;
            }
        }
        if (chosen < 0)
            throw ComputationError(
                "dominant eigenvalue of the summed pullback is not real nonnegative; supply (beta, D) manually");

        const double lambda = ev[chosen].real();
        Eigen::Index algebraic = 0;
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            if (std::abs(ev[i] - std::complex<double>(lambda, 0.0)) <= 1e-7 * std::max(1.0, rho)) ++algebraic;
        const Eigen::MatrixXd shifted = s - lambda * Eigen::MatrixXd::Identity(r, r);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(shifted);
        const auto& sv = svd.singularValues();
        Eigen::Index geometric = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv[i] <= 1e-7 * std::max(1.0, rho)) ++geometric;
        if (geometric < algebraic)
            throw ComputationError("dominant eigenvalue of the summed pullback is defective; supply (beta, D) manually");

        Eigen::VectorXd v = solver.eigenvectors().col(chosen).real();
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        v /= v[arg];
        out.beta = lambda;
        out.coeffs.assign(v.data(), v.data() + v.size());
    }

    out.delta_lower = delta_lower(gens, delta_len, budget).value;
    out.condition_ok = out.beta > static_cast<double>(gens.size()) * std::sqrt(out.delta_lower);
    return out;
}

} // namespace orbitdeg
