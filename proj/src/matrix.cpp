#include "strata/matrix.hpp"

#include <sstream>
#include <stdexcept>

namespace strata {

Mat Mat::identity(const FieldSpec& f, int n) {
    Mat m(f, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = Scalar::one(f);
    return m;
}

bool Mat::is_zero() const {
    for (const auto& x : data_)
        if (!x.is_zero()) return false;
    return true;
}

bool Mat::is_identity() const {
    if (rows_ != cols_) return false;
    return *this == identity(field_, rows_);
}

Mat Mat::operator+(const Mat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::logic_error("Mat: shape mismatch in +");
    Mat r = *this;
    for (size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
    return r;
}

Mat Mat::operator-(const Mat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::logic_error("Mat: shape mismatch in -");
    Mat r = *this;
    for (size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
    return r;
}

Mat Mat::operator*(const Mat& o) const {
    if (cols_ != o.rows_) throw std::logic_error("Mat: shape mismatch in *");
    Mat r(field_, rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const Scalar& a = at(i, k);
            if (a.is_zero()) continue;
            for (int j = 0; j < o.cols_; ++j) {
                const Scalar& b = o.at(k, j);
                if (!b.is_zero()) r.at(i, j) += a * b;
            }
        }
    return r;
}

Mat Mat::operator*(const Scalar& s) const {
    Mat r = *this;
    for (auto& x : r.data_) x *= s;
    return r;
}

bool Mat::operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

Mat Mat::transpose() const {
    Mat r(field_, cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
}

Mat Mat::col(int c) const { return block(0, c, rows_, 1); }

Mat Mat::cols_slice(const std::vector<int>& idx) const {
    Mat r(field_, rows_, static_cast<int>(idx.size()));
    for (size_t j = 0; j < idx.size(); ++j)
        for (int i = 0; i < rows_; ++i) r.at(i, static_cast<int>(j)) = at(i, idx[j]);
    return r;
}

Mat Mat::block(int r0, int c0, int nr, int nc) const {
    Mat r(field_, nr, nc);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) r.at(i, j) = at(r0 + i, c0 + j);
    return r;
}

void Mat::set_block(int r0, int c0, const Mat& b) {
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) at(r0 + i, c0 + j) = b.at(i, j);
}

Mat Mat::hstack(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows()) throw std::logic_error("Mat: hstack row mismatch");
    Mat r(a.field(), a.rows(), a.cols() + b.cols());
    r.set_block(0, 0, a);
    r.set_block(0, a.cols(), b);
    return r;
}

Mat Mat::vstack(const Mat& a, const Mat& b) {
    if (a.cols() != b.cols()) throw std::logic_error("Mat: vstack col mismatch");
    Mat r(a.field(), a.rows() + b.rows(), a.cols());
    r.set_block(0, 0, a);
    r.set_block(a.rows(), 0, b);
    return r;
}

Mat Mat::diag_sum(const Mat& a, const Mat& b) {
    Mat r(a.field(), a.rows() + b.rows(), a.cols() + b.cols());
    r.set_block(0, 0, a);
    r.set_block(a.rows(), a.cols(), b);
    return r;
}

Mat Mat::pow(unsigned e) const {
    if (rows_ != cols_) throw std::logic_error("Mat: pow of non-square");
    Mat acc = identity(field_, rows_), base = *this;
    while (e) {
        if (e & 1) acc = acc * base;
        base = e > 1 ? base * base : base;
        e >>= 1;
    }
    return acc;
}

std::string Mat::to_string() const {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < rows_; ++i) {
        os << "[";
        for (int j = 0; j < cols_; ++j) os << at(i, j).to_string() << (j + 1 < cols_ ? "," : "");
        os << "]";
    }
    os << "]";
    return os.str();
}

std::vector<int> rref(Mat& m) {
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
        int sel = -1;
        for (int i = r; i < m.rows(); ++i)
            if (!m.at(i, c).is_zero()) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        if (sel != r)
            for (int j = 0; j < m.cols(); ++j) std::swap(m.at(sel, j), m.at(r, j));
        Scalar inv = m.at(r, c).inverse();
        for (int j = c; j < m.cols(); ++j) m.at(r, j) *= inv;
        for (int i = 0; i < m.rows(); ++i) {
            if (i == r || m.at(i, c).is_zero()) continue;
            Scalar f = m.at(i, c);
            for (int j = c; j < m.cols(); ++j) m.at(i, j) -= f * m.at(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

int rank(Mat m) { return static_cast<int>(rref(m).size()); }

Mat nullspace(const Mat& m) {
    Mat red = m;
    std::vector<int> pivots = rref(red);
    std::vector<bool> is_pivot(m.cols(), false);
    for (int p : pivots) is_pivot[p] = true;
    std::vector<int> free_cols;
    for (int c = 0; c < m.cols(); ++c)
        if (!is_pivot[c]) free_cols.push_back(c);
    Mat ker(m.field(), m.cols(), static_cast<int>(free_cols.size()));
    for (size_t k = 0; k < free_cols.size(); ++k) {
        int fc = free_cols[k];
        ker.at(fc, static_cast<int>(k)) = Scalar::one(m.field());
        for (size_t pr = 0; pr < pivots.size(); ++pr)
            ker.at(pivots[pr], static_cast<int>(k)) = -red.at(static_cast<int>(pr), fc);
    }
    return ker;
}

Mat column_space(const Mat& m) {
    Mat red = m;
    return m.cols_slice(rref(red));
}

std::optional<Mat> solve(const Mat& m, const Mat& b) {
    if (m.rows() != b.rows()) throw std::logic_error("solve: shape mismatch");
    Mat aug = Mat::hstack(m, b);
    std::vector<int> pivots = rref(aug);
    for (int p : pivots)
        if (p >= m.cols()) return std::nullopt;
    Mat x(m.field(), m.cols(), b.cols());
    for (size_t r = 0; r < pivots.size(); ++r)
        for (int j = 0; j < b.cols(); ++j) x.at(pivots[r], j) = aug.at(static_cast<int>(r), m.cols() + j);
    return x;
}

std::optional<Mat> inverse(const Mat& m) {
    if (m.rows() != m.cols()) return std::nullopt;
    Mat aug = Mat::hstack(m, Mat::identity(m.field(), m.rows()));
    std::vector<int> pivots = rref(aug);
    if (static_cast<int>(pivots.size()) != m.rows()) return std::nullopt;
    return aug.block(0, m.cols(), m.rows(), m.cols());
}

bool span_contains(const Mat& space, const Mat& sub) {
    if (sub.cols() == 0) return true;
    return rank(Mat::hstack(space, sub)) == rank(space);
}

Mat coordinates_in(const Mat& basis, const Mat& v) {
    auto x = solve(basis, v);
    if (!x) throw std::logic_error("coordinates_in: vector outside span");
    return *x;
}

Mat span_sum(const Mat& a, const Mat& b) { return column_space(Mat::hstack(a, b)); }

}  // namespace strata
