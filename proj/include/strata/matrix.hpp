#pragma once

#include <optional>
#include <vector>

#include "strata/scalar.hpp"

namespace strata {

/// Dense matrix over an exact field.  Row reduction uses a fixed pivot rule
/// (leftmost column, first nonzero row) so every derived basis is
/// deterministic and results are reproducible across runs.
class Mat {
  public:
    Mat() : field_(FieldSpec::rationals()) {}
    Mat(const FieldSpec& f, int rows, int cols)
        : field_(f), rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, Scalar::zero(f)) {}

    static Mat identity(const FieldSpec& f, int n);
    static Mat zero(const FieldSpec& f, int rows, int cols) { return Mat(f, rows, cols); }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const FieldSpec& field() const { return field_; }
    bool is_zero() const;
    bool is_identity() const;

    Scalar& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    const Scalar& at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    Mat operator+(const Mat& o) const;
    Mat operator-(const Mat& o) const;
    Mat operator*(const Mat& o) const;
    Mat operator*(const Scalar& s) const;
    bool operator==(const Mat& o) const;
    bool operator!=(const Mat& o) const { return !(*this == o); }

    Mat transpose() const;
    Mat col(int c) const;
    Mat cols_slice(const std::vector<int>& idx) const;
    Mat block(int r0, int c0, int nr, int nc) const;
    void set_block(int r0, int c0, const Mat& b);

    static Mat hstack(const Mat& a, const Mat& b);
    static Mat vstack(const Mat& a, const Mat& b);
    static Mat diag_sum(const Mat& a, const Mat& b);

    Mat pow(unsigned e) const;

    std::string to_string() const;

  private:
    FieldSpec field_;
    int rows_ = 0, cols_ = 0;
    std::vector<Scalar> data_;
};

/// In-place reduced row echelon form; returns the pivot column indices.
std::vector<int> rref(Mat& m);

int rank(Mat m);

/// Columns spanning the kernel {x : m x = 0}, in the deterministic
/// free-variable order induced by rref.
Mat nullspace(const Mat& m);

/// Columns of `m` forming a basis of its column space (pivot columns).
Mat column_space(const Mat& m);

/// One solution of m x = b, if any.
std::optional<Mat> solve(const Mat& m, const Mat& b);

std::optional<Mat> inverse(const Mat& m);

/// Does the column span of `sub` lie inside the column span of `space`?
bool span_contains(const Mat& space, const Mat& sub);

/// Coordinates of the columns of v in terms of the columns of basis
/// (throws if v is not in the span).
Mat coordinates_in(const Mat& basis, const Mat& v);

/// Basis (as columns) of the sum of two column spans, reduced deterministically.
Mat span_sum(const Mat& a, const Mat& b);

}  // namespace strata
