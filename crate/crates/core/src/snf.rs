//! Smith normal form over the integers.
//!
//! Elimination always pivots on the nonzero entry of least absolute value in
//! the active block, ties broken by `(row, col)` in lexicographic order. The
//! resulting diagonal is then brought into divisibility order with 2x2
//! gcd/lcm steps, which also pushes zeros to the end.
//!
//! The same elimination kernel runs on checked `i64` and on `BigInt`. Without
//! transforms the `i64` kernel is tried first and any overflow restarts the
//! whole computation on `BigInt`, so results are always exact. The `BigInt`
//! run is the reference path and can be forced with
//! [`SnfOptions::force_reference`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::matrix::IntegerMatrix;
use crate::par::Execution;

use kernel::Eliminator;

/// Rows below this count are updated sequentially.
const MIN_PARALLEL_ROWS: usize = 64;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SnfOptions {
    /// Also return unimodular `U`, `V` with `U * A * V = diag(d)`.
    pub transforms: bool,
    /// Skip the machine-word kernel and eliminate on `BigInt` only.
    pub force_reference: bool,
    pub execution: Execution,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    /// Nonnegative diagonal of length `min(rows, cols)`, `d[i] | d[i + 1]`.
    pub diagonal: Vec<BigInt>,
    pub left: Option<IntegerMatrix>,
    pub right: Option<IntegerMatrix>,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().take_while(|d| !d.is_zero()).count()
    }

    /// Diagonal entries greater than one.
    pub fn nontrivial_factors(&self) -> Vec<BigInt> {
        self.diagonal
            .iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .cloned()
            .collect()
    }

    pub fn is_divisibility_chain(&self) -> bool {
        self.diagonal.windows(2).all(|w| {
            if w[0].is_zero() {
                w[1].is_zero()
            } else {
                (&w[1] % &w[0]).is_zero()
            }
        }) && self.diagonal.iter().all(|d| !d.is_negative())
    }
}

pub fn smith_normal_form(a: &IntegerMatrix) -> SnfResult {
    smith_normal_form_with(a, SnfOptions::default())
}

pub fn smith_normal_form_with(a: &IntegerMatrix, opts: SnfOptions) -> SnfResult {
    if !opts.transforms && !opts.force_reference {
        if let Some(rows) = to_machine(a) {
            if let Some(out) = Eliminator::new(rows, a.cols(), false, opts.execution).run() {
                let mut diagonal: Vec<BigInt> =
                    out.diagonal.into_iter().map(BigInt::from).collect();
                normalize(&mut diagonal, None);
                return SnfResult {
                    diagonal,
                    left: None,
                    right: None,
                };
            }
        }
    }
    let rows = a.to_rows();
    let out = Eliminator::new(rows, a.cols(), opts.transforms, opts.execution)
        .run()
        .expect("arbitrary precision elimination cannot overflow");
    let mut diagonal = out.diagonal;
    match (out.left, out.right_t) {
        (Some(mut u), Some(mut vt)) => {
            normalize(&mut diagonal, Some((&mut u, &mut vt)));
            let left = IntegerMatrix::from_rows(&u).expect("rectangular");
            let right = IntegerMatrix::from_rows(&vt)
                .expect("rectangular")
                .transpose();
            SnfResult {
                diagonal,
                left: Some(left),
                right: Some(right),
            }
        }
        _ => {
            normalize(&mut diagonal, None);
            SnfResult {
                diagonal,
                left: None,
                right: None,
            }
        }
    }
}

fn to_machine(a: &IntegerMatrix) -> Option<Vec<Vec<i64>>> {
    (0..a.rows())
        .map(|i| a.row(i).iter().map(ToPrimitive::to_i64).collect())
        .collect()
}

mod kernel {
    use std::cmp::Ordering;

    use num_bigint::BigInt;
    use num_traits::{One, Signed, Zero};

    use super::MIN_PARALLEL_ROWS;
    use crate::par::{self, Execution};

    /// Exact ring operations the elimination kernel needs. Machine integers
    /// report overflow by returning `None`.
    pub(super) trait Entry: Clone + Send + Sync + 'static {
        fn zero() -> Self;
        fn one() -> Self;
        fn is_zero(&self) -> bool;
        fn is_negative(&self) -> bool;
        fn is_unit(&self) -> bool;
        fn cmp_abs(&self, other: &Self) -> Ordering;
        /// Truncated quotient.
        fn quot(&self, d: &Self) -> Option<Self>;
        /// `self -= q * x`.
        fn sub_mul(&mut self, q: &Self, x: &Self) -> Option<()>;
        fn negate(&mut self) -> Option<()>;
    }

    impl Entry for i64 {
        fn zero() -> Self {
            0
        }
        fn one() -> Self {
            1
        }
        fn is_zero(&self) -> bool {
            *self == 0
        }
        fn is_negative(&self) -> bool {
            *self < 0
        }
        fn is_unit(&self) -> bool {
            *self == 1 || *self == -1
        }
        fn cmp_abs(&self, other: &Self) -> Ordering {
            self.unsigned_abs().cmp(&other.unsigned_abs())
        }
        fn quot(&self, d: &Self) -> Option<Self> {
            self.checked_div(*d)
        }
        fn sub_mul(&mut self, q: &Self, x: &Self) -> Option<()> {
            *self = self.checked_sub(q.checked_mul(*x)?)?;
            Some(())
        }
        fn negate(&mut self) -> Option<()> {
            *self = self.checked_neg()?;
            Some(())
        }
    }

    impl Entry for BigInt {
        fn zero() -> Self {
            Zero::zero()
        }
        fn one() -> Self {
            One::one()
        }
        fn is_zero(&self) -> bool {
            Zero::is_zero(self)
        }
        fn is_negative(&self) -> bool {
            Signed::is_negative(self)
        }
        fn is_unit(&self) -> bool {
            self.magnitude().is_one()
        }
        fn cmp_abs(&self, other: &Self) -> Ordering {
            self.magnitude().cmp(other.magnitude())
        }
        fn quot(&self, d: &Self) -> Option<Self> {
            Some(self / d)
        }
        fn sub_mul(&mut self, q: &Self, x: &Self) -> Option<()> {
            *self -= q * x;
            Some(())
        }
        fn negate(&mut self) -> Option<()> {
            *self = -std::mem::take(self);
            Some(())
        }
    }

    pub(super) struct Elimination<T> {
        pub(super) diagonal: Vec<T>,
        pub(super) left: Option<Vec<Vec<T>>>,
        pub(super) right_t: Option<Vec<Vec<T>>>,
    }

    /// Rows of `A` optionally augmented with `U` (columns `cols..`); `V` kept
    /// transposed so column operations become row operations.
    pub(super) struct Eliminator<T> {
        rows: Vec<Vec<T>>,
        cols: usize,
        right_t: Option<Vec<Vec<T>>>,
        execution: Execution,
    }

    impl<T: Entry> Eliminator<T> {
        pub(super) fn new(
            mut rows: Vec<Vec<T>>,
            cols: usize,
            transforms: bool,
            execution: Execution,
        ) -> Self {
            let n_rows = rows.len();
            let right_t = if transforms {
                for (i, row) in rows.iter_mut().enumerate() {
                    row.extend((0..n_rows).map(|k| if k == i { T::one() } else { T::zero() }));
                }
                Some(
                    (0..cols)
                        .map(|i| {
                            (0..cols)
                                .map(|k| if k == i { T::one() } else { T::zero() })
                                .collect()
                        })
                        .collect(),
                )
            } else {
                None
            };
            Eliminator {
                rows,
                cols,
                right_t,
                execution,
            }
        }

        pub(super) fn run(mut self) -> Option<Elimination<T>> {
            let dim = self.rows.len().min(self.cols);
            let mut t = 0;
            while t < dim {
                let Some((pi, pj)) = self.min_abs_pivot(t) else {
                    break;
                };
                self.swap_rows(t, pi);
                self.swap_cols(t, pj);
                loop {
                    self.clear_column(t)?;
                    if let Some(i) = self.min_abs_below(t) {
                        self.swap_rows(t, i);
                        continue;
                    }
                    self.clear_row(t)?;
                    if let Some(j) = self.min_abs_right(t) {
                        self.swap_cols(t, j);
                        continue;
                    }
                    break;
                }
                if self.rows[t][t].is_negative() {
                    for x in &mut self.rows[t][t..] {
                        x.negate()?;
                    }
                }
                t += 1;
            }
            let cols = self.cols;
            let diagonal = (0..dim).map(|i| self.rows[i][i].clone()).collect();
            let left = self.right_t.is_some().then(|| {
                self.rows
                    .iter_mut()
                    .map(|r| r.split_off(cols))
                    .collect::<Vec<_>>()
            });
            Some(Elimination {
                diagonal,
                left,
                right_t: self.right_t,
            })
        }

        fn min_abs_pivot(&self, t: usize) -> Option<(usize, usize)> {
            let mut best: Option<(usize, usize)> = None;
            for i in t..self.rows.len() {
                for j in t..self.cols {
                    let x = &self.rows[i][j];
                    if x.is_zero() {
                        continue;
                    }
                    if x.is_unit() {
                        return Some((i, j));
                    }
                    let better = match best {
                        None => true,
                        Some((bi, bj)) => x.cmp_abs(&self.rows[bi][bj]) == Ordering::Less,
                    };
                    if better {
                        best = Some((i, j));
                    }
                }
            }
            best
        }

        /// Row of the smallest nonzero entry strictly below the pivot, if any.
        fn min_abs_below(&self, t: usize) -> Option<usize> {
            let mut best: Option<usize> = None;
            for i in t + 1..self.rows.len() {
                let x = &self.rows[i][t];
                if !x.is_zero()
                    && best.is_none_or(|b| x.cmp_abs(&self.rows[b][t]) == Ordering::Less)
                {
                    best = Some(i);
                }
            }
            best
        }

        fn min_abs_right(&self, t: usize) -> Option<usize> {
            let row = &self.rows[t];
            let mut best: Option<usize> = None;
            for j in t + 1..self.cols {
                if !row[j].is_zero()
                    && best.is_none_or(|b| row[j].cmp_abs(&row[b]) == Ordering::Less)
                {
                    best = Some(j);
                }
            }
            best
        }

        fn swap_rows(&mut self, a: usize, b: usize) {
            self.rows.swap(a, b);
        }

        fn swap_cols(&mut self, a: usize, b: usize) {
            if a == b {
                return;
            }
            for row in &mut self.rows {
                row.swap(a, b);
            }
            if let Some(vt) = &mut self.right_t {
                vt.swap(a, b);
            }
        }

        /// Reduces every entry below the pivot modulo the pivot by row operations.
        fn clear_column(&mut self, t: usize) -> Option<()> {
            let (head, tail) = self.rows.split_at_mut(t + 1);
            let pivot_row = &head[t];
            let pivot = pivot_row[t].clone();
            let support: Vec<(usize, T)> = pivot_row
                .iter()
                .enumerate()
                .skip(t)
                .filter(|(_, x)| !x.is_zero())
                .map(|(k, x)| (k, x.clone()))
                .collect();
            par::try_for_each_mut(self.execution, tail, MIN_PARALLEL_ROWS, |row| {
                if row[t].is_zero() {
                    return Some(());
                }
                let q = row[t].quot(&pivot)?;
                if q.is_zero() {
                    return Some(());
                }
                for (k, x) in &support {
                    row[*k].sub_mul(&q, x)?;
                }
                Some(())
            })
        }

        /// Reduces row `t` right of the pivot. Column `t` is already zero off the
        /// pivot, so only row `t` of `A` changes.
        fn clear_row(&mut self, t: usize) -> Option<()> {
            let pivot = self.rows[t][t].clone();
            for j in t + 1..self.cols {
                if self.rows[t][j].is_zero() {
                    continue;
                }
                let q = self.rows[t][j].quot(&pivot)?;
                if q.is_zero() {
                    continue;
                }
                self.rows[t][j].sub_mul(&q, &pivot)?;
                if let Some(vt) = &mut self.right_t {
                    let (lo, hi) = vt.split_at_mut(j);
                    let src = &lo[t];
                    for (y, x) in hi[0].iter_mut().zip(src) {
                        y.sub_mul(&q, x)?;
                    }
                }
            }
            Some(())
        }
    }
}

type Rows = Vec<Vec<BigInt>>;

/// Turns a nonnegative diagonal into a divisibility chain with zeros last,
/// updating `U` (rows) and `V^T` (rows) when supplied.
fn normalize(d: &mut [BigInt], mut transforms: Option<(&mut Rows, &mut Rows)>) {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let (a, b) = (d[i].clone(), d[j].clone());
            if b.is_zero() || (!a.is_zero() && (&b % &a).is_zero()) {
                continue;
            }
            let eg = a.extended_gcd(&b);
            let g = eg.gcd;
            let l = &a / &g * &b;
            if let Some((u, vt)) = transforms.as_mut() {
                // row_i += row_j
                let row_j = u[j].clone();
                for (x, y) in u[i].iter_mut().zip(&row_j) {
                    *x += y;
                }
                // [col_i col_j] <- [col_i col_j] * [[s, -b/g], [t, a/g]]
                let (s, tc) = (&eg.x, &eg.y);
                let (bg, ag) = (&b / &g, &a / &g);
                let (vi, vj) = (vt[i].clone(), vt[j].clone());
                vt[i] = vi.iter().zip(&vj).map(|(x, y)| s * x + tc * y).collect();
                vt[j] = vi
                    .iter()
                    .zip(&vj)
                    .map(|(x, y)| -(&bg * x) + &ag * y)
                    .collect();
                // row_j -= (t * b / g) * row_i
                let c = tc * &bg;
                let row_i = u[i].clone();
                for (y, x) in u[j].iter_mut().zip(&row_i) {
                    *y -= &c * x;
                }
            }
            d[i] = g;
            d[j] = l;
        }
    }
}
