//! Exact rank over the rationals for integer matrices.
//!
//! Rows are reduced incrementally by fraction-free elimination against an
//! echelon basis. Arithmetic runs in `i128` with overflow checks; if any
//! intermediate overflows, the whole computation restarts on big integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;

trait Scalar: Clone + Integer + Signed {
    fn mul_sub(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
}

impl Scalar for i128 {
    fn mul_sub(a: &i128, x: &i128, b: &i128, y: &i128) -> Option<i128> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?)
    }
}

impl Scalar for BigInt {
    fn mul_sub(a: &BigInt, x: &BigInt, b: &BigInt, y: &BigInt) -> Option<BigInt> {
        Some(a * x - b * y)
    }
}

struct Echelon<T> {
    // (pivot column, row); kept sorted by pivot
    rows: Vec<(usize, Vec<T>)>,
}

impl<T: Scalar> Echelon<T> {
    fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    /// Reduces `v` and stores it if it is independent. `None` on overflow.
    fn insert(&mut self, mut v: Vec<T>) -> Option<bool> {
        for (pc, b) in &self.rows {
            if v[*pc].is_zero() {
                continue;
            }
            let (bp, vp) = (b[*pc].clone(), v[*pc].clone());
            for k in 0..v.len() {
                v[k] = T::mul_sub(&bp, &v[k], &vp, &b[k])?;
            }
            normalize(&mut v);
        }
        match v.iter().position(|x| !x.is_zero()) {
            None => Some(false),
            Some(pc) => {
                let at = self.rows.partition_point(|(p, _)| *p < pc);
                self.rows.insert(at, (pc, v));
                Some(true)
            }
        }
    }
}

fn normalize<T: Scalar>(v: &mut [T]) {
    let mut g = T::zero();
    for x in v.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
        }
    }
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = x.div_floor(&g);
        }
    }
}

fn rank_in<T: Scalar>(rows: &[Vec<i64>], conv: impl Fn(i64) -> T) -> Option<usize> {
    let mut ech = Echelon::<T>::new();
    let mut r = 0;
    for row in rows {
        if ech.insert(row.iter().map(|&x| conv(x)).collect())? {
            r += 1;
        }
    }
    Some(r)
}

/// Rank of the matrix whose rows are `rows`. All rows must share a length.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    if let Some(w) = rows.first().map(Vec::len) {
        assert!(rows.iter().all(|r| r.len() == w), "ragged matrix");
    }
    rank_in::<i128>(rows, i128::from)
        .or_else(|| rank_in::<BigInt>(rows, BigInt::from))
        .expect("big-integer elimination cannot overflow")
}
