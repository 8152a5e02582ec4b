use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Sparse matrix over the rationals, stored by rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, BigRational>>,
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

impl RationalMatrix {
    pub fn zero(rows: usize, cols: usize) -> RationalMatrix {
        RationalMatrix {
            rows,
            cols,
            data: vec![BTreeMap::new(); rows],
        }
    }

    pub fn identity(n: usize) -> RationalMatrix {
        let mut m = RationalMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> RationalMatrix {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = RationalMatrix::zero(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (c, v) in row.iter().enumerate() {
                m.set(r, c, BigRational::from_integer(BigInt::from(*v)));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> BigRational {
        self.data[r].get(&c).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        if v.is_zero() {
            self.data[r].remove(&c);
        } else {
            self.data[r].insert(c, v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &BigRational) {
        let cur = self.get(r, c);
        self.set(r, c, cur + v);
    }

    pub fn nonzeros(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BTreeMap::is_empty)
    }

    /// Rows stacked below `self`.
    pub fn stack(&self, below: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, below.cols, "column mismatch");
        let mut data = self.data.clone();
        data.extend(below.data.iter().cloned());
        RationalMatrix {
            rows: self.rows + below.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = RationalMatrix::zero(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            let mut acc: BTreeMap<usize, BigRational> = BTreeMap::new();
            for (k, a) in row {
                for (c, b) in &other.data[*k] {
                    *acc.entry(*c).or_insert_with(BigRational::zero) += a * b;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.data[r] = acc;
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        self.data
            .iter()
            .map(|row| row.iter().map(|(c, a)| a * &v[*c]).sum())
            .collect()
    }

    /// Exact rank by sparse Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut pivots: BTreeMap<usize, BTreeMap<usize, BigRational>> = BTreeMap::new();
        for row in &self.data {
            let mut row = row.clone();
            while let Some((&c, lead)) = row.iter().next() {
                match pivots.get(&c) {
                    Some(p) => {
                        let f = lead.clone();
                        for (pc, pv) in p {
                            let v = row.remove(pc).unwrap_or_else(BigRational::zero) - &f * pv;
                            if !v.is_zero() {
                                row.insert(*pc, v);
                            }
                        }
                    }
                    None => {
                        let inv = lead.recip();
                        row.values_mut().for_each(|v| *v *= &inv);
                        pivots.insert(c, row);
                        break;
                    }
                }
            }
        }
        pivots.len()
    }

    pub fn kernel_dim(&self) -> usize {
        self.cols - self.rank()
    }

    /// Whether every entry lies in `{0, ±1, ±½}`.
    pub fn has_symbol_entries(&self) -> bool {
        self.data
            .iter()
            .flat_map(BTreeMap::values)
            .all(|v| v.abs().is_one() || v.abs() == half())
    }
}
