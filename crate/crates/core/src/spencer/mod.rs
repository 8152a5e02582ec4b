//! Symbol of `P = (d_J, d_h)` and its first prolongation, as exact
//! rational matrices on a single fibre.
//!
//! Tangent vectors are written in the frame `h₀ = S, h₁..hₙ, v₁..vₙ` with
//! `vᵢ = J hᵢ`. Semi-basic arguments only see `h₀..hₙ`, so `T_v*` has
//! dimension `n + 1` and `Λ²T_v*` is indexed by pairs `α < β` of `0..n`.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

mod matrix;

pub use matrix::RationalMatrix;

/// A frame vector: `Plain(α)` is `h_α` (`α ∈ 0..=n`), `Under(i)` is `v_i` (`i ∈ 1..=n`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Slot {
    Plain(usize),
    Under(usize),
}

impl Slot {
    fn index(self, n: usize) -> usize {
        match self {
            Slot::Plain(a) => a,
            Slot::Under(i) => n + i,
        }
    }

    fn from_index(k: usize, n: usize) -> Slot {
        if k <= n {
            Slot::Plain(k)
        } else {
            Slot::Under(k - n)
        }
    }

    fn j(self) -> Option<Slot> {
        match self {
            Slot::Plain(a) if a > 0 => Some(Slot::Under(a)),
            _ => None,
        }
    }

    fn h(self) -> Option<Slot> {
        match self {
            Slot::Plain(a) => Some(Slot::Plain(a)),
            Slot::Under(_) => None,
        }
    }
}

impl std::fmt::Display for Slot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Slot::Plain(a) => write!(f, "{a}"),
            Slot::Under(i) => write!(f, "_{i}"),
        }
    }
}

fn slots(n: usize) -> Vec<Slot> {
    (0..2 * n + 1).map(|k| Slot::from_index(k, n)).collect()
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect()
}

fn triples(n: usize) -> Vec<(usize, usize, usize)> {
    (0..=n)
        .flat_map(|a| (a + 1..=n).flat_map(move |b| (b + 1..=n).map(move |c| (a, b, c))))
        .collect()
}

/// Coordinates `A(X, h_β)` on `T*⊗T_v*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fiber1Basis {
    pub n: usize,
    pub labels: Vec<(Slot, usize)>,
}

impl Fiber1Basis {
    pub fn new(n: usize) -> Fiber1Basis {
        let mut labels: Vec<(Slot, usize)> = slots(n)
            .into_iter()
            .flat_map(|x| (0..=n).map(move |b| (x, b)))
            .collect();
        labels.sort();
        Fiber1Basis { n, labels }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn index(&self, x: Slot, b: usize) -> usize {
        x.index(self.n) * (self.n + 1) + b
    }
}

/// Coordinates `B(X, Y, h_γ)` on `S²T*⊗T_v*`, one per unordered `{X, Y}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fiber2Basis {
    pub n: usize,
    pub labels: Vec<(Slot, Slot, usize)>,
}

impl Fiber2Basis {
    pub fn new(n: usize) -> Fiber2Basis {
        let s = slots(n);
        let mut labels = Vec::new();
        for (a, x) in s.iter().enumerate() {
            for y in &s[a..] {
                for g in 0..=n {
                    labels.push((*x, *y, g));
                }
            }
        }
        labels.sort();
        Fiber2Basis { n, labels }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn index(&self, x: Slot, y: Slot, g: usize) -> usize {
        let (x, y) = if x <= y { (x, y) } else { (y, x) };
        self.labels.binary_search(&(x, y, g)).expect("label")
    }
}

fn one() -> BigRational {
    BigRational::one()
}

fn neg_one() -> BigRational {
    -BigRational::one()
}

/// `σ¹(P)A = (τ_J A, τ_h A)` with `(τ_K A)(X, Y) = A(KX, Y) − A(KY, X)`,
/// evaluated on horizontal pairs `(h_α, h_β)`, `α < β`.
pub fn sigma1(n: usize) -> RationalMatrix {
    assert!(n >= 1, "n must be positive");
    let basis = Fiber1Basis::new(n);
    let ps = pairs(n);
    let mut m = RationalMatrix::zero(2 * ps.len(), basis.dim());
    for (copy, k) in [Slot::j as fn(Slot) -> Option<Slot>, Slot::h].into_iter().enumerate() {
        for (r, &(a, b)) in ps.iter().enumerate() {
            let row = copy * ps.len() + r;
            if let Some(x) = k(Slot::Plain(a)) {
                m.add_to(row, basis.index(x, b), &one());
            }
            if let Some(y) = k(Slot::Plain(b)) {
                m.add_to(row, basis.index(y, a), &neg_one());
            }
        }
    }
    m
}

/// `σ²(P)B = (σ²(d_J)B, σ²(d_h)B)` with
/// `σ²(d_K)B(X, Y, Z) = B(X, KY, Z) − B(X, KZ, Y)`, on all frame vectors
/// `X` and horizontal pairs `(Y, Z)`.
///
/// Row order: copy, then `X`, then pair.
pub fn sigma2(n: usize) -> RationalMatrix {
    assert!(n >= 1, "n must be positive");
    let basis = Fiber2Basis::new(n);
    let ps = pairs(n);
    let s = slots(n);
    let mut m = RationalMatrix::zero(2 * s.len() * ps.len(), basis.dim());
    for (copy, k) in [Slot::j as fn(Slot) -> Option<Slot>, Slot::h].into_iter().enumerate() {
        for (xi, x) in s.iter().enumerate() {
            for (r, &(a, b)) in ps.iter().enumerate() {
                let row = (copy * s.len() + xi) * ps.len() + r;
                if let Some(y) = k(Slot::Plain(a)) {
                    m.add_to(row, basis.index(*x, y, b), &one());
                }
                if let Some(z) = k(Slot::Plain(b)) {
                    m.add_to(row, basis.index(*x, z, a), &neg_one());
                }
            }
        }
    }
    m
}

/// `τ = (τ_J B₁, τ_h B₂, τ_h B₁ + τ_J B₂)` on `T*⊗(Λ²T_v* ⊕ Λ²T_v*)` with
/// `τ_K B(X, Y, Z) = B(KX, Y, Z) − B(KY, X, Z) + B(KZ, X, Y)` on horizontal
/// triples. Columns follow the row order of [`sigma2`].
pub fn tau(n: usize) -> RationalMatrix {
    assert!(n >= 1, "n must be positive");
    let ps = pairs(n);
    let ts = triples(n);
    let nl = 2 * n + 1;
    let col = |copy: usize, x: Slot, a: usize, b: usize| -> (usize, BigRational) {
        let (pair, sign) = if a < b { ((a, b), one()) } else { ((b, a), neg_one()) };
        let r = ps.binary_search(&pair).expect("pair");
        ((copy * nl + x.index(n)) * ps.len() + r, sign)
    };
    let mut m = RationalMatrix::zero(3 * ts.len(), 2 * nl * ps.len());
    let mut put = |row: usize, copy: usize, k: fn(Slot) -> Option<Slot>, (a, b, c): (usize, usize, usize)| {
        for (first, y, z, sign) in [(a, b, c, 1i64), (b, a, c, -1), (c, a, b, 1)] {
            if let Some(x) = k(Slot::Plain(first)) {
                let (idx, s) = col(copy, x, y, z);
                m.add_to(row, idx, &(s * BigRational::from_integer(sign.into())));
            }
        }
    };
    for (r, &t) in ts.iter().enumerate() {
        put(r, 0, Slot::j, t);
        put(ts.len() + r, 1, Slot::h, t);
        put(2 * ts.len() + r, 0, Slot::h, t);
        put(2 * ts.len() + r, 1, Slot::j, t);
    }
    m
}

pub fn kernel_dim(m: &RationalMatrix) -> usize {
    m.kernel_dim()
}

/// Frame vectors of the quasi-regular basis `e₀ = S + h_j + vₙ`, `e₁ = h₁`,
/// `eᵢ = hᵢ + v_{i−1}`, as coefficient vectors over `h₀..hₙ, v₁..vₙ`.
pub fn quasi_regular_basis(n: usize, j: usize) -> Vec<Vec<i64>> {
    assert!((1..=n).contains(&j), "j must lie in 1..=n");
    let nl = 2 * n + 1;
    let mut out = Vec::with_capacity(n + 1);
    let mut e0 = vec![0; nl];
    e0[0] += 1;
    e0[j] += 1;
    e0[2 * n] += 1;
    out.push(e0);
    for i in 1..=n {
        let mut e = vec![0; nl];
        e[i] = 1;
        if i > 1 {
            e[n + i - 1] = 1;
        }
        out.push(e);
    }
    out
}

/// `[dim g¹, dim (g¹)_{e₀}, dim (g¹)_{e₀e₁}, …, dim (g¹)_{e₀…eₙ}]`.
pub fn quasi_regular_chain(n: usize, j: usize) -> Vec<usize> {
    let basis = Fiber1Basis::new(n);
    let mut system = sigma1(n);
    let mut chain = vec![system.kernel_dim()];
    for e in quasi_regular_basis(n, j) {
        // i_e A = Σ_X e[X] A(X, h_β) = 0 for every β.
        let mut rows = RationalMatrix::zero(n + 1, basis.dim());
        for b in 0..=n {
            for (k, c) in e.iter().enumerate() {
                if *c != 0 {
                    let idx = basis.index(Slot::from_index(k, n), b);
                    rows.add_to(b, idx, &BigRational::from_integer((*c).into()));
                }
            }
        }
        system = system.stack(&rows);
        chain.push(system.kernel_dim());
    }
    chain
}

/// Exact `dim coker σ²(P)`.
pub fn cokernel_dim(n: usize) -> usize {
    let s2 = sigma2(n);
    s2.rows() - s2.rank()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exactness {
    pub tau_sigma2_zero: bool,
    pub rank_sigma2: usize,
    pub kernel_tau: usize,
    /// `τ` onto its codomain.
    pub tau_onto: bool,
}

impl Exactness {
    pub fn holds(&self) -> bool {
        self.tau_sigma2_zero && self.rank_sigma2 == self.kernel_tau && self.tau_onto
    }
}

pub fn tau_maps(n: usize) -> (RationalMatrix, Exactness) {
    let t = tau(n);
    let s2 = sigma2(n);
    let rank_t = t.rank();
    let report = Exactness {
        tau_sigma2_zero: t.mul(&s2).is_zero(),
        rank_sigma2: s2.rank(),
        kernel_tau: t.cols() - rank_t,
        tau_onto: rank_t == t.rows(),
    };
    (t, report)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// One row of the symbol table, with closed forms alongside the exact values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolDims {
    pub n: usize,
    pub j: usize,
    pub dim_g1: usize,
    pub dim_g1_expected: usize,
    pub dim_g2: usize,
    pub dim_g2_expected: usize,
    pub chain: Vec<usize>,
    pub chain_expected: Vec<usize>,
    pub chain_sum: usize,
    pub dim_k: usize,
    pub dim_k_expected: usize,
    pub exactness: Exactness,
    pub symbol_entries: bool,
}

impl SymbolDims {
    pub fn all_match(&self) -> bool {
        self.dim_g1 == self.dim_g1_expected
            && self.dim_g2 == self.dim_g2_expected
            && self.chain == self.chain_expected
            && self.chain_sum == self.dim_g2
            && self.dim_k == self.dim_k_expected
            && self.exactness.holds()
            && self.symbol_entries
    }
}

pub fn symbol_dims(n: usize, j: usize) -> SymbolDims {
    let s1 = sigma1(n);
    let s2 = sigma2(n);
    let (t, exactness) = tau_maps(n);
    let chain = quasi_regular_chain(n, j);
    let mut chain_expected = vec![(n + 1) * (n + 1)];
    chain_expected.extend((0..=n).map(|k| (n + 1) * (n - k)));
    SymbolDims {
        n,
        j,
        dim_g1: s1.kernel_dim(),
        dim_g1_expected: (n + 1) * (n + 1),
        dim_g2: s2.kernel_dim(),
        dim_g2_expected: (n + 1) * (n + 1) * (n + 2) / 2,
        chain_sum: chain.iter().sum(),
        chain,
        chain_expected,
        dim_k: s2.rows() - exactness.rank_sigma2,
        dim_k_expected: 3 * binomial(n + 1, 3),
        exactness,
        symbol_entries: s1.has_symbol_entries() && s2.has_symbol_entries() && t.has_symbol_entries(),
    }
}

/// Characterisation of `g²`: `B(X, Y, h_γ)` totally symmetric over
/// horizontal and vertical slots alike (vertical slots never pair with
/// `h₀`), and zero elsewhere. Returns one kernel vector per independent
/// component.
pub fn g2_basis(n: usize) -> Vec<Vec<BigRational>> {
    let basis = Fiber2Basis::new(n);
    let mut out = Vec::new();
    let mut push = |entries: Vec<(Slot, Slot, usize)>| {
        let mut v = vec![BigRational::zero(); basis.dim()];
        for (x, y, g) in entries {
            v[basis.index(x, y, g)] = one();
        }
        out.push(v);
    };
    // B(h_α, h_β, h_γ), totally symmetric.
    for a in 0..=n {
        for b in a..=n {
            for c in b..=n {
                let mut e = Vec::new();
                for (x, y, g) in [(a, b, c), (a, c, b), (b, c, a)] {
                    e.push((Slot::Plain(x), Slot::Plain(y), g));
                }
                e.sort();
                e.dedup();
                push(e);
            }
        }
    }
    // B(v_i, h_j, h_k), symmetric in i, j, k ≥ 1.
    for i in 1..=n {
        for j in i..=n {
            for k in j..=n {
                let mut e = Vec::new();
                for (u, x, g) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                    e.push((Slot::Plain(x), Slot::Under(u), g));
                }
                e.sort();
                e.dedup();
                push(e);
            }
        }
    }
    // B(v_i, v_j, h_k), symmetric in i, j, k ≥ 1.
    for i in 1..=n {
        for j in i..=n {
            for k in j..=n {
                let mut e = Vec::new();
                for (u, w, g) in [(i, j, k), (i, k, j), (j, k, i)] {
                    let (u, w) = (u.min(w), u.max(w));
                    e.push((Slot::Under(u), Slot::Under(w), g));
                }
                e.sort();
                e.dedup();
                push(e);
            }
        }
    }
    out
}
