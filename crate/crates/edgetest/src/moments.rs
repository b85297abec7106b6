//! Single-pass accumulation of raw mixed moments up to order 4.
//!
//! The covariance-of-covariance formulas consume plug-in estimates of
//! `E[Xi]`, `E[Xi·Xj]`, `E[Xi·Xj·Xk]` and `E[Xi·Xj·Xk·Xl]`. All requested
//! moments are accumulated in one sweep over the rows, so the total cost
//! is linear in the number of observations. Moments of order 1 and 2 are
//! stored densely; orders 3 and 4 are stored sparsely, keyed by the sorted
//! index multiset, and only for the multisets that were demanded.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::sample::SampleMatrix;

pub(crate) const MAX_ORDER: usize = 4;

/// Flat index of the pair `(i, j)` with `i ≤ j` in the upper triangle of a
/// `p × p` matrix, rows first: (0,0), (0,1), …, (0,p-1), (1,1), ….
#[inline]
pub(crate) fn upper_tri_index(i: usize, j: usize, p: usize) -> usize {
    debug_assert!(i <= j && j < p);
    i * p - i * (i - 1) / 2 + (j - i)
}

/// Number of unordered pairs over `p` variates, diagonal included.
#[inline]
pub(crate) fn upper_tri_len(p: usize) -> usize {
    p * (p + 1) / 2
}

/// A sorted index multiset identifying one raw moment, e.g. `{i, j, j}`
/// for `E[Xi·Xj²]`. Construction sorts the indices, so lookups are
/// invariant under permutation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct MomentKey {
    idx: [u32; MAX_ORDER],
    order: u8,
}

impl MomentKey {
    pub fn new(indices: &[usize]) -> Result<Self> {
        if indices.is_empty() || indices.len() > MAX_ORDER {
            return Err(Error::InvalidConfig(format!(
                "moment order must be 1..=4, got {}",
                indices.len()
            )));
        }
        let mut idx = [0u32; MAX_ORDER];
        for (slot, &i) in idx.iter_mut().zip(indices) {
            *slot = u32::try_from(i)
                .map_err(|_| Error::InvalidConfig(format!("index {i} too large")))?;
        }
        idx[..indices.len()].sort_unstable();
        Ok(Self {
            idx,
            order: indices.len() as u8,
        })
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.idx[..self.order()].iter().map(|&i| i as usize)
    }

    fn max_index(&self) -> usize {
        self.idx[..self.order()]
            .iter()
            .copied()
            .max()
            .unwrap_or(0) as usize
    }

    fn label(&self) -> String {
        self.indices()
            .map(|i| format!("x{i}"))
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Every index multiset of order 1 to 4 over `p` variates. This is the
/// demand list of the covariance-of-covariance module: each of its
/// entries touches every order-4 multiset through some pair of pairs.
pub fn full_demand(p: usize) -> Vec<MomentKey> {
    let mut keys = Vec::new();
    for i in 0..p {
        keys.push(MomentKey::new(&[i]).unwrap());
        for j in i..p {
            keys.push(MomentKey::new(&[i, j]).unwrap());
            for k in j..p {
                keys.push(MomentKey::new(&[i, j, k]).unwrap());
                for l in k..p {
                    keys.push(MomentKey::new(&[i, j, k, l]).unwrap());
                }
            }
        }
    }
    keys
}

/// Immutable store of accumulated raw moments. Safe to share across
/// threads once built.
#[derive(Debug, Clone)]
pub struct MomentStore {
    n: usize,
    p: usize,
    // Dense storage; NaN marks a slot never populated (possible only in
    // synthetic stores built through `from_raw_moments`).
    order1: Vec<f64>,
    order2: Vec<f64>,
    higher: HashMap<MomentKey, f64>,
}

// Per-row work items for demanded order-3/4 moments, in terms of the
// dense pair-product scratch computed for the order-2 pass.
enum Accum {
    Triple { pair: usize, single: usize },
    Quad { pair_a: usize, pair_b: usize },
}

/// Accumulates every requested moment in one pass over the rows of `x`.
///
/// Order-1 and order-2 moments are always computed (they are dense and
/// cheap); order-3/4 moments are computed exactly for the requested
/// multisets. Total time is `O(n · |needed|)`.
pub fn build_moments(x: &SampleMatrix, needed: &[MomentKey]) -> Result<MomentStore> {
    let n = x.n();
    let p = x.p();
    let mut plan = Vec::new();
    let mut plan_keys = Vec::new();
    for key in needed {
        if key.max_index() >= p {
            return Err(Error::IndexOutOfRange {
                index: key.max_index(),
                p,
            });
        }
        let ix: Vec<usize> = key.indices().collect();
        match ix.len() {
            1 | 2 => {} // covered by the dense pass
            3 => {
                plan.push(Accum::Triple {
                    pair: upper_tri_index(ix[0], ix[1], p),
                    single: ix[2],
                });
                plan_keys.push(*key);
            }
            4 => {
                plan.push(Accum::Quad {
                    pair_a: upper_tri_index(ix[0], ix[1], p),
                    pair_b: upper_tri_index(ix[2], ix[3], p),
                });
                plan_keys.push(*key);
            }
            _ => unreachable!("MomentKey enforces order 1..=4"),
        }
    }

    let npairs = upper_tri_len(p);
    let mut sum1 = vec![0.0f64; p];
    let mut sum2 = vec![0.0f64; npairs];
    let mut sums = vec![0.0f64; plan.len()];
    let mut scratch = vec![0.0f64; npairs];

    for row in x.rows() {
        for (acc, v) in sum1.iter_mut().zip(row) {
            *acc += v;
        }
        let mut slot = 0;
        for i in 0..p {
            let xi = row[i];
            for &xj in &row[i..] {
                let v = xi * xj;
                scratch[slot] = v;
                sum2[slot] += v;
                slot += 1;
            }
        }
        for (item, acc) in plan.iter().zip(sums.iter_mut()) {
            match *item {
                Accum::Triple { pair, single } => *acc += scratch[pair] * row[single],
                Accum::Quad { pair_a, pair_b } => *acc += scratch[pair_a] * scratch[pair_b],
            }
        }
    }

    let inv_n = 1.0 / n as f64;
    let order1 = sum1.iter().map(|s| s * inv_n).collect();
    let order2 = sum2.iter().map(|s| s * inv_n).collect();
    let higher = plan_keys
        .into_iter()
        .zip(sums)
        .map(|(k, s)| (k, s * inv_n))
        .collect();

    Ok(MomentStore {
        n,
        p,
        order1,
        order2,
        higher,
    })
}

impl MomentStore {
    /// Builds a store with every moment up to order 4 populated.
    pub fn full(x: &SampleMatrix) -> Result<Self> {
        build_moments(x, &full_demand(x.p()))
    }

    /// Builds a synthetic store from explicit `(multiset, value)` pairs.
    ///
    /// Useful for exercising the ζ₁ formulas on arbitrary moment
    /// assignments that need not correspond to any dataset.
    pub fn from_raw_moments<I>(p: usize, n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MomentKey, f64)>,
    {
        let mut store = MomentStore {
            n,
            p,
            order1: vec![f64::NAN; p],
            order2: vec![f64::NAN; upper_tri_len(p)],
            higher: HashMap::new(),
        };
        for (key, value) in entries {
            if key.max_index() >= p {
                return Err(Error::IndexOutOfRange {
                    index: key.max_index(),
                    p,
                });
            }
            let ix: Vec<usize> = key.indices().collect();
            match ix.len() {
                1 => store.order1[ix[0]] = value,
                2 => store.order2[upper_tri_index(ix[0], ix[1], p)] = value,
                _ => {
                    store.higher.insert(key, value);
                }
            }
        }
        Ok(store)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Looks up a stored moment; the index multiset may be given in any
    /// order.
    pub fn moment(&self, indices: &[usize]) -> Result<f64> {
        self.moment_key(MomentKey::new(indices)?)
    }

    pub fn moment_key(&self, key: MomentKey) -> Result<f64> {
        if key.max_index() >= self.p {
            return Err(Error::IndexOutOfRange {
                index: key.max_index(),
                p: self.p,
            });
        }
        let ix: Vec<usize> = key.indices().collect();
        let found = match ix.len() {
            1 => Some(self.order1[ix[0]]),
            2 => Some(self.order2[upper_tri_index(ix[0], ix[1], self.p)]),
            _ => self.higher.get(&key).copied(),
        };
        match found {
            Some(v) if !v.is_nan() => Ok(v),
            _ => Err(Error::MissingMoment(key.label())),
        }
    }

    #[inline]
    pub(crate) fn m1(&self, i: usize) -> Result<f64> {
        let v = self.order1[i];
        if v.is_nan() {
            return Err(Error::MissingMoment(format!("x{i}")));
        }
        Ok(v)
    }

    #[inline]
    pub(crate) fn m2(&self, i: usize, j: usize) -> Result<f64> {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let v = self.order2[upper_tri_index(i, j, self.p)];
        if v.is_nan() {
            return Err(Error::MissingMoment(format!("x{i}*x{j}")));
        }
        Ok(v)
    }

    #[inline]
    pub(crate) fn m3(&self, a: usize, b: usize, c: usize) -> Result<f64> {
        self.moment_key(MomentKey::new(&[a, b, c])?)
    }

    #[inline]
    pub(crate) fn m4(&self, a: usize, b: usize, c: usize, d: usize) -> Result<f64> {
        self.moment_key(MomentKey::new(&[a, b, c, d])?)
    }
}
