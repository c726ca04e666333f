//! Tutte polynomial by deletion/contraction, plus the subset-expansion
//! oracle used to check it.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeKind, Multigraph};
use crate::kappa::EdgeChoice;
use crate::key::{normalize, GraphKey};

pub const DEFAULT_TUTTE_CAP: usize = 30;
pub const ORACLE_CAP: usize = 16;

/// `Σ c[i][j] x^i y^j` with non-negative coefficients. Trailing zero rows and
/// columns are trimmed, so equal polynomials compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TuttePolynomial {
    coeffs: Vec<Vec<u64>>,
}

impl TuttePolynomial {
    pub fn zero() -> Self {
        TuttePolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0, 0)
    }

    pub fn monomial(i: usize, j: usize) -> Self {
        let mut coeffs = vec![vec![0; j + 1]; i + 1];
        coeffs[i][j] = 1;
        TuttePolynomial { coeffs }
    }

    /// Builds from a dense table; the table is trimmed.
    pub fn from_coeffs(coeffs: Vec<Vec<u64>>) -> Self {
        let mut p = TuttePolynomial { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        let width = self
            .coeffs
            .iter()
            .filter_map(|row| row.iter().rposition(|&c| c != 0))
            .max()
            .map_or(0, |j| j + 1);
        for row in &mut self.coeffs {
            row.resize(width, 0);
        }
        while self
            .coeffs
            .last()
            .is_some_and(|row| row.iter().all(|&c| c == 0))
        {
            self.coeffs.pop();
        }
    }

    pub fn coeff(&self, i: usize, j: usize) -> u64 {
        self.coeffs
            .get(i)
            .and_then(|r| r.get(j))
            .copied()
            .unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[Vec<u64>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn width(&self) -> usize {
        self.coeffs.first().map_or(0, Vec::len)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let rows = self.coeffs.len().max(other.coeffs.len());
        let cols = self.width().max(other.width());
        let mut out = vec![vec![0u64; cols]; rows];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                *c = self
                    .coeff(i, j)
                    .checked_add(other.coeff(i, j))
                    .ok_or(Error::Overflow("tutte coefficient"))?;
            }
        }
        Ok(Self::from_coeffs(out))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let rows = self.coeffs.len() + other.coeffs.len() - 1;
        let cols = self.width() + other.width() - 1;
        let mut out = vec![vec![0u64; cols]; rows];
        for (i1, r1) in self.coeffs.iter().enumerate() {
            for (j1, &c1) in r1.iter().enumerate().filter(|(_, c)| **c != 0) {
                for (i2, r2) in other.coeffs.iter().enumerate() {
                    for (j2, &c2) in r2.iter().enumerate().filter(|(_, c)| **c != 0) {
                        let cell = &mut out[i1 + i2][j1 + j2];
                        *cell = c1
                            .checked_mul(c2)
                            .and_then(|p| cell.checked_add(p))
                            .ok_or(Error::Overflow("tutte coefficient"))?;
                    }
                }
            }
        }
        Ok(Self::from_coeffs(out))
    }

    pub fn eval(&self, x: i64, y: i64) -> Result<i128> {
        let overflow = || Error::Overflow("tutte evaluation");
        let mut total = 0i128;
        let mut xp = 1i128;
        for (i, row) in self.coeffs.iter().enumerate() {
            if i > 0 {
                xp = xp.checked_mul(x as i128).ok_or_else(overflow)?;
            }
            let mut yp = 1i128;
            for (j, &c) in row.iter().enumerate() {
                if j > 0 {
                    yp = yp.checked_mul(y as i128).ok_or_else(overflow)?;
                }
                if c != 0 {
                    let term = (c as i128)
                        .checked_mul(xp)
                        .and_then(|t| t.checked_mul(yp))
                        .ok_or_else(overflow)?;
                    total = total.checked_add(term).ok_or_else(overflow)?;
                }
            }
        }
        Ok(total)
    }

    /// Non-zero coefficients as `[i, j, c]`, ordered by `(i, j)`.
    pub fn triples(&self) -> Vec<CoefficientTriple> {
        let mut out = Vec::new();
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c != 0 {
                    out.push(CoefficientTriple(i, j, c));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientTriple(pub usize, pub usize, pub u64);

/// Monomials by descending total degree, then descending power of `x`.
impl fmt::Display for TuttePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = self.triples();
        if terms.is_empty() {
            return f.write_str("0");
        }
        terms.sort_by_key(|t| (std::cmp::Reverse(t.0 + t.1), std::cmp::Reverse(t.0)));
        for (k, CoefficientTriple(i, j, c)) in terms.into_iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if c != 1 || (i == 0 && j == 0) {
                write!(f, "{c}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
            match j {
                0 => {}
                1 => f.write_str("y")?,
                _ => write!(f, "y^{j}")?,
            }
        }
        Ok(())
    }
}

/// Strips loops and bridges: returns `(loops, bridges, 2-edge-connected
/// pieces with at least one edge)`.
fn peel(g: &Multigraph) -> (usize, usize, Vec<Multigraph>) {
    let kinds = g.classify_edges();
    let loops = kinds.iter().filter(|k| **k == EdgeKind::Loop).count();
    let bridges = kinds.iter().filter(|k| **k == EdgeKind::Bridge).count();
    let kept = g
        .edges()
        .iter()
        .zip(&kinds)
        .filter(|(_, k)| **k == EdgeKind::CycleEdge)
        .map(|(uv, _)| *uv);
    let core = Multigraph::new(g.vertex_count(), kept).expect("same vertex set");
    let pieces = core
        .component_subgraphs()
        .into_iter()
        .filter(|p| p.edge_count() > 0)
        .collect();
    (loops, bridges, pieces)
}

pub struct TutteEngine {
    cap: usize,
    cache: Option<HashMap<GraphKey, TuttePolynomial>>,
    rng: Option<ChaCha8Rng>,
}

impl Default for TutteEngine {
    fn default() -> Self {
        Self::new()
    }
}

impl TutteEngine {
    pub fn new() -> Self {
        TutteEngine {
            cap: DEFAULT_TUTTE_CAP,
            cache: Some(HashMap::new()),
            rng: None,
        }
    }

    pub fn uncached() -> Self {
        TutteEngine {
            cache: None,
            ..Self::new()
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_edge_choice(mut self, choice: EdgeChoice) -> Self {
        self.rng = match choice {
            EdgeChoice::Lexicographic => None,
            EdgeChoice::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        };
        self
    }

    fn check_cap(&self, g: &Multigraph) -> Result<()> {
        if g.edge_count() > self.cap {
            return Err(Error::ResourceLimit {
                what: "tutte recursion",
                cap: self.cap,
                actual: g.edge_count(),
            });
        }
        Ok(())
    }

    pub fn polynomial(&mut self, g: &Multigraph) -> Result<TuttePolynomial> {
        self.check_cap(g)?;
        self.poly(g)
    }

    fn poly(&mut self, g: &Multigraph) -> Result<TuttePolynomial> {
        let (loops, bridges, pieces) = peel(g);
        let mut acc = TuttePolynomial::monomial(bridges, loops);
        for piece in &pieces {
            acc = acc.checked_mul(&self.poly_piece(piece)?)?;
        }
        Ok(acc)
    }

    /// `piece` is connected, loopless and bridgeless, with at least two edges.
    fn poly_piece(&mut self, piece: &Multigraph) -> Result<TuttePolynomial> {
        let (norm, key) = normalize(piece);
        if let Some(hit) = self.cache.as_ref().and_then(|c| c.get(&key)) {
            return Ok(hit.clone());
        }
        let e = match &mut self.rng {
            None => 0,
            Some(rng) => rng.gen_range(0..norm.edge_count()),
        };
        let deleted = self.poly(&norm.delete_edge(e)?.graph)?;
        let contracted = self.poly(&norm.contract_edge(e)?.graph)?;
        let value = deleted.checked_add(&contracted)?;
        if let Some(cache) = &mut self.cache {
            cache.insert(key, value.clone());
        }
        Ok(value)
    }

    /// `T(Y; x, 0)` without building the polynomial. Any branch holding a
    /// loop vanishes, and parallel edges can be dropped since contracting
    /// one of them produces a loop.
    pub fn eval_at_y0(&mut self, g: &Multigraph, x: i64) -> Result<i128> {
        self.check_cap(g)?;
        let mut memo = HashMap::new();
        eval_y0(g, x as i128, &mut memo)
    }

    pub fn eval(&mut self, g: &Multigraph, x: i64, y: i64) -> Result<i128> {
        if y == 0 {
            self.eval_at_y0(g, x)
        } else {
            self.polynomial(g)?.eval(x, y)
        }
    }
}

fn eval_y0(g: &Multigraph, x: i128, memo: &mut HashMap<GraphKey, i128>) -> Result<i128> {
    if g.has_loops() {
        return Ok(0);
    }
    let simple = g.simplify().graph;
    let (_, bridges, pieces) = peel(&simple);
    let overflow = || Error::Overflow("tutte evaluation");
    let mut acc = x.checked_pow(bridges as u32).ok_or_else(overflow)?;
    for piece in &pieces {
        let (norm, key) = normalize(piece);
        let value = match memo.get(&key) {
            Some(&v) => v,
            None => {
                let d = eval_y0(&norm.delete_edge(0)?.graph, x, memo)?;
                let c = eval_y0(&norm.contract_edge(0)?.graph, x, memo)?;
                let v = d.checked_add(c).ok_or_else(overflow)?;
                memo.insert(key, v);
                v
            }
        };
        acc = acc.checked_mul(value).ok_or_else(overflow)?;
    }
    Ok(acc)
}

pub fn tutte_polynomial(g: &Multigraph) -> Result<TuttePolynomial> {
    TutteEngine::new().polynomial(g)
}

pub fn tutte_eval(g: &Multigraph, x: i64, y: i64) -> Result<i128> {
    TutteEngine::new().eval(g, x, y)
}

/// Subset expansion `Σ_A (x−1)^{r(E)−r(A)} (y−1)^{|A|−r(A)}` over all
/// `2^m` edge subsets, with `r(A) = n − c(A)`.
pub fn tutte_oracle_rank_nullity(g: &Multigraph) -> Result<TuttePolynomial> {
    let m = g.edge_count();
    if m > ORACLE_CAP {
        return Err(Error::ResourceLimit {
            what: "tutte subset expansion",
            cap: ORACLE_CAP,
            actual: m,
        });
    }
    let n = g.vertex_count();
    let rank = |subset: u32| -> usize {
        let mut uf = petgraph::unionfind::UnionFind::<usize>::new(n);
        let mut r = 0;
        for (e, &(a, b)) in g.edges().iter().enumerate() {
            if subset >> e & 1 == 1 && uf.union(a, b) {
                r += 1;
            }
        }
        r
    };
    let full_rank = rank(if m == 0 { 0 } else { u32::MAX >> (32 - m) });

    // counts[a][b] = number of subsets with corank a and nullity b
    let mut counts = vec![vec![0i128; m + 1]; n + 1];
    for subset in 0..1u32 << m {
        let r = rank(subset);
        counts[full_rank - r][subset.count_ones() as usize - r] += 1;
    }

    let binom = binomials(m.max(n) + 1);
    let mut expanded = vec![vec![0i128; m + 1]; n + 1];
    for (a, row) in counts.iter().enumerate() {
        for (b, &count) in row.iter().enumerate() {
            if count == 0 {
                continue;
            }
            // (x−1)^a (y−1)^b = Σ C(a,i)(−1)^{a−i} x^i · Σ C(b,j)(−1)^{b−j} y^j
            for i in 0..=a {
                for j in 0..=b {
                    let sign = if (a - i + b - j) % 2 == 0 { 1 } else { -1 };
                    expanded[i][j] += sign * count * binom[a][i] * binom[b][j];
                }
            }
        }
    }
    let coeffs = expanded
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|c| {
                    u64::try_from(c).map_err(|_| {
                        Error::Internal(format!("subset expansion produced coefficient {c}"))
                    })
                })
                .collect::<Result<Vec<u64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TuttePolynomial::from_coeffs(coeffs))
}

fn binomials(size: usize) -> Vec<Vec<i128>> {
    let mut table = vec![vec![0i128; size]; size];
    for n in 0..size {
        table[n][0] = 1;
        for k in 1..=n {
            table[n][k] = table[n - 1][k - 1] + table[n - 1][k];
        }
    }
    table
}
