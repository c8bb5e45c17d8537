use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{capacity, Error, Result};
use crate::linalg::{DenseMatrix, MonomialMatrix, Phase};

/// Bound on `N²` entry positions for the exact commutant solve.
pub const MONOMIAL_COMMUTANT_CAPACITY: u128 = 1 << 22;

/// Exact commutant of a family of monomial matrices.
///
/// Every equation `(gX)_{ic} = (Xg)_{ic}` ties at most two entries of `X`
/// together by a root-of-unity ratio, so the solution space is spanned by one
/// element per consistent class of coupled entries.
#[derive(Clone, Debug)]
pub struct MonomialCommutant {
    dim: usize,
    modulus: u32,
    /// `(root, potential)` per entry `row·N + col`; `X_e = ω^{potential} X_root`.
    class: Vec<(u32, u32)>,
    /// Roots of the surviving classes, ascending.
    roots: Vec<u32>,
}

struct Potentials {
    parent: Vec<u32>,
    pot: Vec<u32>,
    dead: Vec<bool>,
    modulus: u32,
}

impl Potentials {
    fn find(&mut self, x: u32) -> (u32, u32) {
        let mut path = Vec::new();
        let mut cur = x;
        while self.parent[cur as usize] != cur {
            path.push(cur);
            cur = self.parent[cur as usize];
        }
        let root = cur;
        // compress from the top so each node's potential is relative to the root
        for &node in path.iter().rev() {
            let p = self.parent[node as usize];
            if p != root {
                self.pot[node as usize] = (self.pot[node as usize] + self.pot[p as usize]) % self.modulus;
            }
            self.parent[node as usize] = root;
        }
        (root, if x == root { 0 } else { self.pot[x as usize] })
    }

    /// Imposes `X_a = ω^k X_b`.
    fn relate(&mut self, a: u32, b: u32, k: u32) {
        let m = self.modulus;
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            if !(k + pb + m - pa).is_multiple_of(m) {
                self.dead[ra as usize] = true;
            }
            return;
        }
        // X_ra = ω^{k − pa + pb} X_rb
        self.parent[ra as usize] = rb;
        self.pot[ra as usize] = (k + pb + m - pa) % m;
        let dead = self.dead[ra as usize] || self.dead[rb as usize];
        self.dead[rb as usize] = dead;
    }

    fn kill(&mut self, a: u32) {
        let (r, _) = self.find(a);
        self.dead[r as usize] = true;
    }
}

pub fn monomial_commutant(gens: &[MonomialMatrix]) -> Result<MonomialCommutant> {
    monomial_commutant_with_capacity(gens, MONOMIAL_COMMUTANT_CAPACITY)
}

pub fn monomial_commutant_with_capacity(gens: &[MonomialMatrix], limit: u128) -> Result<MonomialCommutant> {
    let n = gens.first().map(|g| g.dim()).ok_or_else(|| Error::InvalidParams("empty generator family".into()))?;
    if let Some(g) = gens.iter().find(|g| g.dim() != n) {
        return Err(Error::DimensionMismatch(g.dim(), n));
    }
    let entries = (n as u128) * (n as u128);
    if entries > limit {
        return Err(capacity("commutant entry positions N^2", entries, limit));
    }
    let modulus = gens.iter().fold(1u32, |m, g| m.lcm(&g.modulus()));
    let mut uf = Potentials {
        parent: (0..(n * n) as u32).collect(),
        pot: vec![0; n * n],
        dead: vec![false; n * n],
        modulus,
    };
    let idx = |r: usize, c: usize| (r * n + c) as u32;
    for g in gens {
        let g = g.lifted(modulus);
        let cols: Vec<Option<(usize, Phase)>> = g.columns().collect();
        let mut pre: Vec<Option<(usize, u32)>> = vec![None; n];
        for (a, e) in cols.iter().enumerate() {
            if let Some((i, p)) = e {
                pre[*i] = Some((a, p.numerator_over(modulus).expect("lifted")));
            }
        }
        let num = |c: usize| cols[c].map(|(r, p)| (r, p.numerator_over(modulus).expect("lifted")));
        for (i, row) in pre.iter().enumerate() {
            for c in 0..n {
                // (gX)_{ic} = φ_a X_{a,c} with σ(a) = i; (Xg)_{ic} = φ_c X_{i,σ(c)}
                match (*row, num(c)) {
                    (Some((a, pa)), Some((sc, pc))) => uf.relate(idx(a, c), idx(i, sc), (pc + modulus - pa) % modulus),
                    (Some((a, _)), None) => uf.kill(idx(a, c)),
                    (None, Some((sc, _))) => uf.kill(idx(i, sc)),
                    (None, None) => {}
                }
            }
        }
    }
    let class: Vec<(u32, u32)> = (0..(n * n) as u32).map(|e| uf.find(e)).collect();
    let mut roots: Vec<u32> = (0..(n * n) as u32)
        .filter(|&e| class[e as usize].0 == e && !uf.dead[e as usize])
        .collect();
    roots.sort_unstable();
    Ok(MonomialCommutant {
        dim: n,
        modulus,
        class,
        roots,
    })
}

impl MonomialCommutant {
    /// Dimension of the commutant.
    pub fn dim(&self) -> usize {
        self.roots.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// Entries `(row, col, phase)` of the basis element of class `k`.
    pub fn class_entries(&self, k: usize) -> Vec<(usize, usize, Phase)> {
        let root = self.roots[k];
        self.class
            .iter()
            .enumerate()
            .filter(|(_, &(r, _))| r == root)
            .map(|(e, &(_, p))| (e / self.dim, e % self.dim, Phase::new(p as i64, self.modulus)))
            .collect()
    }

    pub fn basis_dense(&self) -> Vec<DenseMatrix> {
        let mut out: Vec<DenseMatrix> = (0..self.dim()).map(|_| DenseMatrix::zeros(self.dim)).collect();
        for (e, &(root, p)) in self.class.iter().enumerate() {
            if let Ok(k) = self.roots.binary_search(&root) {
                out[k].set(e / self.dim, e % self.dim, Phase::new(p as i64, self.modulus).to_complex());
            }
        }
        out
    }

    /// Exact membership of a monomial matrix.
    pub fn contains(&self, x: &MonomialMatrix) -> bool {
        if x.dim() != self.dim {
            return false;
        }
        let m = self.modulus.lcm(&x.modulus());
        let f = m / self.modulus;
        // per class: count of entries seen and the common offset x_e / ω^{pot_e}
        let mut seen: std::collections::HashMap<u32, (usize, u32)> = std::collections::HashMap::new();
        for (c, e) in x.columns().enumerate() {
            let Some((r, p)) = e else { continue };
            let (root, pot) = self.class[r * self.dim + c];
            if self.roots.binary_search(&root).is_err() {
                return false;
            }
            let off = (p.numerator_over(m).expect("lcm modulus") + m - pot * f) % m;
            let slot = seen.entry(root).or_insert((0, off));
            if slot.1 != off {
                return false;
            }
            slot.0 += 1;
        }
        seen.iter().all(|(&root, &(count, _))| self.class.iter().filter(|&&(r, _)| r == root).count() == count)
    }

    /// Trace-orthogonal projection `Σ_k ⟨x, b_k⟩/⟨b_k, b_k⟩ b_k` onto the commutant.
    pub fn project(&self, x: &DenseMatrix) -> DenseMatrix {
        let n = self.dim;
        let mut sums = vec![Complex64::new(0.0, 0.0); self.dim()];
        let mut sizes = vec![0usize; self.dim()];
        for (e, &(root, p)) in self.class.iter().enumerate() {
            if let Ok(k) = self.roots.binary_search(&root) {
                sums[k] += Phase::new(p as i64, self.modulus).to_complex().conj() * x.get(e / n, e % n);
                sizes[k] += 1;
            }
        }
        let mut out = DenseMatrix::zeros(n);
        for (e, &(root, p)) in self.class.iter().enumerate() {
            if let Ok(k) = self.roots.binary_search(&root) {
                let z = sums[k] / sizes[k] as f64 * Phase::new(p as i64, self.modulus).to_complex();
                out.set(e / n, e % n, z);
            }
        }
        out
    }
}
