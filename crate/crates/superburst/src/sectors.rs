//! Excitation-number sectors of the collective rate operator. The operator
//! conserves excitation number, so everything block-diagonalizes over bases
//! of fixed-popcount bitmasks; this module enumerates those bases and builds
//! the off-diagonal coupling blocks and inter-sector lift tables.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Basis of the m-excitation sector of an n-emitter register: all n-bit
/// masks with m bits set, ascending, with an O(1) rank lookup.
pub(crate) struct SectorBasis {
    pub n: usize,
    pub m: usize,
    pub states: Vec<u16>,
    rank: Vec<u32>,
}

impl SectorBasis {
    pub fn new(n: usize, m: usize) -> Self {
        assert!(n >= 1 && n <= 16 && m <= n, "sector ({n}, {m}) out of range");
        let mut states = Vec::new();
        let mut rank = vec![u32::MAX; 1usize << n];
        for mask in 0..(1u32 << n) {
            if mask.count_ones() as usize == m {
                rank[mask as usize] = states.len() as u32;
                states.push(mask as u16);
            }
        }
        SectorBasis { n, m, states, rank }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn rank_of(&self, mask: u16) -> usize {
        let r = self.rank[mask as usize];
        debug_assert!(r != u32::MAX, "mask {mask:#b} not in sector");
        r as usize
    }
}

/// Compressed sparse rows of a real symmetric sector block.
pub(crate) struct SparseSym {
    pub dim: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<u32>,
    pub vals: Vec<f64>,
}

impl SparseSym {
    /// y += self * x, with x and y column-major dim-by-width blocks.
    pub fn accumulate_mul(&self, x: &[f64], width: usize, y: &mut [f64]) {
        let d = self.dim;
        for col in 0..width {
            let xc = &x[col * d..(col + 1) * d];
            let yc = &mut y[col * d..(col + 1) * d];
            for row in 0..d {
                let mut acc = 0.0;
                for idx in self.row_ptr[row]..self.row_ptr[row + 1] {
                    acc += self.vals[idx] * xc[self.cols[idx] as usize];
                }
                yc[row] += acc;
            }
        }
    }

    /// sum_{r,c} self[r,c] * rho[c,r] for a column-major symmetric block.
    pub fn dot_transposed(&self, rho: &[f64]) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for row in 0..d {
            for idx in self.row_ptr[row]..self.row_ptr[row + 1] {
                acc += self.vals[idx] * rho[self.cols[idx] as usize + row * d];
            }
        }
        acc
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for row in 0..self.dim {
            for idx in self.row_ptr[row]..self.row_ptr[row + 1] {
                m[(row, self.cols[idx] as usize)] += self.vals[idx];
            }
        }
        m
    }
}

/// Off-diagonal coupling block within a sector: entry (T, S) carries
/// coeff[j, k] where S -> T moves one excitation off site j onto site k.
/// The diagonal (within-sector identity times m) is deliberately excluded.
pub(crate) fn sector_block_real(coeff: &DMatrix<f64>, basis: &SectorBasis) -> SparseSym {
    let dim = basis.dim();
    let per_row = basis.m * (basis.n - basis.m);
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols = Vec::with_capacity(dim * per_row);
    let mut vals = Vec::with_capacity(dim * per_row);
    row_ptr.push(0);
    for &t_mask in &basis.states {
        for k in 0..basis.n {
            if t_mask & (1 << k) == 0 {
                continue;
            }
            for j in 0..basis.n {
                if t_mask & (1 << j) != 0 {
                    continue;
                }
                let s_mask = (t_mask & !(1 << k)) | (1 << j);
                cols.push(basis.rank_of(s_mask) as u32);
                vals.push(coeff[(j, k)]);
            }
        }
        row_ptr.push(cols.len());
    }
    SparseSym { dim, row_ptr, cols, vals }
}

/// Dense complex variant of [`sector_block_real`].
pub(crate) fn sector_block_complex(
    coeff: &DMatrix<Complex64>,
    basis: &SectorBasis,
) -> DMatrix<Complex64> {
    let dim = basis.dim();
    let mut block = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for (t_idx, &t_mask) in basis.states.iter().enumerate() {
        for k in 0..basis.n {
            if t_mask & (1 << k) == 0 {
                continue;
            }
            for j in 0..basis.n {
                if t_mask & (1 << j) != 0 {
                    continue;
                }
                let s_mask = (t_mask & !(1 << k)) | (1 << j);
                block[(t_idx, basis.rank_of(s_mask))] += coeff[(j, k)];
            }
        }
    }
    block
}

/// Flat lift table [dim * n]: entry [a * n + j] is the rank in `next` of
/// state a with site j excited, or u32::MAX when site j is already excited.
pub(crate) fn lift_table(basis: &SectorBasis, next: &SectorBasis) -> Vec<u32> {
    debug_assert_eq!(basis.n, next.n);
    debug_assert_eq!(basis.m + 1, next.m);
    let n = basis.n;
    let mut table = vec![u32::MAX; basis.dim() * n];
    for (a, &mask) in basis.states.iter().enumerate() {
        for j in 0..n {
            if mask & (1 << j) == 0 {
                table[a * n + j] = next.rank_of(mask | (1 << j)) as u32;
            }
        }
    }
    table
}
