//! Sobol low-discrepancy points in up to four dimensions (Joe–Kuo direction numbers).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain_err, Result};

pub const MAX_DIM: usize = 4;
const BITS: usize = 32;

/// (s, a, m_1..m_s) for dimensions 2..=4; dimension 1 is the van der Corput sequence.
const PRIMITIVE: [(usize, u32, &[u32]); MAX_DIM - 1] = [(1, 0, &[1]), (2, 1, &[1, 3]), (3, 1, &[1, 3, 1])];

fn direction_numbers(dim: usize) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if dim == 0 {
        for (k, vk) in v.iter_mut().enumerate() {
            *vk = 1 << (BITS - 1 - k);
        }
        return v;
    }
    let (s, a, m) = PRIMITIVE[dim - 1];
    for k in 0..BITS {
        v[k] = if k < s {
            m[k] << (BITS - 1 - k)
        } else {
            let mut x = v[k - s] ^ (v[k - s] >> s);
            for i in 1..s {
                if (a >> (s - 1 - i)) & 1 == 1 {
                    x ^= v[k - i];
                }
            }
            x
        };
    }
    v
}

/// Sobol generator in Gray-code order, optionally digitally shifted.
#[derive(Clone, Debug)]
pub struct Sobol {
    dims: usize,
    v: Vec<[u32; BITS]>,
    state: Vec<u32>,
    shift: Vec<u32>,
    index: u64,
}

impl Sobol {
    /// `seed == 0` gives the plain sequence; any other seed applies a random
    /// digital shift, which preserves the net structure.
    pub fn new(dims: usize, seed: u64) -> Result<Self> {
        if dims == 0 || dims > MAX_DIM {
            return domain_err(format!("Sobol dimension {dims} not in 1..={MAX_DIM}"));
        }
        let shift = if seed == 0 {
            vec![0; dims]
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..dims).map(|_| rng.random::<u32>()).collect()
        };
        Ok(Sobol {
            dims,
            v: (0..dims).map(direction_numbers).collect(),
            state: vec![0; dims],
            shift,
            index: 0,
        })
    }

    /// Next point; the first call returns the point after the origin.
    pub fn next_point(&mut self) -> Vec<f64> {
        let c = self.index.trailing_ones() as usize;
        self.index += 1;
        for d in 0..self.dims {
            self.state[d] ^= self.v[d][c];
        }
        self.state
            .iter()
            .zip(&self.shift)
            .map(|(x, s)| f64::from(x ^ s) / 4294967296.0)
            .collect()
    }
}

/// First `count` points of the `dims`-dimensional sequence with the zero point skipped.
pub fn sobol_points(count: usize, dims: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut g = Sobol::new(dims, seed)?;
    Ok((0..count).map(|_| g.next_point()).collect())
}

pub fn sobol_2d(count: usize, seed: u64) -> Result<Vec<[f64; 2]>> {
    Ok(sobol_points(count, 2, seed)?.into_iter().map(|p| [p[0], p[1]]).collect())
}
