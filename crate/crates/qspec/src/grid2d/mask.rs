//! Rasterization of planar domains onto a uniform lattice.
//!
//! Interior nodes sit at `(x0 + i h, y0 + j h)` strictly inside the domain;
//! values are zero-extended outside the mask (homogeneous Dirichlet). A mask
//! may carry a mirror column, in which case the left neighbor of that column
//! reflects back inside (natural boundary condition at the symmetry line) and
//! its quadrature weight is halved.

use crate::core::DomainSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GridMask {
    pub h: f64,
    pub x0: f64,
    pub y0: f64,
    pub nx: usize,
    pub ny: usize,
    inside: Vec<bool>,
    index: Vec<i64>,
    /// `(i, j)` lattice coordinates of each interior point.
    pub interior: Vec<(u32, u32)>,
    /// Quadrature weight per interior point (0.5 on a mirror column).
    pub weights: Vec<f64>,
    /// Column index whose left neighbor mirrors back to the right one.
    pub mirror_col: Option<usize>,
    /// 1 for single-row interval grids, else 2.
    pub dim: u8,
}

impl GridMask {
    pub fn len(&self) -> usize {
        self.interior.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interior.is_empty()
    }

    pub fn is_inside(&self, i: i64, j: i64) -> bool {
        if i < 0 || j < 0 || i >= self.nx as i64 || j >= self.ny as i64 {
            return false;
        }
        self.inside[j as usize * self.nx + i as usize]
    }

    /// Interior index of lattice node `(i, j)`, or `None`.
    pub fn idx(&self, i: i64, j: i64) -> Option<usize> {
        if self.is_inside(i, j) {
            let v = self.index[j as usize * self.nx + i as usize];
            (v >= 0).then_some(v as usize)
        } else {
            None
        }
    }

    pub fn coords(&self, p: usize) -> (f64, f64) {
        let (i, j) = self.interior[p];
        (self.x0 + i as f64 * self.h, self.y0 + j as f64 * self.h)
    }

    /// Measure of one node cell, `h^dim`.
    pub fn cell_measure(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    pub(crate) fn from_inside(
        h: f64,
        x0: f64,
        y0: f64,
        nx: usize,
        ny: usize,
        inside: Vec<bool>,
        mirror_col: Option<usize>,
        dim: u8,
    ) -> Result<Self> {
        let mut index = vec![-1i64; nx * ny];
        let mut interior = Vec::new();
        let mut weights = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                if inside[j * nx + i] {
                    index[j * nx + i] = interior.len() as i64;
                    interior.push((i as u32, j as u32));
                    weights.push(if mirror_col == Some(i) { 0.5 } else { 1.0 });
                }
            }
        }
        if interior.is_empty() {
            return Err(Error::EmptyDomain { h });
        }
        Ok(Self { h, x0, y0, nx, ny, inside, index, interior, weights, mirror_col, dim })
    }

    /// FNV-1a hash of the mask bits, for output headers.
    pub fn hash(&self) -> u64 {
        let mut acc: u64 = 0xcbf29ce484222325;
        let mut eat = |b: u8| {
            acc ^= b as u64;
            acc = acc.wrapping_mul(0x100000001b3);
        };
        for chunk in [self.nx as u64, self.ny as u64] {
            for b in chunk.to_le_bytes() {
                eat(b);
            }
        }
        for &cell in &self.inside {
            eat(cell as u8);
        }
        acc
    }
}

/// Rasterizes an arbitrary membership predicate over `[xmin, xmax] x [ymin, ymax]`.
///
/// The lattice is anchored so that `x = 0` falls on a node, which keeps
/// symmetric domains symmetric on the grid.
pub fn rasterize_predicate(
    h: f64,
    (xmin, xmax): (f64, f64),
    (ymin, ymax): (f64, f64),
    mirror_col_at_zero: bool,
    pred: impl Fn(f64, f64) -> bool,
) -> Result<GridMask> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("mesh width h = {h} must be positive")));
    }
    // Lattice anchored at the bounding-box corner: nodes x = xmin + i h.
    let nx = ((xmax - xmin) / h + 1e-9).floor() as usize + 1;
    let ny = ((ymax - ymin) / h + 1e-9).floor() as usize + 1;
    let mut inside = vec![false; nx * ny];
    for j in 0..ny {
        let y = ymin + j as f64 * h;
        for i in 0..nx {
            let x = xmin + i as f64 * h;
            inside[j * nx + i] = pred(x, y);
        }
    }
    let mirror_col = if mirror_col_at_zero {
        let c = -xmin / h;
        if (c - c.round()).abs() > 1e-9 {
            return Err(Error::Symmetry);
        }
        Some(c.round() as usize)
    } else {
        None
    };
    GridMask::from_inside(h, xmin, ymin, nx, ny, inside, mirror_col, 2)
}

/// Rasterizes a [`DomainSpec`] at mesh width `h`.
///
/// Union components are laid out left to right along the x axis, separated by
/// at least the declared separation (and never less than `2h`, so components
/// stay disconnected on the grid).
pub fn rasterize(domain: &DomainSpec, h: f64) -> Result<GridMask> {
    domain.validate()?;
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("mesh width h = {h} must be positive")));
    }
    match domain {
        DomainSpec::Interval { length } => {
            let n = strict_count(*length, h);
            let inside = vec![true; n];
            GridMask::from_inside(h, h, 0.0, n.max(1), 1, if n == 0 { vec![false] } else { inside }, None, 1)
        }
        DomainSpec::Rectangle { a, b } => {
            let nx = strict_count(*a, h);
            let ny = strict_count(*b, h);
            if nx == 0 || ny == 0 {
                return Err(Error::EmptyDomain { h });
            }
            GridMask::from_inside(h, h, h, nx, ny, vec![true; nx * ny], None, 2)
        }
        DomainSpec::Ball { radius } => {
            let r = *radius;
            rasterize_predicate(h, (-r, r), (-r, r), false, |x, y| x * x + y * y < r * r)
        }
        DomainSpec::Mask { path, h: h_spec } => {
            let h_eff = if *h_spec > 0.0 { *h_spec } else { h };
            load_mask_file(path, h_eff)
        }
        DomainSpec::Union { components, separation } => {
            let parts: Vec<GridMask> = components.iter().map(|c| rasterize(c, h)).collect::<Result<_>>()?;
            let gap_cells = ((separation.unwrap_or(0.0) / h).ceil() as i64).max(2) as usize;
            let ny = parts.iter().map(|p| p.ny).max().unwrap();
            let nx: usize = parts.iter().map(|p| p.nx).sum::<usize>() + gap_cells * (parts.len() - 1);
            let mut inside = vec![false; nx * ny];
            let mut off = 0usize;
            for part in &parts {
                for &(i, j) in &part.interior {
                    inside[j as usize * nx + off + i as usize] = true;
                }
                off += part.nx + gap_cells;
            }
            GridMask::from_inside(h, 0.0, 0.0, nx, ny, inside, None, 2)
        }
    }
}

/// Number of lattice nodes `i h` with `0 < i h < len`.
fn strict_count(len: f64, h: f64) -> usize {
    let mut n = (len / h).ceil() as i64 - 1;
    // guard against len being an exact lattice multiple computed as slightly above
    while (n + 1) as f64 * h < len {
        n += 1;
    }
    while n > 0 && n as f64 * h >= len {
        n -= 1;
    }
    n.max(0) as usize
}

fn load_mask_file(path: &str, h: f64) -> Result<GridMask> {
    let text = std::fs::read_to_string(path)?;
    let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if rows.is_empty() {
        return Err(Error::EmptyDomain { h });
    }
    let ny = rows.len();
    let nx = rows.iter().map(|r| r.chars().count()).max().unwrap();
    let mut inside = vec![false; nx * ny];
    for (jr, row) in rows.iter().enumerate() {
        // first text line is the top row
        let j = ny - 1 - jr;
        for (i, ch) in row.chars().enumerate() {
            inside[j * nx + i] = matches!(ch, '#' | '1' | 'x' | 'X');
        }
    }
    GridMask::from_inside(h, 0.0, 0.0, nx, ny, inside, None, 2)
}

/// A lattice reflection `i -> c - i` of the x index (vertical mirror axis).
#[derive(Debug, Clone, Copy)]
pub struct Reflection {
    pub c: i64,
}

impl Reflection {
    /// Reflection about the vertical line `x = xc`.
    pub fn vertical(mask: &GridMask, xc: f64) -> Result<Self> {
        let c = 2.0 * (xc - mask.x0) / mask.h;
        let c_round = c.round();
        if (c - c_round).abs() > 1e-9 {
            return Err(Error::Symmetry);
        }
        Ok(Self { c: c_round as i64 })
    }

    /// Interior-to-interior permutation, or a symmetry error if the mask is
    /// not invariant.
    pub fn permutation(&self, mask: &GridMask) -> Result<Vec<usize>> {
        let mut perm = vec![0usize; mask.len()];
        for (p, &(i, j)) in mask.interior.iter().enumerate() {
            let ir = self.c - i as i64;
            match mask.idx(ir, j as i64) {
                Some(pr) => perm[p] = pr,
                None => return Err(Error::Symmetry),
            }
        }
        Ok(perm)
    }
}
