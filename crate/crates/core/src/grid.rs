//! Masked-lattice discretization of discs and squares, nodal scalar fields
//! with bilinear cells, subdomain quadrature, circle slices, and field
//! mollification.
//!
//! Nodes sit on a uniform lattice of spacing `h`; cells are the lattice
//! squares whose four corners all lie in the domain. A node is interior when
//! all four axis neighbors are present, so every boundary node lies within
//! `h` of the analytic boundary. Subdomain integrals use 4x4 midpoint
//! sub-sampling per cell with per-point membership.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::integrand::Mollifier;
use crate::vec2::{SymMat2, Vec2};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainSpec {
    Disc { center: Vec2, radius: f64 },
    Square { origin: Vec2, side: f64 },
}

impl DomainSpec {
    pub fn unit_disc() -> Self {
        DomainSpec::Disc { center: Vec2::ZERO, radius: 1.0 }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        match *self {
            DomainSpec::Disc { center, radius } => (p - center).norm_sq() <= radius * radius * (1.0 + 1e-14),
            DomainSpec::Square { origin, side } => {
                let d = p - origin;
                let tol = side * 1e-14;
                d.x >= -tol && d.y >= -tol && d.x <= side + tol && d.y <= side + tol
            }
        }
    }

    /// Center used for circle slices.
    pub fn center(&self) -> Vec2 {
        match *self {
            DomainSpec::Disc { center, .. } => center,
            DomainSpec::Square { origin, side } => origin + Vec2::new(side / 2.0, side / 2.0),
        }
    }

    pub fn radius(&self) -> f64 {
        match *self {
            DomainSpec::Disc { radius, .. } => radius,
            DomainSpec::Square { side, .. } => side / 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub pos: Vec2,
    ix: i32,
    iy: i32,
}

/// Cell corner ordering: `[sw, se, nw, ne]`.
pub type Cell = [u32; 4];

#[derive(Debug)]
pub struct Grid {
    pub domain: DomainSpec,
    pub h: f64,
    pub nodes: Vec<Node>,
    pub boundary: Vec<bool>,
    pub cells: Vec<Cell>,
    /// Axis neighbors per node: east, west, north, south.
    pub neighbors: Vec<[Option<u32>; 4]>,
    /// Lattice origin and extents for O(1) point location.
    lat_origin: Vec2,
    lat_nx: i32,
    lat_ny: i32,
    cell_at: Vec<Option<u32>>,
}

/// 2x2 Gauss points per cell, in unit-cell coordinates.
pub const CELL_GAUSS: [(f64, f64); 4] = {
    const A: f64 = 0.211324865405187118; // (1 - 1/sqrt(3))/2
    const B: f64 = 0.788675134594812882;
    [(A, A), (B, A), (A, B), (B, B)]
};

impl Grid {
    /// Build a grid with `h = 2R/n` on a disc (or `h = side/n` on a square).
    pub fn build(domain: DomainSpec, n: usize) -> Result<Arc<Grid>> {
        if n < 8 {
            return Err(Error::ResolutionTooCoarse { n });
        }
        let h = match domain {
            DomainSpec::Disc { radius, .. } => 2.0 * radius / n as f64,
            DomainSpec::Square { side, .. } => side / n as f64,
        };
        Grid::with_spacing(domain, h)
    }

    /// Build a grid with prescribed lattice spacing. Disc lattices are
    /// aligned so that the center is a lattice point; this keeps grids of
    /// different radii around the same center nested node-for-node.
    ///
    /// Membership is by cell center: a lattice cell belongs to the grid when
    /// its center lies in the domain, and the nodes are the corners of member
    /// cells. Interior nodes have a complete four-cell star, which makes the
    /// discrete divergence theorem (and hence affine exactness of the energy
    /// minimizer) hold exactly.
    pub fn with_spacing(domain: DomainSpec, h: f64) -> Result<Arc<Grid>> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::PreconditionViolated(format!("spacing must be positive, got {h}")));
        }
        // cell lattice: cell (ix, iy) spans [origin + (ix, iy) h, + (ix+1, iy+1) h]
        let (cell_origin, cnx, cny) = match domain {
            DomainSpec::Disc { center, radius } => {
                let m = (radius / h).ceil() as i32 + 1;
                (center - Vec2::new(m as f64 * h, m as f64 * h), 2 * m, 2 * m)
            }
            DomainSpec::Square { origin, side } => {
                let n = (side / h + 0.5).round() as i32;
                (origin, n, n)
            }
        };
        let cell_member = |ix: i32, iy: i32| -> bool {
            if ix < 0 || iy < 0 || ix >= cnx || iy >= cny {
                return false;
            }
            let cc = cell_origin + Vec2::new((ix as f64 + 0.5) * h, (iy as f64 + 0.5) * h);
            domain.contains(cc)
        };
        let lat_origin = cell_origin;
        let (lat_nx, lat_ny) = (cnx + 1, cny + 1);
        let nidx = |ix: i32, iy: i32| (iy * lat_nx + ix) as usize;
        let mut node_at: Vec<Option<u32>> = vec![None; (lat_nx * lat_ny) as usize];
        let mut nodes = Vec::new();
        for iy in 0..lat_ny {
            for ix in 0..lat_nx {
                let corner_of_member = cell_member(ix - 1, iy - 1)
                    || cell_member(ix, iy - 1)
                    || cell_member(ix - 1, iy)
                    || cell_member(ix, iy);
                if corner_of_member {
                    node_at[nidx(ix, iy)] = Some(nodes.len() as u32);
                    nodes.push(Node { pos: lat_origin + Vec2::new(ix as f64 * h, iy as f64 * h), ix, iy });
                }
            }
        }
        if nodes.len() < 9 {
            return Err(Error::ResolutionTooCoarse { n: nodes.len() });
        }
        let has = |ix: i32, iy: i32| -> Option<u32> {
            if ix < 0 || iy < 0 || ix >= lat_nx || iy >= lat_ny {
                None
            } else {
                node_at[nidx(ix, iy)]
            }
        };
        let neighbors: Vec<[Option<u32>; 4]> = nodes
            .iter()
            .map(|n| {
                [
                    has(n.ix + 1, n.iy),
                    has(n.ix - 1, n.iy),
                    has(n.ix, n.iy + 1),
                    has(n.ix, n.iy - 1),
                ]
            })
            .collect();
        // interior = complete cell star
        let boundary: Vec<bool> = nodes
            .iter()
            .map(|n| {
                !(cell_member(n.ix - 1, n.iy - 1)
                    && cell_member(n.ix, n.iy - 1)
                    && cell_member(n.ix - 1, n.iy)
                    && cell_member(n.ix, n.iy))
            })
            .collect();
        let mut cells = Vec::new();
        let mut cell_at: Vec<Option<u32>> = vec![None; ((lat_nx - 1) * (lat_ny - 1)).max(0) as usize];
        for iy in 0..lat_ny - 1 {
            for ix in 0..lat_nx - 1 {
                if cell_member(ix, iy) {
                    let (sw, se, nw, ne) = (
                        node_at[nidx(ix, iy)].unwrap(),
                        node_at[nidx(ix + 1, iy)].unwrap(),
                        node_at[nidx(ix, iy + 1)].unwrap(),
                        node_at[nidx(ix + 1, iy + 1)].unwrap(),
                    );
                    cell_at[(iy * (lat_nx - 1) + ix) as usize] = Some(cells.len() as u32);
                    cells.push([sw, se, nw, ne]);
                }
            }
        }
        Ok(Arc::new(Grid { domain, h, nodes, boundary, cells, neighbors, lat_origin, lat_nx, lat_ny, cell_at }))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary.iter().filter(|&&b| b).count()
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(move |&i| !self.boundary[i])
    }

    /// Lattice cell containing `p`, if covered by the grid.
    pub fn locate(&self, p: Vec2) -> Option<(u32, f64, f64)> {
        let gx = (p.x - self.lat_origin.x) / self.h;
        let gy = (p.y - self.lat_origin.y) / self.h;
        let mut ix = gx.floor() as i32;
        let mut iy = gy.floor() as i32;
        // points on the top/right seam belong to the last cell
        if ix as f64 == gx && ix > 0 {
            ix -= 1;
        }
        if iy as f64 == gy && iy > 0 {
            iy -= 1;
        }
        let clamp = |v: i32, hi: i32| v.max(0).min(hi - 2);
        let (ix, iy) = (clamp(ix, self.lat_nx), clamp(iy, self.lat_ny));
        let fx = gx - ix as f64;
        let fy = gy - iy as f64;
        if !(-1e-9..=1.0 + 1e-9).contains(&fx) || !(-1e-9..=1.0 + 1e-9).contains(&fy) {
            return None;
        }
        self.cell_at[(iy * (self.lat_nx - 1) + ix) as usize].map(|c| (c, fx.clamp(0.0, 1.0), fy.clamp(0.0, 1.0)))
    }

    pub fn cell_center(&self, cell: u32) -> Vec2 {
        let [sw, _, _, ne] = self.cells[cell as usize];
        (self.nodes[sw as usize].pos + self.nodes[ne as usize].pos) * 0.5
    }

    /// Gauss point position in a cell.
    pub fn gauss_point(&self, cell: u32, g: usize) -> Vec2 {
        let sw = self.nodes[self.cells[cell as usize][0] as usize].pos;
        let (a, b) = CELL_GAUSS[g];
        sw + Vec2::new(a * self.h, b * self.h)
    }
}

/// Subdomains for norms and mean integrals.
#[derive(Debug, Clone, Copy)]
pub enum Subdomain {
    All,
    Disc { center: Vec2, radius: f64 },
    Annulus { center: Vec2, inner: f64, outer: f64 },
}

impl Subdomain {
    pub fn contains(&self, p: Vec2) -> bool {
        match *self {
            Subdomain::All => true,
            Subdomain::Disc { center, radius } => (p - center).norm_sq() <= radius * radius,
            Subdomain::Annulus { center, inner, outer } => {
                let d2 = (p - center).norm_sq();
                d2 > inner * inner && d2 < outer * outer
            }
        }
    }
}

/// Per-cell quadrature weights of a subdomain: 4x4 midpoint sub-samples with
/// per-point membership. Built once and reused across integrals.
pub struct SubdomainQuad {
    /// (cell id, unit-cell sample coordinates, weight) triplets.
    pub samples: Vec<(u32, f64, f64)>,
    pub weight: f64,
    pub area: f64,
}

const SUBSAMPLES: usize = 4;

pub fn subdomain_quad(grid: &Grid, sub: &Subdomain) -> Result<SubdomainQuad> {
    let w0 = (grid.h / SUBSAMPLES as f64) * (grid.h / SUBSAMPLES as f64);
    let mut samples = Vec::new();
    let mut area = 0.0;
    for (c, cell) in grid.cells.iter().enumerate() {
        let sw = grid.nodes[cell[0] as usize].pos;
        for a in 0..SUBSAMPLES {
            for b in 0..SUBSAMPLES {
                let fx = (a as f64 + 0.5) / SUBSAMPLES as f64;
                let fy = (b as f64 + 0.5) / SUBSAMPLES as f64;
                let p = sw + Vec2::new(fx * grid.h, fy * grid.h);
                if sub.contains(p) {
                    samples.push((c as u32, fx, fy));
                    area += w0;
                }
            }
        }
    }
    if samples.is_empty() {
        return Err(Error::EmptySubdomain);
    }
    Ok(SubdomainQuad { samples, weight: w0, area })
}

/// A nodal scalar field, evaluable between nodes by bilinear interpolation.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(Vec2) -> f64) -> Self {
        let values = grid.nodes.iter().map(|n| f(n.pos)).collect();
        ScalarField { grid: grid.clone(), values }
    }

    pub fn constant(grid: &Arc<Grid>, c: f64) -> Self {
        ScalarField { grid: grid.clone(), values: vec![c; grid.node_count()] }
    }

    /// Band-limited random field: a seeded sum of plane-wave cosines with
    /// wavenumbers up to `kmax`, normalized to unit RMS coefficient mass and
    /// scaled by `amplitude`.
    pub fn bandlimited(grid: &Arc<Grid>, seed: u64, kmax: u32, amplitude: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut modes = Vec::new();
        let mut norm = 0.0;
        for _ in 0..12 {
            let kx = rng.gen_range(-(kmax as i32)..=kmax as i32) as f64;
            let ky = rng.gen_range(-(kmax as i32)..=kmax as i32) as f64;
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            let c: f64 = rng.gen_range(-1.0..1.0);
            norm += c * c;
            modes.push((kx, ky, phase, c));
        }
        let scale = amplitude / norm.sqrt().max(1e-12);
        let center = grid.domain.center();
        ScalarField::from_fn(grid, |p| {
            let d = p - center;
            modes
                .iter()
                .map(|&(kx, ky, ph, c)| c * (kx * d.x + ky * d.y + ph).cos())
                .sum::<f64>()
                * scale
        })
    }

    pub fn interpolate(&self, p: Vec2) -> Option<f64> {
        let (c, fx, fy) = self.grid.locate(p)?;
        let [sw, se, nw, ne] = self.grid.cells[c as usize];
        let v = &self.values;
        Some(
            v[sw as usize] * (1.0 - fx) * (1.0 - fy)
                + v[se as usize] * fx * (1.0 - fy)
                + v[nw as usize] * (1.0 - fx) * fy
                + v[ne as usize] * fx * fy,
        )
    }

    fn interp_in_cell(&self, c: u32, fx: f64, fy: f64) -> f64 {
        let [sw, se, nw, ne] = self.grid.cells[c as usize];
        let v = &self.values;
        v[sw as usize] * (1.0 - fx) * (1.0 - fy)
            + v[se as usize] * fx * (1.0 - fy)
            + v[nw as usize] * (1.0 - fx) * fy
            + v[ne as usize] * fx * fy
    }

    /// Cell-center gradient (exact for affine fields).
    pub fn gradient(&self) -> CellVectorField {
        let h2 = 2.0 * self.grid.h;
        let vecs = self
            .grid
            .cells
            .iter()
            .map(|&[sw, se, nw, ne]| {
                let v = &self.values;
                Vec2::new(
                    (v[se as usize] + v[ne as usize] - v[sw as usize] - v[nw as usize]) / h2,
                    (v[nw as usize] + v[ne as usize] - v[sw as usize] - v[se as usize]) / h2,
                )
            })
            .collect();
        CellVectorField { grid: self.grid.clone(), vecs }
    }

    /// Gradient of the bilinear interpolant at a Gauss point of a cell.
    pub fn gradient_at(&self, cell: u32, fx: f64, fy: f64) -> Vec2 {
        let [sw, se, nw, ne] = self.grid.cells[cell as usize];
        let v = &self.values;
        let h = self.grid.h;
        Vec2::new(
            ((v[se as usize] - v[sw as usize]) * (1.0 - fy) + (v[ne as usize] - v[nw as usize]) * fy) / h,
            ((v[nw as usize] - v[sw as usize]) * (1.0 - fx) + (v[ne as usize] - v[se as usize]) * fx) / h,
        )
    }

    /// L^p norm over a subdomain by sub-sampled bilinear quadrature.
    pub fn lp_norm(&self, p: f64, sub: &Subdomain) -> Result<f64> {
        let q = subdomain_quad(&self.grid, sub)?;
        let mut acc = 0.0;
        for &(c, fx, fy) in &q.samples {
            acc += self.interp_in_cell(c, fx, fy).abs().powf(p);
        }
        Ok((acc * q.weight).powf(1.0 / p))
    }

    /// Max of |u| over subdomain quadrature points and member nodes.
    pub fn linf_norm(&self, sub: &Subdomain) -> Result<f64> {
        Ok(self.extremes(sub)?.2)
    }

    /// Signed supremum over the subdomain (nodes and sub-samples).
    pub fn sup_on(&self, sub: &Subdomain) -> Result<f64> {
        Ok(self.extremes(sub)?.1)
    }

    fn extremes(&self, sub: &Subdomain) -> Result<(f64, f64, f64)> {
        let q = subdomain_quad(&self.grid, sub)?;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(c, fx, fy) in &q.samples {
            let v = self.interp_in_cell(c, fx, fy);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        for (n, &v) in self.grid.nodes.iter().zip(&self.values) {
            if sub.contains(n.pos) {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        Ok((lo, hi, lo.abs().max(hi.abs())))
    }

    /// Mean integral (integral divided by measured subdomain area).
    pub fn mean_integral(&self, sub: &Subdomain) -> Result<f64> {
        let q = subdomain_quad(&self.grid, sub)?;
        let mut acc = 0.0;
        for &(c, fx, fy) in &q.samples {
            acc += self.interp_in_cell(c, fx, fy);
        }
        Ok(acc * q.weight / q.area)
    }

    /// Integral of `g(u)` over a subdomain.
    pub fn integral_of(&self, sub: &Subdomain, g: impl Fn(f64) -> f64) -> Result<f64> {
        let q = subdomain_quad(&self.grid, sub)?;
        let mut acc = 0.0;
        for &(c, fx, fy) in &q.samples {
            acc += g(self.interp_in_cell(c, fx, fy));
        }
        Ok(acc * q.weight)
    }

    /// Max of |u| over an angular sampling of the circle of radius `r`
    /// around the domain center; the sampling count scales with `r/h`.
    pub fn circle_sup(&self, r: f64) -> Result<f64> {
        let center = self.grid.domain.center();
        if r <= 0.0 || r > self.grid.domain.radius() {
            return Err(Error::RadiusOutsideGrid { r });
        }
        let count = 64usize.max((std::f64::consts::TAU * r / self.grid.h).ceil() as usize);
        let mut sup: f64 = f64::NEG_INFINITY;
        for k in 0..count {
            let th = std::f64::consts::TAU * k as f64 / count as f64;
            let dir = Vec2::new(th.cos(), th.sin());
            // step inward if the staircase boundary clips this ray
            let mut val = None;
            let mut rr = r;
            for _ in 0..8 {
                if let Some(v) = self.interpolate(center + dir * rr) {
                    val = Some(v);
                    break;
                }
                rr -= 0.25 * self.grid.h;
                if rr <= 0.0 {
                    break;
                }
            }
            match val {
                Some(v) => sup = sup.max(v.abs()),
                None => return Err(Error::RadiusOutsideGrid { r }),
            }
        }
        Ok(sup)
    }

    /// Scan radii uniformly over (rho, sigma) and return the radius with the
    /// smallest circle sup together with that value.
    pub fn min_circle_sup(&self, rho: f64, sigma: f64, samples: usize) -> Result<(f64, f64)> {
        if !(rho > 0.0 && rho < sigma) {
            return Err(Error::PreconditionViolated(format!("need 0 < rho < sigma, got ({rho}, {sigma})")));
        }
        if samples < 8 {
            return Err(Error::TooFewSamples { got: samples, need: 8 });
        }
        let mut best = (rho, f64::INFINITY);
        for k in 0..samples {
            let r = rho + (sigma - rho) * (k as f64 + 0.5) / samples as f64;
            let v = self.circle_sup(r)?;
            if v < best.1 {
                best = (r, v);
            }
        }
        Ok(best)
    }

    /// Convolve with a mollifier; the result lives on `out_grid`, which must
    /// be covered by this field with margin `mollifier.delta()`.
    pub fn mollify(&self, mollifier: &Mollifier, out_grid: &Arc<Grid>) -> Result<ScalarField> {
        let mut values = Vec::with_capacity(out_grid.node_count());
        for node in &out_grid.nodes {
            let mut acc = 0.0;
            for (y, w) in mollifier.nodes().iter().zip(mollifier.weights()) {
                match self.interpolate(node.pos - *y) {
                    Some(v) => acc += w * v,
                    None => return Err(Error::InsufficientMargin),
                }
            }
            values.push(acc);
        }
        Ok(ScalarField { grid: out_grid.clone(), values })
    }

    /// Export as a plain-text table (17 significant digits).
    pub fn write_table(&self, out: &mut impl Write) -> std::io::Result<()> {
        match self.grid.domain {
            DomainSpec::Disc { center, radius } => {
                writeln!(out, "domain disc {:.17e} {:.17e} {:.17e}", center.x, center.y, radius)?
            }
            DomainSpec::Square { origin, side } => {
                writeln!(out, "domain square {:.17e} {:.17e} {:.17e}", origin.x, origin.y, side)?
            }
        }
        writeln!(out, "h {:.17e}", self.grid.h)?;
        writeln!(out, "nodes {}", self.grid.node_count())?;
        writeln!(out, "index x1 x2 value")?;
        for (i, (n, v)) in self.grid.nodes.iter().zip(&self.values).enumerate() {
            writeln!(out, "{} {:.17e} {:.17e} {:.17e}", i, n.pos.x, n.pos.y, v)?;
        }
        Ok(())
    }

    /// Import a table written by [`ScalarField::write_table`]; the grid is
    /// rebuilt from the header and node positions are cross-checked.
    pub fn read_table(input: &mut impl BufRead) -> Result<ScalarField> {
        let mut lines = input.lines();
        let mut next_line = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::MalformedTable("unexpected end of file".into()))?
                .map_err(|e| Error::MalformedTable(e.to_string()))
        };
        let header = next_line()?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let parse = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::MalformedTable(format!("bad number {s}")))
        };
        let domain = match parts.as_slice() {
            ["domain", "disc", cx, cy, r] => {
                DomainSpec::Disc { center: Vec2::new(parse(cx)?, parse(cy)?), radius: parse(r)? }
            }
            ["domain", "square", ox, oy, s] => {
                DomainSpec::Square { origin: Vec2::new(parse(ox)?, parse(oy)?), side: parse(s)? }
            }
            _ => return Err(Error::MalformedTable(format!("bad domain header: {header}"))),
        };
        let hline = next_line()?;
        let h: f64 = hline
            .strip_prefix("h ")
            .ok_or_else(|| Error::MalformedTable("missing h header".into()))?
            .trim()
            .parse()
            .map_err(|_| Error::MalformedTable("bad h".into()))?;
        let nline = next_line()?;
        let count: usize = nline
            .strip_prefix("nodes ")
            .ok_or_else(|| Error::MalformedTable("missing node count".into()))?
            .trim()
            .parse()
            .map_err(|_| Error::MalformedTable("bad node count".into()))?;
        let cols = next_line()?;
        if cols.trim() != "index x1 x2 value" {
            return Err(Error::MalformedTable(format!("bad column header: {cols}")));
        }
        let grid = Grid::with_spacing(domain, h)?;
        if grid.node_count() != count {
            return Err(Error::MalformedTable(format!(
                "node count mismatch: table has {count}, rebuilt grid has {}",
                grid.node_count()
            )));
        }
        let mut values = vec![0.0; count];
        for _ in 0..count {
            let row = next_line()?;
            let f: Vec<&str> = row.split_whitespace().collect();
            if f.len() != 4 {
                return Err(Error::MalformedTable(format!("bad row: {row}")));
            }
            let i: usize = f[0].parse().map_err(|_| Error::MalformedTable("bad index".into()))?;
            let (x, y, v) = (parse(f[1])?, parse(f[2])?, parse(f[3])?);
            if i >= count {
                return Err(Error::MalformedTable(format!("index {i} out of range")));
            }
            let pos = grid.nodes[i].pos;
            if (pos.x - x).abs() > 1e-9 * (1.0 + x.abs()) || (pos.y - y).abs() > 1e-9 * (1.0 + y.abs()) {
                return Err(Error::MalformedTable(format!("node {i} position mismatch")));
            }
            values[i] = v;
        }
        Ok(ScalarField { grid, values })
    }
}

/// A vector field with one value per cell (e.g. a discrete gradient).
#[derive(Debug, Clone)]
pub struct CellVectorField {
    pub grid: Arc<Grid>,
    pub vecs: Vec<Vec2>,
}

impl CellVectorField {
    /// Integral of `g(vector)` over the subdomain, the field being constant
    /// per cell.
    pub fn integral_of(&self, sub: &Subdomain, g: impl Fn(Vec2) -> f64) -> Result<f64> {
        let q = subdomain_quad(&self.grid, sub)?;
        let mut acc = 0.0;
        for &(c, _, _) in &q.samples {
            acc += g(self.vecs[c as usize]);
        }
        Ok(acc * q.weight)
    }

    /// Mean of `g(vector)` over the subdomain.
    pub fn mean_of(&self, sub: &Subdomain, g: impl Fn(Vec2) -> f64) -> Result<f64> {
        let q = subdomain_quad(&self.grid, sub)?;
        let mut acc = 0.0;
        for &(c, _, _) in &q.samples {
            acc += g(self.vecs[c as usize]);
        }
        Ok(acc / q.samples.len() as f64)
    }

    /// `int |v|^q` over the subdomain.
    pub fn lq_norm_pow(&self, q: f64, sub: &Subdomain) -> Result<f64> {
        self.integral_of(sub, |v| v.norm().powf(q))
    }

    /// Max |v| over cells with at least one quadrature point in the subdomain.
    pub fn linf(&self, sub: &Subdomain) -> Result<f64> {
        let q = subdomain_quad(&self.grid, sub)?;
        let mut seen = vec![false; self.vecs.len()];
        let mut best = 0.0_f64;
        for &(c, _, _) in &q.samples {
            if !seen[c as usize] {
                seen[c as usize] = true;
                best = best.max(self.vecs[c as usize].norm());
            }
        }
        Ok(best)
    }

    /// Average the cell values onto nodes (arithmetic mean over incident cells).
    pub fn to_nodal(&self) -> (Vec<Vec2>, Vec<usize>) {
        let mut acc = vec![Vec2::ZERO; self.grid.node_count()];
        let mut cnt = vec![0usize; self.grid.node_count()];
        for (c, cell) in self.grid.cells.iter().enumerate() {
            for &nid in cell {
                acc[nid as usize] += self.vecs[c];
                cnt[nid as usize] += 1;
            }
        }
        for (a, &k) in acc.iter_mut().zip(&cnt) {
            if k > 0 {
                *a = *a * (1.0 / k as f64);
            }
        }
        (acc, cnt)
    }
}

/// Symmetric 2x2 matrix field on nodes with declared ellipticity bounds.
#[derive(Debug, Clone)]
pub struct CoefficientField {
    pub grid: Arc<Grid>,
    pub mats: Vec<SymMat2>,
    pub nu: f64,
    pub lambda_up: f64,
}

impl CoefficientField {
    pub fn constant(grid: &Arc<Grid>, m: SymMat2, nu: f64, lambda_up: f64) -> Result<Self> {
        let f = CoefficientField { grid: grid.clone(), mats: vec![m; grid.node_count()], nu, lambda_up };
        f.validate()?;
        Ok(f)
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(Vec2) -> SymMat2, nu: f64, lambda_up: f64) -> Result<Self> {
        let mats = grid.nodes.iter().map(|n| f(n.pos)).collect();
        let cf = CoefficientField { grid: grid.clone(), mats, nu, lambda_up };
        cf.validate()?;
        Ok(cf)
    }

    /// Random diagonal field with entries uniform in [lo, hi].
    pub fn random_diagonal(grid: &Arc<Grid>, seed: u64, lo: f64, hi: f64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mats = (0..grid.node_count())
            .map(|_| SymMat2::diag(rng.gen_range(lo..=hi), rng.gen_range(lo..=hi)))
            .collect();
        let cf = CoefficientField { grid: grid.clone(), mats, nu: lo, lambda_up: hi };
        cf.validate()?;
        Ok(cf)
    }

    /// Eigenvalues within [nu, lambda_up] at every node.
    pub fn validate(&self) -> Result<()> {
        let tol = 1e-12 * (1.0 + self.lambda_up.abs());
        for (i, m) in self.mats.iter().enumerate() {
            let (lo, hi) = m.eigenvalues();
            if !m.is_finite() || lo < self.nu - tol || hi > self.lambda_up + tol {
                return Err(Error::PreconditionViolated(format!(
                    "coefficient ellipticity violated at node {i}: eigenvalues [{lo}, {hi}] not in [{}, {}]",
                    self.nu, self.lambda_up
                )));
            }
        }
        Ok(())
    }

    pub fn is_diagonal(&self) -> bool {
        let scale = 1e-14 * (1.0 + self.lambda_up.abs());
        self.mats.iter().all(|m| m.a12.abs() <= scale)
    }
}

/// Sorted map export of node values, useful for diffing runs.
pub fn nodal_summary(field: &ScalarField) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    m.insert("min".into(), field.values.iter().cloned().fold(f64::INFINITY, f64::min));
    m.insert("max".into(), field.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    m
}
