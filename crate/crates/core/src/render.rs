//! Grid sampling and domain-coloring output.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::constants::DixonConstants;
use crate::par::{self, Execution};
use crate::{Complex, EllipticValue, Error, Evaluator, Result};

pub const MAX_POINTS: usize = 4096 * 4096;

/// Rectangle sampled at pixel centres; row 0 is the top (largest imaginary part).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub center: Complex,
    pub width: f64,
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Region {
    pub fn new(center: Complex, width: f64, height: f64, nx: usize, ny: usize) -> Result<Self> {
        let region = Self {
            center,
            width,
            height,
            nx,
            ny,
        };
        region.validate()?;
        Ok(region)
    }

    /// Bounding box of the parallelogram with vertices `0, -3K, 3Kγ, 3Kγ̄`
    /// plus a 5% margin, with `ny` chosen to keep pixels square.
    pub fn cell_preset(constants: &DixonConstants, nx: usize) -> Result<Self> {
        let width = 3.0 * constants.k * 1.05;
        let height = 3.0 * 3f64.sqrt() * constants.k * 1.05;
        let ny = ((nx as f64) * height / width).round().max(1.0) as usize;
        Self::new(Complex::new(-1.5 * constants.k, 0.0), width, height, nx, ny)
    }

    fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !self.center.is_finite() || !positive(self.width) || !positive(self.height) {
            return Err(Error::InvalidArgument(format!("invalid region {self:?}")));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidArgument(
                "grid dimensions must be positive".into(),
            ));
        }
        match self.nx.checked_mul(self.ny) {
            Some(n) if n <= MAX_POINTS => Ok(()),
            _ => Err(Error::GridTooLarge {
                nx: self.nx,
                ny: self.ny,
                cap: MAX_POINTS,
            }),
        }
    }

    /// Sample point of pixel `(i, j)`.
    pub fn point(&self, i: usize, j: usize) -> Complex {
        let dx = self.width / self.nx as f64;
        let dy = self.height / self.ny as f64;
        Complex::new(
            self.center.re - 0.5 * self.width + (i as f64 + 0.5) * dx,
            self.center.im + 0.5 * self.height - (j as f64 + 0.5) * dy,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    Sm,
    Cm,
    Wp,
}

impl FromStr for Selector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sm" => Ok(Selector::Sm),
            "cm" => Ok(Selector::Cm),
            "wp" => Ok(Selector::Wp),
            other => Err(Error::InvalidArgument(format!(
                "unknown function {other:?}"
            ))),
        }
    }
}

impl Selector {
    pub fn eval(self, ev: &Evaluator, z: Complex) -> Result<EllipticValue> {
        match self {
            Selector::Sm => ev.sm(z),
            Selector::Cm => ev.cm(z),
            Selector::Wp => ev.wp(z),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueGrid {
    pub region: Region,
    /// Row-major, `values[j·nx + i]`.
    pub values: Vec<EllipticValue>,
}

impl ValueGrid {
    pub fn get(&self, i: usize, j: usize) -> EllipticValue {
        self.values[j * self.region.nx + i]
    }
}

pub fn sample_grid(ev: &Evaluator, region: Region, selector: Selector) -> Result<ValueGrid> {
    sample_grid_with(ev, region, selector, Execution::Parallel)
}

/// Samples `selector` at every pixel centre; rows are distributed across
/// threads under [`Execution::Parallel`].
pub fn sample_grid_with(
    ev: &Evaluator,
    region: Region,
    selector: Selector,
    exec: Execution,
) -> Result<ValueGrid> {
    region.validate()?;
    let rows = par::map_range(region.ny, exec, |j| {
        (0..region.nx)
            .map(|i| selector.eval(ev, region.point(i, j)))
            .collect::<Result<Vec<_>>>()
    });
    let mut values = Vec::with_capacity(region.nx * region.ny);
    for row in rows {
        values.extend(row?);
    }
    Ok(ValueGrid { region, values })
}

const LIGHT_MIN: f64 = 0.15;
const LIGHT_SPAN: f64 = 0.80;
const ZERO_CUTOFF: f64 = 1e-9;

/// RGB of one value: hue is `arg/2π`, lightness `0.15 + 0.8·tanh(ln(1 + |v|))`,
/// full saturation. Poles are white and `|v| ≤ 1e-9` is black.
pub fn color(value: EllipticValue) -> [u8; 3] {
    let v = match value {
        EllipticValue::Pole { .. } => return [255, 255, 255],
        EllipticValue::Finite(v) => v,
    };
    let modulus = v.norm();
    if modulus <= ZERO_CUTOFF {
        return [0, 0, 0];
    }
    let hue = (v.arg() / std::f64::consts::TAU).rem_euclid(1.0);
    let lightness = LIGHT_MIN + LIGHT_SPAN * modulus.ln_1p().tanh();
    hsl_to_rgb(hue, 1.0, lightness)
}

fn hsl_to_rgb(h: f64, s: f64, l: f64) -> [u8; 3] {
    let q = if l < 0.5 {
        l * (1.0 + s)
    } else {
        l + s - l * s
    };
    let p = 2.0 * l - q;
    let channel = |t: f64| {
        let t = t.rem_euclid(1.0);
        let x = if t < 1.0 / 6.0 {
            p + (q - p) * 6.0 * t
        } else if t < 0.5 {
            q
        } else if t < 2.0 / 3.0 {
            p + (q - p) * (2.0 / 3.0 - t) * 6.0
        } else {
            p
        };
        (x.clamp(0.0, 1.0) * 255.0).round() as u8
    };
    [channel(h + 1.0 / 3.0), channel(h), channel(h - 1.0 / 3.0)]
}

/// Binary PPM (`P6`, maxval 255).
pub fn domain_color(grid: &ValueGrid) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", grid.region.nx, grid.region.ny);
    let mut out = Vec::with_capacity(header.len() + 3 * grid.values.len());
    out.extend_from_slice(header.as_bytes());
    for &v in &grid.values {
        out.extend_from_slice(&color(v));
    }
    out
}

/// `re,im,s_re,s_im,pole` per sample, 17 significant digits; poles carry
/// `nan` values.
pub fn to_csv(grid: &ValueGrid) -> String {
    let mut out = String::from("re,im,s_re,s_im,pole\n");
    let r = &grid.region;
    for j in 0..r.ny {
        for i in 0..r.nx {
            let z = r.point(i, j);
            let _ = match grid.get(i, j) {
                EllipticValue::Finite(v) => writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e},{:.16e},0",
                    z.re, z.im, v.re, v.im
                ),
                EllipticValue::Pole { .. } => {
                    writeln!(out, "{:.16e},{:.16e},nan,nan,1", z.re, z.im)
                }
            };
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev() -> &'static Evaluator {
        Evaluator::global()
    }

    #[test]
    fn single_pixel_at_origin() {
        let r = Region::new(Complex::new(0.0, 0.0), 1.0, 1.0, 1, 1).unwrap();
        let g = sample_grid(ev(), r, Selector::Sm).unwrap();
        assert_eq!(
            g.values,
            vec![EllipticValue::Finite(Complex::new(0.0, 0.0))]
        );
    }

    #[test]
    fn three_point_row() {
        let k = ev().constants().k;
        let r = Region::new(Complex::new(0.0, 0.0), 3.0 * k, 1.0, 3, 1).unwrap();
        assert!((r.point(0, 0) + k).norm() < 1e-15);
        assert!((r.point(2, 0) - k).norm() < 1e-15);
        let g = sample_grid(ev(), r, Selector::Sm).unwrap();
        assert!(g.values[0].is_pole());
        assert_eq!(g.values[1], EllipticValue::Finite(Complex::new(0.0, 0.0)));
        assert!((g.values[2].finite().unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn conjugate_rows() {
        let r = Region::new(Complex::new(0.3, 0.0), 4.0, 3.0, 9, 6).unwrap();
        let g = sample_grid(ev(), r, Selector::Sm).unwrap();
        for j in 0..3 {
            for i in 0..9 {
                let (a, b) = (g.get(i, j), g.get(i, 5 - j));
                assert_eq!(r.point(i, j), r.point(i, 5 - j).conj());
                let (a, b) = (a.finite().unwrap(), b.finite().unwrap());
                assert!((a - b.conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn grid_cap() {
        assert!(matches!(
            Region::new(Complex::new(0.0, 0.0), 1.0, 1.0, 5000, 5000),
            Err(Error::GridTooLarge { .. })
        ));
        assert!(Region::new(Complex::new(0.0, 0.0), 0.0, 1.0, 5, 5).is_err());
        assert!(Region::new(Complex::new(0.0, 0.0), 1.0, 1.0, 0, 5).is_err());
    }

    #[test]
    fn pixel_colors() {
        let k = ev().constants().k;
        let at_k = color(ev().sm(Complex::new(k, 0.0)).unwrap());
        assert!(at_k[0] > 200 && at_k[1] < 120 && at_k[2] < 120, "{at_k:?}");
        assert_eq!(
            color(ev().sm(Complex::new(-k, 0.0)).unwrap()),
            [255, 255, 255]
        );
        assert_eq!(color(ev().sm(Complex::new(0.0, 0.0)).unwrap()), [0, 0, 0]);
    }

    #[test]
    fn ppm_layout() {
        let r = Region::new(Complex::new(0.0, 0.0), 2.0, 1.0, 4, 2).unwrap();
        let g = sample_grid(ev(), r, Selector::Cm).unwrap();
        let ppm = domain_color(&g);
        assert!(ppm.starts_with(b"P6\n4 2\n255\n"));
        assert_eq!(ppm.len(), b"P6\n4 2\n255\n".len() + 4 * 2 * 3);
    }

    #[test]
    fn csv_layout() {
        let k = ev().constants().k;
        let r = Region::new(Complex::new(0.0, 0.0), 3.0 * k, 1.0, 3, 1).unwrap();
        let g = sample_grid(ev(), r, Selector::Sm).unwrap();
        let csv = to_csv(&g);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "re,im,s_re,s_im,pole");
        assert!(lines[1].ends_with("nan,nan,1"));
        assert!(lines[2].ends_with(",0"));
        let fields: Vec<f64> = lines[3].split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields[0], r.point(2, 0).re);
        assert!((fields[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let r = Region::cell_preset(ev().constants(), 40).unwrap();
        let a = sample_grid_with(ev(), r, Selector::Wp, Execution::Sequential).unwrap();
        let b = sample_grid_with(ev(), r, Selector::Wp, Execution::Parallel).unwrap();
        assert_eq!(domain_color(&a), domain_color(&b));
    }

    /// Connected components (4-neighbour) of pixels satisfying `pred` whose
    /// centroid satisfies `keep`.
    fn clusters(
        g: &ValueGrid,
        pred: impl Fn(EllipticValue) -> bool,
        keep: impl Fn(Complex) -> bool,
    ) -> usize {
        let (nx, ny) = (g.region.nx, g.region.ny);
        let mut seen = vec![false; nx * ny];
        let mut count = 0;
        for start in 0..nx * ny {
            if seen[start] || !pred(g.values[start]) {
                continue;
            }
            let mut stack = vec![start];
            seen[start] = true;
            let (mut sum, mut n) = (Complex::new(0.0, 0.0), 0.0);
            while let Some(idx) = stack.pop() {
                let (i, j) = (idx % nx, idx / nx);
                sum += g.region.point(i, j);
                n += 1.0;
                let mut push = |ii: usize, jj: usize| {
                    let n = jj * nx + ii;
                    if !seen[n] && pred(g.values[n]) {
                        seen[n] = true;
                        stack.push(n);
                    }
                };
                if i > 0 {
                    push(i - 1, j);
                }
                if i + 1 < nx {
                    push(i + 1, j);
                }
                if j > 0 {
                    push(i, j - 1);
                }
                if j + 1 < ny {
                    push(i, j + 1);
                }
            }
            count += keep(sum / n) as usize;
        }
        count
    }

    #[test]
    fn cell_render_has_three_poles_and_three_zeros() {
        let c = ev().constants();
        let region = Region::cell_preset(c, 160).unwrap();
        let grid = sample_grid(ev(), region, Selector::Sm).unwrap();
        // parallelogram 0, 3Kγ, -3K, 3Kγ̄ shifted slightly to the right
        let shift = 0.1;
        let (e1, e2) = (3.0 * c.k * c.gamma, 3.0 * c.k * c.gamma.conj());
        let det = e1.re * e2.im - e1.im * e2.re;
        let in_p = |z: Complex| {
            let d = z - shift;
            let a = (d.re * e2.im - d.im * e2.re) / det;
            let b = (e1.re * d.im - e1.im * d.re) / det;
            (0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b)
        };
        let big = |v: EllipticValue| v.finite().is_none_or(|v| v.norm() > 8.0);
        let small = |v: EllipticValue| v.finite().is_some_and(|v| v.norm() < 0.12);
        assert_eq!(clusters(&grid, big, in_p), 3);
        assert_eq!(clusters(&grid, small, in_p), 3);
    }
}
