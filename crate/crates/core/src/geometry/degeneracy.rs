use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{check_dims, diameter, GeometryError, Point};

/// Largest point count for which `V_l` is computed by exhaustive search.
pub const EXHAUSTIVE_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub diameter: f64,
    /// Smallest pairwise distance `η̂`.
    pub min_separation: f64,
    /// `V_l(E)` for `l = 1..=min(k-1, d)`.
    pub volumes: Vec<f64>,
    /// True when `volumes` come from the greedy search and are lower bounds.
    pub lower_bound: bool,
}

/// Volume of the simplex with the given vertices from the Cayley–Menger
/// determinant. Negative round-off in `V^2` is clamped to zero.
pub fn cayley_menger_volume(vertices: &[&Point]) -> f64 {
    let l = match vertices.len() {
        0 | 1 => return 0.0,
        n => n - 1,
    };
    let n = l + 2;
    let mut cm = DMatrix::zeros(n, n);
    for i in 1..n {
        cm[(0, i)] = 1.0;
        cm[(i, 0)] = 1.0;
    }
    for i in 0..=l {
        for j in i + 1..=l {
            let d = vertices[i].distance(vertices[j]);
            cm[(i + 1, j + 1)] = d * d;
            cm[(j + 1, i + 1)] = d * d;
        }
    }
    let mut fact = 1.0;
    for i in 2..=l {
        fact *= i as f64;
    }
    let sign = if (l + 1) % 2 == 0 { 1.0 } else { -1.0 };
    let v2 = sign * cm.determinant() / (2f64.powi(l as i32) * fact * fact);
    v2.max(0.0).sqrt()
}

fn subset_volume(points: &[Point], idx: &[usize]) -> f64 {
    let verts: Vec<&Point> = idx.iter().map(|&i| &points[i]).collect();
    cayley_menger_volume(&verts)
}

fn exhaustive_max(points: &[Point], size: usize) -> f64 {
    let k = points.len();
    let mut idx: Vec<usize> = (0..size).collect();
    let mut best = 0.0f64;
    loop {
        best = best.max(subset_volume(points, &idx));
        let mut i = size;
        while i > 0 && idx[i - 1] == k - size + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return best;
        }
        idx[i - 1] += 1;
        for j in i..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Greedy growth from the diameter pair followed by single-vertex swaps
/// until no swap increases the volume.
fn greedy_max(points: &[Point], size: usize) -> f64 {
    let k = points.len();
    let mut pair = (0, 1, 0.0f64);
    for i in 0..k {
        for j in i + 1..k {
            let d = points[i].distance(&points[j]);
            if d > pair.2 {
                pair = (i, j, d);
            }
        }
    }
    let mut idx = vec![pair.0, pair.1];
    while idx.len() < size {
        let next = (0..k)
            .filter(|c| !idx.contains(c))
            .map(|c| {
                let mut t = idx.clone();
                t.push(c);
                (c, subset_volume(points, &t))
            })
            .fold((usize::MAX, -1.0), |b, c| if c.1 > b.1 { c } else { b });
        idx.push(next.0);
    }
    idx.truncate(size);
    let mut best = subset_volume(points, &idx);
    let mut improved = true;
    while improved {
        improved = false;
        for slot in 0..size {
            for c in 0..k {
                if idx.contains(&c) {
                    continue;
                }
                let old = idx[slot];
                idx[slot] = c;
                let v = subset_volume(points, &idx);
                if v > best * (1.0 + 1e-12) {
                    best = v;
                    improved = true;
                } else {
                    idx[slot] = old;
                }
            }
        }
    }
    best
}

pub fn degeneracy_report(points: &[Point]) -> Result<DegeneracyReport, GeometryError> {
    if points.len() < 2 {
        return Err(GeometryError::TooFewPoints { needed: 2, got: points.len() });
    }
    let d = points[0].dim();
    check_dims(points, d)?;
    let mut min_separation = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate().skip(i + 1) {
            let s = p.distance(q);
            if s == 0.0 {
                return Err(GeometryError::CoincidentSourcePoints(i, j));
            }
            min_separation = min_separation.min(s);
        }
    }
    let lower_bound = points.len() > EXHAUSTIVE_LIMIT;
    let top = (points.len() - 1).min(d);
    let volumes = (1..=top)
        .map(|l| if lower_bound { greedy_max(points, l + 1) } else { exhaustive_max(points, l + 1) })
        .collect();
    Ok(DegeneracyReport { diameter: diameter(points), min_separation, volumes, lower_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pts(c: &[&[f64]]) -> Vec<Point> {
        c.iter().map(|p| Point::new(p.to_vec()).unwrap()).collect()
    }

    #[test]
    fn collinear_points() {
        let r = degeneracy_report(&pts(&[&[0.0, 0.0], &[1.0, 0.0], &[3.0, 0.0]])).unwrap();
        assert_eq!(r.diameter, 3.0);
        assert_eq!(r.min_separation, 1.0);
        assert_abs_diff_eq!(r.volumes[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.volumes[1], 0.0, epsilon = 1e-7);
    }

    #[test]
    fn unit_square_triangle() {
        let r = degeneracy_report(&pts(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]])).unwrap();
        assert_abs_diff_eq!(r.volumes[1], 0.5, epsilon = 1e-14);
        assert!(!r.lower_bound);
    }

    #[test]
    fn regular_tetrahedron_volume() {
        let s = 2f64.sqrt();
        let v = pts(&[&[1.0, 0.0, -1.0 / s], &[-1.0, 0.0, -1.0 / s], &[0.0, 1.0, 1.0 / s], &[0.0, -1.0, 1.0 / s]]);
        let refs: Vec<&Point> = v.iter().collect();
        // edge 2: V = a^3 / (6√2)
        assert_abs_diff_eq!(cayley_menger_volume(&refs), 8.0 / (6.0 * s), epsilon = 1e-13);
    }

    #[test]
    fn greedy_matches_exhaustive_on_grid() {
        let grid: Vec<Point> = (0..16).map(|i| Point::new(vec![(i % 4) as f64, (i / 4) as f64]).unwrap()).collect();
        let r = degeneracy_report(&grid).unwrap();
        assert!(r.lower_bound);
        assert_abs_diff_eq!(r.volumes[1], 4.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.volumes[1], exhaustive_max(&grid, 3), epsilon = 1e-12);
    }

    #[test]
    fn needs_two_points() {
        assert!(degeneracy_report(&pts(&[&[1.0]])).is_err());
    }
}
