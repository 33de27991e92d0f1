//! Small fixed-size linear algebra helpers used throughout the crate.

/// 3-vector in ambient chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Row-major 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn det(self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(self) -> f64 {
        self.a + self.d
    }

    pub fn mul_vec(self, v: [f64; 2]) -> [f64; 2] {
        [
            self.a * v[0] + self.b * v[1],
            self.c * v[0] + self.d * v[1],
        ]
    }

    /// Real eigenvalues (ascending) with unit eigenvectors; `None` when the
    /// eigenvalues are complex.
    pub fn real_eigen(self) -> Option<([f64; 2], [[f64; 2]; 2])> {
        let tr = self.trace();
        let disc = tr * tr - 4.0 * self.det();
        if disc < 0.0 {
            return None;
        }
        let s = disc.sqrt();
        let l1 = 0.5 * (tr - s);
        let l2 = 0.5 * (tr + s);
        let vec_for = |l: f64| -> [f64; 2] {
            // rows of (M - l I) are orthogonal to the eigenvector
            let r1 = [self.a - l, self.b];
            let r2 = [self.c, self.d - l];
            let n1 = r1[0] * r1[0] + r1[1] * r1[1];
            let n2 = r2[0] * r2[0] + r2[1] * r2[1];
            let v = if n1 >= n2 {
                [-r1[1], r1[0]]
            } else {
                [-r2[1], r2[0]]
            };
            let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
            if n == 0.0 {
                [1.0, 0.0]
            } else {
                [v[0] / n, v[1] / n]
            }
        };
        Some(([l1, l2], [vec_for(l1), vec_for(l2)]))
    }

    /// Solve M x = rhs.
    pub fn solve(self, rhs: [f64; 2]) -> Option<[f64; 2]> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some([
            (rhs[0] * self.d - rhs[1] * self.b) / det,
            (self.a * rhs[1] - self.c * rhs[0]) / det,
        ])
    }
}

/// Least-squares decomposition of `v` against the columns `f1`, `f2`:
/// returns `(c1, c2, residual_norm)` minimizing `|v - c1 f1 - c2 f2|`.
pub fn decompose_against_frame(v: Vec3, f1: Vec3, f2: Vec3) -> Option<(f64, f64, f64)> {
    let g = Mat2::new(f1.dot(f1), f1.dot(f2), f2.dot(f1), f2.dot(f2));
    // relative degeneracy guard on the Gram matrix
    let scale = g.a.abs().max(g.d.abs());
    if !(scale > 0.0) || g.det().abs() < 1e-14 * scale * scale {
        return None;
    }
    let c = g.solve([f1.dot(v), f2.dot(v)])?;
    let r = v.sub(f1.scale(c[0])).sub(f2.scale(c[1]));
    Some((c[0], c[1], r.norm()))
}

/// Euclidean distance in a chart with optional periodicity: each periodic
/// axis is compared modulo its period.
pub fn chart_dist(p: [f64; 2], q: [f64; 2], periods: [Option<f64>; 2]) -> f64 {
    let mut s = 0.0;
    for k in 0..2 {
        let mut d = p[k] - q[k];
        if let Some(per) = periods[k] {
            d = d.rem_euclid(per);
            if d > per / 2.0 {
                d -= per;
            }
        }
        s += d * d;
    }
    s.sqrt()
}
