//! Exact convex polygons over the rationals, and the regions of the Farey
//! triangle `T = {(x, y) ∈ [0,1]² : x + y > 1}` cut out by index sequences.
//!
//! All regions are kept closed. Their boundaries have measure zero, so areas
//! are unaffected; lattice points on boundaries are resolved in
//! [`crate::lattice`] with the exact integer conditions.
//!
//! On the cell `T_n = {(x, y) ∈ T : ⌊(1+x)/y⌋ = n}` the map
//! `T(x, y) = (y, ⌊(1+x)/y⌋·y − x)` is the unimodular linear map
//! `L_n(x, y) = (y, n·y − x)`, so
//! `T_{n1,...,nK} = T_{n1} ∩ L_{n1}⁻¹(T_{n2,...,nK})`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num/den`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `num/den`, or just `num` for integers. The JSON form.
pub fn format_rational_short(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format_rational(r)
    }
}

/// Parses `num/den` or `num`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.trim().parse::<BigInt>().ok()?, BigInt::from(1)),
    };
    (!d.is_zero()).then(|| Rational::new(n, d))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point { x: int(x), y: int(y) }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// `(b − a) × (c − a)`; positive when `a, b, c` turn counterclockwise.
fn cross(a: &Point, b: &Point, c: &Point) -> Rational {
    (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x)
}

/// `{(x, y) : a·x + b·y ≤ c}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfPlane {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl HalfPlane {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Option<Self> {
        if a.is_zero() && b.is_zero() {
            None
        } else {
            Some(HalfPlane { a, b, c })
        }
    }

    /// The left side of the directed line `from → to`.
    pub fn left_of(from: &Point, to: &Point) -> Self {
        let a = &to.y - &from.y;
        let b = &from.x - &to.x;
        let c = &a * &from.x + &b * &from.y;
        HalfPlane { a, b, c }
    }

    /// `c − (a·x + b·y)`; non-negative inside.
    pub fn slack(&self, p: &Point) -> Rational {
        &self.c - (&self.a * &p.x + &self.b * &p.y)
    }

    pub fn contains(&self, p: &Point) -> bool {
        !self.slack(p).is_negative()
    }
}

/// A convex polygon with exact rational vertices.
///
/// Vertices run counterclockwise starting from the lexicographically
/// smallest one, with no repeated or collinear vertices, so equal polygons
/// compare equal. Anything of zero area is the empty polygon.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RationalPolygon {
    vertices: Vec<Point>,
}

impl RationalPolygon {
    pub fn empty() -> Self {
        RationalPolygon { vertices: Vec::new() }
    }

    /// Builds a polygon from the vertices of a convex polygon given in
    /// either orientation.
    pub fn from_convex(vertices: Vec<Point>) -> Self {
        RationalPolygon { vertices: canonicalize(vertices) }
    }

    pub fn rectangle(x0: Rational, y0: Rational, x1: Rational, y1: Rational) -> Self {
        Self::from_convex(vec![
            Point::new(x0.clone(), y0.clone()),
            Point::new(x1.clone(), y0),
            Point::new(x1, y1.clone()),
            Point::new(x0, y1),
        ])
    }

    pub fn unit_square() -> Self {
        Self::rectangle(int(0), int(0), int(1), int(1))
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Twice the signed area.
    fn double_area(&self) -> Rational {
        let n = self.vertices.len();
        let mut acc = Rational::zero();
        for i in 0..n {
            let p = &self.vertices[i];
            let q = &self.vertices[(i + 1) % n];
            acc += &p.x * &q.y - &q.x * &p.y;
        }
        acc
    }

    pub fn area(&self) -> Rational {
        self.double_area() / int(2)
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let p = &self.vertices[i];
                let q = &self.vertices[(i + 1) % n];
                let dx = (&q.x - &p.x).to_f64().unwrap_or(f64::NAN);
                let dy = (&q.y - &p.y).to_f64().unwrap_or(f64::NAN);
                dx.hypot(dy)
            })
            .sum()
    }

    /// Closed containment.
    pub fn contains(&self, p: &Point) -> bool {
        let n = self.vertices.len();
        n > 0 && (0..n).all(|i| !cross(&self.vertices[i], &self.vertices[(i + 1) % n], p).is_negative())
    }

    /// Strict interior containment.
    pub fn contains_interior(&self, p: &Point) -> bool {
        let n = self.vertices.len();
        n > 0 && (0..n).all(|i| cross(&self.vertices[i], &self.vertices[(i + 1) % n], p).is_positive())
    }

    /// The edges as half-planes whose intersection is the polygon.
    pub fn half_planes(&self) -> Vec<HalfPlane> {
        let n = self.vertices.len();
        (0..n).map(|i| HalfPlane::left_of(&self.vertices[i], &self.vertices[(i + 1) % n])).collect()
    }

    /// `self ∩ h` (Sutherland–Hodgman against a single half-plane).
    pub fn clip(&self, h: &HalfPlane) -> RationalPolygon {
        let n = self.vertices.len();
        if n == 0 {
            return RationalPolygon::empty();
        }
        let slacks: Vec<Rational> = self.vertices.iter().map(|v| h.slack(v)).collect();
        if slacks.iter().all(|s| !s.is_negative()) {
            return self.clone();
        }
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            let (s, e) = (&self.vertices[i], &self.vertices[j]);
            let (ss, se) = (&slacks[i], &slacks[j]);
            let s_in = !ss.is_negative();
            let e_in = !se.is_negative();
            if s_in {
                out.push(s.clone());
            }
            if s_in != e_in && !ss.is_zero() && !se.is_zero() {
                let t = ss / (ss - se);
                out.push(Point::new(&s.x + (&e.x - &s.x) * &t, &s.y + (&e.y - &s.y) * &t));
            }
        }
        RationalPolygon { vertices: canonicalize(out) }
    }

    pub fn intersect(&self, other: &RationalPolygon) -> RationalPolygon {
        if self.is_empty() || other.is_empty() {
            return RationalPolygon::empty();
        }
        let mut acc = self.clone();
        for h in other.half_planes() {
            acc = acc.clip(&h);
            if acc.is_empty() {
                break;
            }
        }
        acc
    }

    /// Image under an integer matrix `[[m00, m01], [m10, m11]]` of
    /// determinant ±1 (orientation is restored by canonicalization).
    fn transform(&self, m: [[i64; 2]; 2]) -> RationalPolygon {
        let [[m00, m01], [m10, m11]] = m.map(|row| row.map(int));
        let vs = self
            .vertices
            .iter()
            .map(|v| Point::new(&m00 * &v.x + &m01 * &v.y, &m10 * &v.x + &m11 * &v.y))
            .collect();
        RationalPolygon::from_convex(vs)
    }

    /// Multiplies every coordinate by `factor`.
    pub fn scaled(&self, factor: &Rational) -> RationalPolygon {
        if factor.is_zero() {
            return RationalPolygon::empty();
        }
        RationalPolygon::from_convex(
            self.vertices.iter().map(|v| Point::new(&v.x * factor, &v.y * factor)).collect(),
        )
    }

    /// Preimage under `L_n(x, y) = (y, n·y − x)`, i.e. the image under
    /// `L_n⁻¹(u, v) = (n·u − v, u)`. Area is preserved.
    pub fn pullback(&self, n: u64) -> RationalPolygon {
        self.transform([[n as i64, -1], [1, 0]])
    }

    /// Smallest and largest coordinates, `((xmin, ymin), (xmax, ymax))`.
    pub fn bounds(&self) -> Option<((Rational, Rational), (Rational, Rational))> {
        let first = self.vertices.first()?;
        let mut lo = (first.x.clone(), first.y.clone());
        let mut hi = lo.clone();
        for v in &self.vertices[1..] {
            if v.x < lo.0 {
                lo.0 = v.x.clone();
            }
            if v.y < lo.1 {
                lo.1 = v.y.clone();
            }
            if v.x > hi.0 {
                hi.0 = v.x.clone();
            }
            if v.y > hi.1 {
                hi.1 = v.y.clone();
            }
        }
        Some((lo, hi))
    }
}

impl fmt::Display for RationalPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "empty");
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn canonicalize(mut vs: Vec<Point>) -> Vec<Point> {
    vs.dedup();
    while vs.len() > 1 && vs.first() == vs.last() {
        vs.pop();
    }
    loop {
        let n = vs.len();
        if n < 3 {
            return Vec::new();
        }
        let drop = (0..n).find(|&i| cross(&vs[(i + n - 1) % n], &vs[i], &vs[(i + 1) % n]).is_zero());
        match drop {
            Some(i) => {
                vs.remove(i);
            }
            None => break,
        }
    }
    let poly = RationalPolygon { vertices: vs };
    let twice = poly.double_area();
    if twice.is_zero() {
        return Vec::new();
    }
    let mut vs = poly.vertices;
    if twice.is_negative() {
        vs.reverse();
    }
    let start = (0..vs.len()).min_by(|&i, &j| vs[i].cmp(&vs[j])).unwrap_or(0);
    vs.rotate_left(start);
    vs
}

/// `T`, closed: the triangle `(1,0), (1,1), (0,1)`.
pub fn base_triangle() -> RationalPolygon {
    RationalPolygon::from_convex(vec![Point::from_ints(1, 0), Point::from_ints(1, 1), Point::from_ints(0, 1)])
}

/// The two half-planes `n·y ≤ 1 + x` and `1 + x ≤ (n+1)·y`.
pub fn cell_half_planes(n: u64) -> [HalfPlane; 2] {
    let n = int(n as i64);
    [
        HalfPlane { a: int(-1), b: n.clone(), c: int(1) },
        HalfPlane { a: int(1), b: -(n + int(1)), c: int(-1) },
    ]
}

/// `T_n`, closed.
pub fn region_tn(n: u64) -> RationalPolygon {
    let [lo, hi] = cell_half_planes(n);
    base_triangle().clip(&lo).clip(&hi)
}

/// `T_{n1,...,nK}`; the empty tuple gives `T`.
pub fn region_tuple(ns: &[u64]) -> RationalPolygon {
    let mut acc = base_triangle();
    for &n in ns.iter().rev() {
        acc = region_tn(n).intersect(&acc.pullback(n));
        if acc.is_empty() {
            break;
        }
    }
    acc
}

pub fn polygon_area(poly: &RationalPolygon) -> Rational {
    poly.area()
}

/// Cheap emptiness test for large indices: with `R = K + 2`, a tuple
/// with some `n_r ≥ 4R − 6` describes an empty region unless its neighbours
/// are 1 and every other entry is 2.
pub fn lemma2_empty_guard(ns: &[u64]) -> bool {
    let k = ns.len();
    if k == 0 {
        return false;
    }
    let threshold = 4 * (k as u64 + 2) - 6;
    (0..k).any(|r| ns[r] >= threshold && !is_exceptional(ns, r))
}

fn is_exceptional(ns: &[u64], r: usize) -> bool {
    ns.iter()
        .enumerate()
        .filter(|&(j, _)| j != r)
        .all(|(j, &v)| if j.abs_diff(r) == 1 { v == 1 } else { v == 2 })
}

/// Applies `T` to an exact point of `T` (floor taken on the rational).
pub fn apply_map(p: &Point) -> Option<(u64, Point)> {
    if !p.y.is_positive() {
        return None;
    }
    let ratio = (int(1) + &p.x) / &p.y;
    let n = ratio.numer().div_floor(ratio.denom());
    let nr = Rational::from_integer(n.clone());
    let image = Point::new(p.y.clone(), &nr * &p.y - &p.x);
    Some((n.to_u64()?, image))
}

/// Sum of `4/(n(n+1)(n+2))` over `n > cutoff`, which is `2/((N+1)(N+2))`.
pub fn cell_area_tail(cutoff: u64) -> Rational {
    let n = cutoff as i64;
    rat(2, (n + 1) * (n + 2))
}

/// `4/(n(n+1)(n+2))` for `n ≥ 2`; `1/6` for `n = 1`.
pub fn cell_area_formula(n: u64) -> Rational {
    if n == 1 {
        return rat(1, 6);
    }
    let n = n as i64;
    rat(4, n * (n + 1) * (n + 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(x: (i64, i64), y: (i64, i64)) -> Point {
        Point::new(rat(x.0, x.1), rat(y.0, y.1))
    }

    #[test]
    fn rational_strings() {
        assert_eq!(format_rational(&int(0)), "0/1");
        assert_eq!(format_rational_short(&int(0)), "0");
        assert_eq!(format_rational_short(&rat(-14, 18)), "-7/9");
        assert_eq!(parse_rational("7/9"), Some(rat(7, 9)));
        assert_eq!(parse_rational("0"), Some(int(0)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn clip_examples() {
        let sq = RationalPolygon::unit_square();
        let tri = sq.clip(&HalfPlane::new(int(1), int(1), int(1)).unwrap());
        assert_eq!(
            tri,
            RationalPolygon::from_convex(vec![Point::from_ints(0, 0), Point::from_ints(1, 0), Point::from_ints(0, 1)])
        );
        assert_eq!(tri.area(), rat(1, 2));
        assert!(sq.clip(&HalfPlane::new(int(1), int(0), int(-1)).unwrap()).is_empty());
        assert_eq!(sq.clip(&HalfPlane::new(int(1), int(0), rat(1, 2)).unwrap()).area(), rat(1, 2));
        // touching along an edge only
        assert!(sq.clip(&HalfPlane::new(int(1), int(0), int(0)).unwrap()).is_empty());
        assert!(HalfPlane::new(int(0), int(0), int(1)).is_none());
    }

    #[test]
    fn canonical_form() {
        let a = RationalPolygon::from_convex(vec![
            Point::from_ints(1, 1),
            Point::from_ints(0, 1),
            Point::from_ints(0, 0),
            Point::from_ints(1, 0),
        ]);
        let b = RationalPolygon::from_convex(vec![
            Point::from_ints(0, 0),
            Point::from_ints(0, 1),
            pt((1, 2), (1, 1)),
            Point::from_ints(1, 1),
            Point::from_ints(1, 1),
            Point::from_ints(1, 0),
        ]);
        assert_eq!(a, b);
        assert_eq!(a.vertices()[0], Point::from_ints(0, 0));
        assert_eq!(a.vertices().len(), 4);
        let collinear = RationalPolygon::from_convex(vec![
            Point::from_ints(0, 0),
            Point::from_ints(1, 1),
            Point::from_ints(2, 2),
        ]);
        assert!(collinear.is_empty());
    }

    #[test]
    fn base_triangle_facts() {
        let t = base_triangle();
        assert_eq!(t.area(), rat(1, 2));
        assert_eq!(t, region_tuple(&[]));
        assert!(t.contains(&pt((1, 2), (3, 4))));
        assert!(!t.contains(&pt((1, 4), (1, 4))));
    }

    #[test]
    fn first_cells() {
        let t1 = region_tn(1);
        assert_eq!(t1, RationalPolygon::from_convex(vec![pt((0, 1), (1, 1)), pt((1, 3), (2, 3)), pt((1, 1), (1, 1))]));
        assert_eq!(t1.area(), rat(1, 6));
        let t2 = region_tn(2);
        assert_eq!(
            t2,
            RationalPolygon::from_convex(vec![pt((1, 3), (2, 3)), pt((1, 2), (1, 2)), pt((1, 1), (2, 3)), pt((1, 1), (1, 1))])
        );
        assert_eq!(t2.area(), rat(1, 6));
        assert_eq!(region_tn(3).area(), rat(1, 15));
    }

    #[test]
    fn cell_areas_match_formula() {
        for n in 1..=60 {
            assert_eq!(region_tn(n).area(), cell_area_formula(n), "n = {n}");
            assert_eq!(region_tuple(&[n]).area(), cell_area_formula(n));
        }
    }

    #[test]
    fn pullback_examples() {
        let tri = RationalPolygon::from_convex(vec![pt((7, 10), (3, 5)), Point::from_ints(2, 0), Point::from_ints(2, 2)]);
        let back = tri.pullback(2);
        assert!(back.vertices().contains(&pt((4, 5), (7, 10))));
        assert_eq!(back.area(), tri.area());
        let (n, img) = apply_map(&pt((4, 5), (7, 10))).unwrap();
        assert_eq!((n, img), (2, pt((7, 10), (3, 5))));
        let t1 = region_tn(1).pullback(1);
        assert!(t1.vertices().contains(&Point::from_ints(-1, 0)));
    }

    #[test]
    fn index_pair_one_one_is_empty() {
        assert!(region_tuple(&[1, 1]).is_empty());
        assert_eq!(region_tuple(&[1, 1]).area(), int(0));
    }

    #[test]
    fn guard_examples() {
        assert!(lemma2_empty_guard(&[12, 5]));
        assert!(region_tuple(&[12, 5]).is_empty());
        assert!(!lemma2_empty_guard(&[12, 1]));
        assert!(!lemma2_empty_guard(&[3, 3]));
        assert!(!lemma2_empty_guard(&[1000]));
        assert!(!lemma2_empty_guard(&[2, 1, 40, 1, 2]));
        assert!(lemma2_empty_guard(&[2, 1, 40, 1, 3]));
    }

    #[test]
    fn area_tail_telescopes() {
        for big_n in 1..=40u64 {
            let partial: Rational = (1..=big_n).map(|n| region_tn(n).area()).sum();
            assert_eq!(partial + cell_area_tail(big_n), rat(1, 2));
        }
    }

    #[test]
    fn tuple_regions_are_nested() {
        let tuples: [&[u64]; 6] = [&[2, 2], &[3, 1, 4], &[1, 2, 3], &[2, 3, 2, 2], &[4, 1, 8], &[1, 5]];
        for ns in tuples {
            let reg = region_tuple(ns);
            for (j, &n) in ns.iter().enumerate() {
                assert!(reg.area() <= region_tn(n).area(), "{ns:?}");
                assert!(reg.area() <= region_tuple(&ns[j..]).area());
            }
            let first = region_tn(ns[0]);
            assert!(reg.vertices().iter().all(|v| first.contains(v)), "{ns:?}");
        }
    }

    #[test]
    fn orbits_of_interior_points_follow_the_indices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let tuples: [&[u64]; 5] = [&[2, 2, 2], &[1, 3, 1], &[3, 1, 4], &[1, 2], &[2, 1, 8, 1, 2]];
        for ns in tuples {
            let reg = region_tuple(ns);
            assert!(!reg.is_empty(), "{ns:?}");
            for _ in 0..200 {
                let weights: Vec<i64> = reg.vertices().iter().map(|_| rng.gen_range(1..1000)).collect();
                let total: i64 = weights.iter().sum();
                let mut p = Point::new(int(0), int(0));
                for (v, w) in reg.vertices().iter().zip(&weights) {
                    p.x += &v.x * rat(*w, total);
                    p.y += &v.y * rat(*w, total);
                }
                assert!(reg.contains_interior(&p));
                for &n in ns {
                    let (k, next) = apply_map(&p).unwrap();
                    assert_eq!(k, n, "{ns:?} at {p}");
                    p = next;
                }
                assert!(base_triangle().contains(&p));
            }
        }
    }

    #[test]
    fn perimeter_decays() {
        let per: Vec<f64> = (2..=200).map(|n| region_tn(n).perimeter()).collect();
        assert!(per.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        let areas: Vec<Rational> = (2..=200).map(|n| region_tn(n).area()).collect();
        assert!(areas.windows(2).all(|w| w[1] <= w[0]));
        // fitted: n · perimeter(T_n) stays bounded
        let c = per.iter().enumerate().map(|(i, p)| p * (i + 2) as f64).fold(0.0, f64::max);
        assert!(c < 10.0, "{c}");
    }
}
