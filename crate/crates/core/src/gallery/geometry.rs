//! Plane geometry over any ordered field scalar: exact with rationals,
//! approximate with floats.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

use num_traits::{Num, Signed};

/// Ordered field element usable as a coordinate.
pub trait Scalar: Clone + Num + Signed + PartialOrd {}

impl<T: Clone + Num + Signed + PartialOrd> Scalar for T {}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    pub fn cross(&self, other: &Point<T>) -> T {
        self.x.clone() * other.y.clone() - self.y.clone() * other.x.clone()
    }

    pub fn dot(&self, other: &Point<T>) -> T {
        self.x.clone() * other.x.clone() + self.y.clone() * other.y.clone()
    }

    pub fn scale(&self, k: &T) -> Point<T> {
        Point::new(self.x.clone() * k.clone(), self.y.clone() * k.clone())
    }

    /// `self + t·(other − self)`.
    pub fn lerp(&self, other: &Point<T>, t: &T) -> Point<T> {
        self + &(other - self).scale(t)
    }
}

impl<T: Scalar> Add for &Point<T> {
    type Output = Point<T>;
    fn add(self, o: &Point<T>) -> Point<T> {
        Point::new(self.x.clone() + o.x.clone(), self.y.clone() + o.y.clone())
    }
}

impl<T: Scalar> Sub for &Point<T> {
    type Output = Point<T>;
    fn sub(self, o: &Point<T>) -> Point<T> {
        Point::new(self.x.clone() - o.x.clone(), self.y.clone() - o.y.clone())
    }
}

impl<T: Scalar> Mul<&T> for &Point<T> {
    type Output = Point<T>;
    fn mul(self, k: &T) -> Point<T> {
        self.scale(k)
    }
}

fn sign<T: Scalar>(v: &T) -> Ordering {
    v.partial_cmp(&T::zero()).unwrap_or(Ordering::Equal)
}

/// Sign of `(b − a) × (c − a)`: `Greater` when `c` is left of `a → b`.
pub fn orient<T: Scalar>(a: &Point<T>, b: &Point<T>, c: &Point<T>) -> Ordering {
    sign(&(b - a).cross(&(c - a)))
}

/// Whether `p` lies on the closed segment `ab`.
pub fn on_segment<T: Scalar>(a: &Point<T>, b: &Point<T>, p: &Point<T>) -> bool {
    orient(a, b, p) == Ordering::Equal && (a - p).dot(&(b - p)) <= T::zero()
}

/// Intersection of the lines `a + s(b − a)` and `c + t(d − c)`.
pub fn line_intersection<T: Scalar>(
    a: &Point<T>,
    b: &Point<T>,
    c: &Point<T>,
    d: &Point<T>,
) -> Option<Point<T>> {
    let r = b - a;
    let s = d - c;
    let den = r.cross(&s);
    if den.is_zero() {
        return None;
    }
    let t = (c - a).cross(&s) / den;
    Some(a.lerp(b, &t))
}

/// Whether the closed segments `pq` and `ab` share a point.
pub fn segments_meet<T: Scalar>(p: &Point<T>, q: &Point<T>, a: &Point<T>, b: &Point<T>) -> bool {
    !touch_params(p, q, a, b).is_empty()
}

/// Parameters `t ∈ [0, 1]` where `p + t(q − p)` meets the segment `ab`;
/// both ends of an overlap when collinear.
fn touch_params<T: Scalar>(p: &Point<T>, q: &Point<T>, a: &Point<T>, b: &Point<T>) -> Vec<T> {
    let r = q - p;
    let s = b - a;
    let den = r.cross(&s);
    let rr = r.dot(&r);
    let in_unit = |t: &T| *t >= T::zero() && *t <= T::one();
    if den.is_zero() {
        if orient(p, q, a) != Ordering::Equal || rr.is_zero() {
            return Vec::new();
        }
        return [a, b]
            .into_iter()
            .map(|e| (e - p).dot(&r) / rr.clone())
            .filter(in_unit)
            .collect();
    }
    let t = (a - p).cross(&s) / den.clone();
    let u = (a - p).cross(&r) / den;
    if in_unit(&t) && in_unit(&u) {
        vec![t]
    } else {
        Vec::new()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polygon<T> {
    vertices: Vec<Point<T>>,
}

impl<T: Scalar> Polygon<T> {
    /// Accepts a simple counterclockwise polygon with at least 3 vertices.
    pub fn new(vertices: Vec<Point<T>>) -> Result<Self, String> {
        let n = vertices.len();
        if n < 3 {
            return Err(format!("{n} vertices; at least 3 are needed"));
        }
        let p = Polygon { vertices };
        for i in 0..n {
            let (a, b) = p.edge(i);
            if a == b {
                return Err(format!("edge {i} has zero length"));
            }
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (c, d) = p.edge(j);
                let touches = !touch_params(a, b, c, d).is_empty();
                if touches && !adjacent {
                    return Err(format!("edges {i} and {j} intersect"));
                }
                if adjacent {
                    // consecutive edges may only share their common vertex
                    let shared = if j == i + 1 { b } else { a };
                    let other = if j == i + 1 { d } else { c };
                    let back = if j == i + 1 { a } else { b };
                    if orient(back, shared, other) == Ordering::Equal
                        && (other - shared).dot(&(back - shared)) > T::zero()
                    {
                        return Err(format!("edges {i} and {j} overlap"));
                    }
                }
            }
        }
        if sign(&p.doubled_area()) != Ordering::Greater {
            return Err("vertices are not in counterclockwise order".into());
        }
        Ok(p)
    }

    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1`.
    pub fn edge(&self, i: usize) -> (&Point<T>, &Point<T>) {
        let n = self.vertices.len();
        (&self.vertices[i % n], &self.vertices[(i + 1) % n])
    }

    pub fn doubled_area(&self) -> T {
        let n = self.vertices.len();
        (0..n).fold(T::zero(), |acc, i| {
            acc + self.vertices[i].cross(&self.vertices[(i + 1) % n])
        })
    }

    /// Interior angle above 180°.
    pub fn is_reflex(&self, i: usize) -> bool {
        let n = self.vertices.len();
        let prev = &self.vertices[(i + n - 1) % n];
        let next = &self.vertices[(i + 1) % n];
        orient(prev, &self.vertices[i], next) == Ordering::Less
    }

    pub fn on_boundary(&self, p: &Point<T>) -> bool {
        (0..self.len()).any(|i| {
            let (a, b) = self.edge(i);
            on_segment(a, b, p)
        })
    }

    /// Closed containment.
    pub fn contains(&self, p: &Point<T>) -> bool {
        if self.on_boundary(p) {
            return true;
        }
        let mut winding = 0i32;
        for i in 0..self.len() {
            let (a, b) = self.edge(i);
            if a.y <= p.y {
                if b.y > p.y && orient(a, b, p) == Ordering::Greater {
                    winding += 1;
                }
            } else if b.y <= p.y && orient(a, b, p) == Ordering::Less {
                winding -= 1;
            }
        }
        winding != 0
    }

    /// Whether the closed segment `pq` lies in the closed polygon.
    pub fn sees(&self, p: &Point<T>, q: &Point<T>) -> bool {
        let mut ts = vec![T::zero(), T::one()];
        for i in 0..self.len() {
            let (a, b) = self.edge(i);
            ts.extend(touch_params(p, q, a, b));
        }
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        let two = T::one() + T::one();
        ts.windows(2).all(|w| {
            let mid = (w[0].clone() + w[1].clone()) / two.clone();
            self.contains(&p.lerp(q, &mid))
        }) && self.contains(p)
    }
}
