use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Scales the vector down so that its norm does not exceed `max`.
    pub fn clamp_norm(self, max: f64) -> Vec2 {
        let n = self.norm();
        if n > max && n > 0.0 {
            self * (max / n)
        } else {
            self
        }
    }

    pub fn component(self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
        }
    }

    pub fn component_mut(&mut self, axis: Axis) -> &mut f64 {
        match axis {
            Axis::X => &mut self.x,
            Axis::Y => &mut self.y,
        }
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }
}

/// Axis-aligned rectangle given by its min and max corners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Vec2,
    pub max: Vec2,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect {
            min: Vec2::new(x0.min(x1), y0.min(y1)),
            max: Vec2::new(x0.max(x1), y0.max(y1)),
        }
    }

    pub fn from_center(center: Vec2, half: Vec2) -> Self {
        Rect {
            min: center - half,
            max: center + half,
        }
    }

    pub fn center(&self) -> Vec2 {
        (self.min + self.max) * 0.5
    }

    pub fn half_extents(&self) -> Vec2 {
        (self.max - self.min) * 0.5
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width().max(0.0) * self.height().max(0.0)
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.width() > 0.0 && self.height() > 0.0)
            || !self.min.is_finite()
            || !self.max.is_finite()
    }

    pub fn lo(&self, axis: Axis) -> f64 {
        self.min.component(axis)
    }

    pub fn hi(&self, axis: Axis) -> f64 {
        self.max.component(axis)
    }

    /// Area of the intersection, zero when the rectangles are disjoint.
    pub fn overlap_area(&self, other: &Rect) -> f64 {
        let w = self.max.x.min(other.max.x) - self.min.x.max(other.min.x);
        let h = self.max.y.min(other.max.y) - self.min.y.max(other.min.y);
        if w > 0.0 && h > 0.0 {
            w * h
        } else {
            0.0
        }
    }

    /// Overlap depth along each axis (negative means a gap).
    pub fn overlap_depths(&self, other: &Rect) -> Vec2 {
        Vec2::new(
            self.max.x.min(other.max.x) - self.min.x.max(other.min.x),
            self.max.y.min(other.max.y) - self.min.y.max(other.min.y),
        )
    }

    /// Closed containment.
    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn contains_strict(&self, p: Vec2) -> bool {
        p.x > self.min.x && p.x < self.max.x && p.y > self.min.y && p.y < self.max.y
    }

    pub fn contains_rect(&self, other: &Rect, tol: f64) -> bool {
        other.min.x >= self.min.x - tol
            && other.min.y >= self.min.y - tol
            && other.max.x <= self.max.x + tol
            && other.max.y <= self.max.y + tol
    }

    pub fn translated(&self, d: Vec2) -> Rect {
        Rect {
            min: self.min + d,
            max: self.max + d,
        }
    }

    pub fn closest_point(&self, p: Vec2) -> Vec2 {
        Vec2::new(
            p.x.clamp(self.min.x, self.max.x),
            p.y.clamp(self.min.y, self.max.y),
        )
    }

    /// How deeply a disc of radius `r` centred at `c` penetrates the rectangle.
    /// Zero or negative means no contact.
    pub fn disc_penetration(&self, c: Vec2, r: f64) -> f64 {
        let q = self.closest_point(c);
        let d = (c - q).norm();
        if self.contains_strict(c) {
            let inside = (c.x - self.min.x)
                .min(self.max.x - c.x)
                .min(c.y - self.min.y)
                .min(self.max.y - c.y);
            r + inside
        } else {
            r - d
        }
    }

    /// The face of the rectangle a disc centred at `c` is touching, picked by
    /// the dominant axis of the vector from the closest point to `c`.
    /// Ties resolve toward the x axis.
    pub fn contact_face(&self, c: Vec2) -> Face {
        let q = self.closest_point(c);
        let mut d = c - q;
        if d.x == 0.0 && d.y == 0.0 {
            // Centre inside: use the offset from the rectangle centre scaled by the extents.
            let h = self.half_extents();
            let off = c - self.center();
            d = Vec2::new(off.x / h.x.max(1e-12), off.y / h.y.max(1e-12));
        }
        if d.x.abs() >= d.y.abs() {
            if d.x >= 0.0 {
                Face::PosX
            } else {
                Face::NegX
            }
        } else if d.y >= 0.0 {
            Face::PosY
        } else {
            Face::NegY
        }
    }

    /// Rectangle of the given `depth` extruded outward from `face`.
    pub fn extrude(&self, face: Face, depth: f64) -> Rect {
        match face {
            Face::PosX => Rect::new(self.max.x, self.min.y, self.max.x + depth, self.max.y),
            Face::NegX => Rect::new(self.min.x - depth, self.min.y, self.min.x, self.max.y),
            Face::PosY => Rect::new(self.min.x, self.max.y, self.max.x, self.max.y + depth),
            Face::NegY => Rect::new(self.min.x, self.min.y - depth, self.max.x, self.min.y),
        }
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            self.min.x, self.min.y, self.max.x, self.max.y
        )
    }
}

/// A face of an axis-aligned body, named by its outward normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Face {
    PosX,
    NegX,
    PosY,
    NegY,
}

impl Face {
    pub const ALL: [Face; 4] = [Face::PosX, Face::NegX, Face::PosY, Face::NegY];

    pub fn normal(self) -> Vec2 {
        match self {
            Face::PosX => Vec2::new(1.0, 0.0),
            Face::NegX => Vec2::new(-1.0, 0.0),
            Face::PosY => Vec2::new(0.0, 1.0),
            Face::NegY => Vec2::new(0.0, -1.0),
        }
    }

    pub fn axis(self) -> Axis {
        match self {
            Face::PosX | Face::NegX => Axis::X,
            Face::PosY | Face::NegY => Axis::Y,
        }
    }

    pub fn opposite(self) -> Face {
        match self {
            Face::PosX => Face::NegX,
            Face::NegX => Face::PosX,
            Face::PosY => Face::NegY,
            Face::NegY => Face::PosY,
        }
    }

    fn bit(self) -> u8 {
        match self {
            Face::PosX => 1,
            Face::NegX => 2,
            Face::PosY => 4,
            Face::NegY => 8,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Face::PosX => "+x",
            Face::NegX => "-x",
            Face::PosY => "+y",
            Face::NegY => "-y",
        }
    }

    pub fn parse(s: &str) -> Option<Face> {
        match s {
            "+x" | "x" => Some(Face::PosX),
            "-x" => Some(Face::NegX),
            "+y" | "y" => Some(Face::PosY),
            "-y" => Some(Face::NegY),
            _ => None,
        }
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Small set of faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FaceSet(u8);

impl FaceSet {
    pub const EMPTY: FaceSet = FaceSet(0);
    pub const ALL: FaceSet = FaceSet(0b1111);

    pub fn insert(&mut self, f: Face) {
        self.0 |= f.bit();
    }

    pub fn remove(&mut self, f: Face) {
        self.0 &= !f.bit();
    }

    pub fn contains(self, f: Face) -> bool {
        self.0 & f.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Face> {
        Face::ALL.into_iter().filter(move |f| self.contains(*f))
    }

    pub fn is_subset(self, other: FaceSet) -> bool {
        self.0 & !other.0 == 0
    }
}

impl FromIterator<Face> for FaceSet {
    fn from_iter<I: IntoIterator<Item = Face>>(iter: I) -> Self {
        let mut s = FaceSet::EMPTY;
        for f in iter {
            s.insert(f);
        }
        s
    }
}

impl fmt::Display for FaceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.iter().map(Face::as_str).collect();
        if parts.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&parts.join(","))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_area_of_disjoint_and_touching_rects_is_zero() {
        let a = Rect::new(0.0, 0.0, 1.0, 1.0);
        assert_eq!(a.overlap_area(&Rect::new(1.0, 0.0, 2.0, 1.0)), 0.0);
        assert_eq!(a.overlap_area(&Rect::new(3.0, 3.0, 4.0, 4.0)), 0.0);
        assert!((a.overlap_area(&Rect::new(0.5, 0.5, 2.0, 2.0)) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn contact_face_ties_go_to_x() {
        let r = Rect::new(0.0, 0.0, 1.0, 1.0);
        assert_eq!(r.contact_face(Vec2::new(-0.5, 0.5)), Face::NegX);
        assert_eq!(r.contact_face(Vec2::new(0.5, 1.3)), Face::PosY);
        // exact diagonal from the corner
        assert_eq!(r.contact_face(Vec2::new(1.1, 1.1)), Face::PosX);
    }

    #[test]
    fn extrude_sits_flush_against_the_face() {
        let r = Rect::new(0.0, 0.0, 1.0, 2.0);
        let m = r.extrude(Face::NegY, 0.5);
        assert_eq!(m, Rect::new(0.0, -0.5, 1.0, 0.0));
        assert_eq!(r.overlap_area(&m), 0.0);
    }
}
